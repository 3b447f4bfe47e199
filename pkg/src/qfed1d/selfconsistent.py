"""Steady-state temperature profile of lossy cavity layers.

A lossy layer sandwiched between thermal reservoirs both emits and absorbs
radiation. Its radiative steady state is the per-cell temperature profile for
which the frequency-integrated net emission vanishes in every cell (heat
conduction other than radiation is neglected; balance is imposed on the
frequency-integrated rate, not per frequency, which would over-determine the
profile).

The solver alternates two steps until stationary:

1. with the current profile, evaluate the effective photon-number field of
   all sources on a fixed spectral collocation rule (built once by adaptive
   refinement against a probe integrand);
2. at that frozen field, solve each cell's scalar balance equation for its
   temperature by bisection between the reservoir temperatures (the local
   emission term is strictly increasing in the cell temperature, and the
   field occupation is a convex combination of reservoir occupations, which
   brackets the root), then apply under-relaxation.

Reported residuals are recomputed from scratch with fresh adaptive
frequency quadrature on the converged profile.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .constants import CONSTANTS, PhysicalConstants
from .greens import GreenSolver
from .materials import CellTemperatures, LayerStack
from .observables import (
    bose_einstein,
    ldos_profile,
    net_emission,
    net_emission_profile,
    photon_number_profile,
)
from .quadrature import (
    QuadratureSpec,
    build_spectrum_rule,
    integrate_spectrum,
    integrate_spectrum_vec,
)

__all__ = [
    "SolverSpec",
    "CavitySolution",
    "BracketError",
    "cavity_cells",
    "cell_power_residual",
    "solve_cavity_temperatures",
]

#: Default residual tolerance as a fraction of the emission span between the
#: coldest and hottest reservoir temperature (used when q_tol is not given).
Q_TOL_SPAN_FACTOR = 1e-5

#: Source-integral tolerance used when verifying balance residuals. Near a
#: balanced profile the bracket (reservoir minus field occupation) nearly
#: cancels, so occupation errors are amplified; the default field tolerance
#: is not sufficient for the verification integrand.
RESIDUAL_INNER_REL_TOL = 1e-8

_DEFAULT_BAND = (CONSTANTS.omega_from_ev(1e-3), CONSTANTS.omega_from_ev(1.0))


class BracketError(RuntimeError):
    """Cell balance has no root between the reservoir temperatures."""


@dataclass(frozen=True)
class SolverSpec:
    """Discretization and convergence controls for the cavity solver.

    ``omega_band`` bounds the spectral balance integrals (rad/s); outside the
    default 1 meV .. 1 eV band the Bose factors at a few hundred kelvin
    contribute less than 1e-8 of the total (asserted in tests).
    """

    n_cells: int = 50
    q_tol: float | None = None
    t_tol: float = 0.01
    max_outer_iterations: int = 60
    underrelaxation: float = 0.7
    omega_band: tuple[float, float] = _DEFAULT_BAND

    def __post_init__(self) -> None:
        if self.n_cells < 1:
            raise ValueError("n_cells must be at least 1")
        if self.q_tol is not None and not self.q_tol > 0.0:
            raise ValueError("q_tol must be positive")
        if not self.t_tol > 0.0:
            raise ValueError("t_tol must be positive")
        if self.max_outer_iterations < 1:
            raise ValueError("max_outer_iterations must be at least 1")
        if not 0.0 < self.underrelaxation <= 1.0:
            raise ValueError("underrelaxation must lie in (0, 1]")
        lo, hi = self.omega_band
        if not 0.0 < lo < hi:
            raise ValueError(f"invalid omega band [{lo}, {hi}]")


@dataclass(frozen=True, eq=False)
class CavitySolution:
    """Converged per-cell temperatures with convergence diagnostics.

    ``residuals`` are freshly integrated net emission rates per cell;
    ``stack`` carries the converged profile for downstream field maps.
    """

    cell_centers: np.ndarray
    temperatures: np.ndarray
    residuals: np.ndarray
    iterations: int
    converged: bool
    q_tol: float
    stack: LayerStack = field(repr=False)


def cavity_cells(
    stack: LayerStack, spec: SolverSpec, constants: PhysicalConstants = CONSTANTS
):
    """Cell decomposition of every lossy interior layer.

    Returns a list of ``(layer_index, local_edges, global_centers)`` tuples,
    one per lossy interior layer, each with ``spec.n_cells`` uniform cells.
    """
    omega_probe = math.sqrt(spec.omega_band[0] * spec.omega_band[1])
    cells = []
    for j, layer in enumerate(stack.layers, start=1):
        n = layer.material.index(omega_probe)
        if (n * n).imag <= 0.0:
            continue
        edges = np.linspace(0.0, layer.thickness, spec.n_cells + 1)
        centers = stack.boundaries[j - 1] + 0.5 * (edges[:-1] + edges[1:])
        cells.append((j, edges, centers))
    if not cells:
        raise ValueError("stack has no lossy interior layer to solve for")
    return cells


def _profile_stack(stack: LayerStack, cells, temperatures: np.ndarray) -> LayerStack:
    out = stack
    offset = 0
    for j, edges, centers in cells:
        block = temperatures[offset : offset + centers.size]
        out = out.with_layer_temperature(
            j, CellTemperatures(tuple(edges), tuple(block))
        )
        offset += centers.size
    return out


def cell_power_residual(
    stack: LayerStack,
    cell_index: int,
    spec: SolverSpec = SolverSpec(),
    quad: QuadratureSpec = QuadratureSpec(),
    constants: PhysicalConstants = CONSTANTS,
    abs_floor: float | None = None,
) -> float:
    """Frequency-integrated net emission of one cavity cell (W/m^3-scale).

    Positive means the cell emits more than it absorbs from the field. The
    stack should already carry the temperature profile of interest.

    Near a balanced profile the spectral integrand cancels, so a purely
    relative tolerance is unattainable; pass ``abs_floor`` (for example a
    tenth of the residual tolerance being verified) to bound the absolute
    accuracy instead.
    """
    cells = cavity_cells(stack, spec, constants)
    centers = np.concatenate([c for _, _, c in cells])
    if not 0 <= cell_index < centers.size:
        raise IndexError(f"cell index {cell_index} out of range (0..{centers.size - 1})")
    x = float(centers[cell_index])
    # the floor applies to the frequency integral only: source integrals have
    # a completely different absolute scale and must keep their own tolerance
    inner = replace(quad, rel_tol=min(quad.rel_tol, RESIDUAL_INNER_REL_TOL))
    outer = quad if abs_floor is None else replace(quad, abs_floor=abs_floor)
    lo, hi = spec.omega_band
    return integrate_spectrum(
        lambda w: net_emission(stack, x, w, inner, constants), lo, hi, outer
    )


def _fresh_residuals(
    stack: LayerStack,
    centers: np.ndarray,
    spec: SolverSpec,
    quad: QuadratureSpec,
    constants: PhysicalConstants,
    abs_floor: float,
) -> np.ndarray:
    inner = replace(quad, rel_tol=min(quad.rel_tol, RESIDUAL_INNER_REL_TOL))

    def fvec(ws: np.ndarray) -> np.ndarray:
        cols = [net_emission_profile(stack, centers, w, inner, constants) for w in ws]
        return np.stack(cols, axis=1)

    lo, hi = spec.omega_band
    outer = replace(quad, abs_floor=max(quad.abs_floor, abs_floor))
    return integrate_spectrum_vec(fvec, lo, hi, outer)


def _bisect_balance(emission, field_term, t_lo, t_hi, xtol, slack):
    """Vectorized bisection of ``emission(T) - field_term = 0`` per cell."""
    n = field_term.size
    if t_hi - t_lo < xtol:
        return np.full(n, 0.5 * (t_lo + t_hi))
    r_lo = emission(np.full(n, t_lo)) - field_term
    r_hi = emission(np.full(n, t_hi)) - field_term
    if np.any(r_lo > slack) or np.any(r_hi < -slack):
        raise BracketError(
            "cell balance residual does not change sign between the reservoir "
            "temperatures; the configuration is inconsistent with a purely "
            "radiative steady state"
        )
    lo = np.full(n, t_lo)
    hi = np.full(n, t_hi)
    lo[r_lo >= 0.0] = t_lo  # roots pinned at the bracket ends stay there
    hi[r_hi <= 0.0] = t_hi
    for _ in range(int(math.ceil(math.log2((t_hi - t_lo) / xtol))) + 1):
        mid = 0.5 * (lo + hi)
        r = emission(mid) - field_term
        below = r < 0.0
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


def solve_cavity_temperatures(
    stack: LayerStack,
    spec: SolverSpec = SolverSpec(),
    quad: QuadratureSpec = QuadratureSpec(),
    constants: PhysicalConstants = CONSTANTS,
) -> CavitySolution:
    """Temperature profile with zero frequency-integrated net emission per cell.

    Non-convergence within the iteration budget is reported through
    ``converged=False`` together with the final residuals rather than an
    exception; a missing bisection bracket raises :class:`BracketError`.
    """
    cells = cavity_cells(stack, spec, constants)
    centers = np.concatenate([c for _, _, c in cells])
    t_lo = min(stack.left_temperature, stack.right_temperature)
    t_hi = max(stack.left_temperature, stack.right_temperature)
    initial = []
    for j, _, c in cells:
        t0 = stack.layers[j - 1].temperature
        if isinstance(t0, CellTemperatures):
            vals = np.interp(
                c - stack.boundaries[j - 1],
                0.5 * (np.asarray(t0.edges[:-1]) + np.asarray(t0.edges[1:])),
                t0.values,
            )
        else:
            vals = np.full(c.size, t0)
        initial.append(np.clip(vals, t_lo, t_hi))
    temps = np.concatenate(initial)
    lo, hi = spec.omega_band

    # Fixed collocation rule for the iteration, refined against a probe with
    # the spectral shape of the balance integrand at mid-cavity.
    hbar = constants.hbar
    x_probe = float(centers[centers.size // 2])
    rule_quad = QuadratureSpec(
        rel_tol=min(quad.rel_tol, 1e-7),
        abs_floor=quad.abs_floor,
        tail_truncation_eps=quad.tail_truncation_eps,
        max_subdivisions=quad.max_subdivisions,
    )
    j_probe = cells[0][0]

    def probe(w: float) -> float:
        n = stack.layers[j_probe - 1].material.index(w)
        solver = GreenSolver(stack, w, constants)
        rho = float(ldos_profile(stack, [x_probe], w, constants, solver)[0])
        occ = bose_einstein(t_hi, w, constants) + bose_einstein(t_lo, w, constants)
        return hbar * w**2 * (n * n).imag * rho * occ

    nodes, weights = build_spectrum_rule(probe, lo, hi, rule_quad)
    solvers = [GreenSolver(stack, w, constants) for w in nodes]

    # emission weights per (cell, node): hbar w^2 Im[n^2] rho(x_c, w)
    w_ck = np.empty((centers.size, nodes.size))
    for ki, (w, solver) in enumerate(zip(nodes, solvers)):
        rho = ldos_profile(stack, centers, w, constants, solver)
        offset = 0
        for j, _, c in cells:
            n = stack.layers[j - 1].material.index(w)
            w_ck[offset : offset + c.size, ki] = (
                hbar * w**2 * (n * n).imag * rho[offset : offset + c.size]
            )
            offset += c.size
    ww = w_ck * weights[None, :]

    def emission(T: np.ndarray) -> np.ndarray:
        occ = bose_einstein(T[:, None], nodes[None, :], constants)
        return (ww * occ).sum(axis=1)

    span = float(
        np.max(np.abs(emission(np.full(centers.size, t_hi)) - emission(np.full(centers.size, t_lo))))
    )
    if span == 0.0:  # equal reservoirs: any profile is balanced at T_lo
        span = float(np.max(np.abs(emission(np.full(centers.size, t_hi)))))
    q_tol = spec.q_tol if spec.q_tol is not None else Q_TOL_SPAN_FACTOR * span
    xtol = spec.t_tol / 50.0
    slack = max(q_tol, 1e-12 * span)

    converged = False
    iterations = 0
    for iterations in range(1, spec.max_outer_iterations + 1):
        work = _profile_stack(stack, cells, temps)
        nhat = np.empty_like(w_ck)
        for ki, (w, solver) in enumerate(zip(nodes, solvers)):
            nhat[:, ki] = photon_number_profile(work, centers, w, quad, constants, solver)
        field_term = (ww * nhat).sum(axis=1)
        residual = emission(temps) - field_term
        roots = _bisect_balance(emission, field_term, t_lo, t_hi, xtol, slack)
        shift = float(np.max(np.abs(roots - temps)))
        # stop at half the reporting tolerance so the fresh residual check
        # (different quadrature) retains margin
        if np.max(np.abs(residual)) <= 0.5 * q_tol and shift <= spec.t_tol:
            converged = True
            break
        temps = temps + spec.underrelaxation * (roots - temps)

    final_stack = _profile_stack(stack, cells, temps)
    residuals = _fresh_residuals(final_stack, centers, spec, quad, constants, 0.05 * q_tol)
    converged = converged and bool(np.all(np.abs(residuals) < q_tol))
    return CavitySolution(
        cell_centers=centers,
        temperatures=temps,
        residuals=residuals,
        iterations=iterations,
        converged=converged,
        q_tol=q_tol,
        stack=final_stack,
    )
