"""Local observables of the thermal electromagnetic field.

Everything here reduces to the layered Green's function plus source-point
integrals weighted by the Bose-Einstein occupation of each thermal reservoir:

* electric local density of states (LDOS),
* effective photon number (vector-potential-weighted source integral,
  normalized by the local LDOS),
* effective field temperature (Bose-Einstein inversion of the photon number),
* spectral energy flux along x (Poynting vector, positive towards +x),
* local net emission rate (emission minus absorption per unit length).

Scalar operations delegate to vectorized profile functions evaluating many
observation points against one shared adaptive quadrature, so a 1x1 field map
and the scalar call produce bit-identical values.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks

from .constants import CONSTANTS, PhysicalConstants
from .greens import DEFAULT_LOSSLESS_REG, GreenSolver, solver_for
from .materials import LayerStack, SpectralGrid, temperatures_at
from .quadrature import QuadratureSpec, integrate_sources_vec

__all__ = [
    "DegenerateLDOSError",
    "FieldMapError",
    "FieldMap",
    "OBSERVABLE_NAMES",
    "ldos",
    "ldos_profile",
    "bose_einstein",
    "photon_number",
    "photon_number_profile",
    "effective_temperature",
    "poynting_spectral",
    "poynting_profile",
    "net_emission",
    "net_emission_profile",
    "field_map",
    "local_maxima",
]

#: Photon-number normalization is refused below this fraction of the
#: homogeneous-vacuum LDOS: a vanishing mode density makes the local
#: occupation meaningless (and the net emission rate is zero there anyway).
RHO_FLOOR_FACTOR = 1e-12

OBSERVABLE_NAMES = ("ldos", "photon_number", "temperature", "poynting", "net_emission")

UNITS = {
    "ldos": "2/(pi c S)",
    "photon_number": "dimensionless",
    "temperature": "K",
    "poynting": "W m^-2 (rad/s)^-1",
    "net_emission": "W m^-3 (rad/s)^-1",
}


class DegenerateLDOSError(ValueError):
    """LDOS too small to normalize the local photon number."""


class FieldMapError(RuntimeError):
    """One or more grid points failed to evaluate."""


def _as_positions(xs) -> np.ndarray:
    return np.atleast_1d(np.asarray(xs, dtype=float))


def _im_eps_profile(stack: LayerStack, xs: np.ndarray, omega: float) -> np.ndarray:
    """Im[n^2] of the true (unregularized) material at each position."""
    layers = np.searchsorted(stack.boundaries, xs, side="right")
    out = np.empty(xs.shape)
    for j in np.unique(layers):
        n = stack.index_of_layer(j, omega)
        out[layers == j] = (n * n).imag
    return out


# ---------------------------------------------------------------------------
# LDOS
# ---------------------------------------------------------------------------

def ldos_profile(
    stack: LayerStack,
    xs,
    omega: float,
    constants: PhysicalConstants = CONSTANTS,
    solver: GreenSolver | None = None,
) -> np.ndarray:
    """Electric LDOS (SI, states per length, angular frequency and area)."""
    xs = _as_positions(xs)
    if solver is None:
        solver = solver_for(stack, omega, constants)
    g = solver.coincident(xs)
    return 2.0 * omega / (math.pi * constants.c**2 * constants.S) * g.imag


def ldos(
    stack: LayerStack,
    x: float,
    omega: float,
    constants: PhysicalConstants = CONSTANTS,
    lossless_reg: float = DEFAULT_LOSSLESS_REG,
) -> float:
    """Electric LDOS at one point; divide by ``2/(pi c S)`` for plot units."""
    solver = solver_for(stack, omega, constants, lossless_reg)
    return float(ldos_profile(stack, [x], omega, constants, solver)[0])


# ---------------------------------------------------------------------------
# Occupation numbers and temperatures
# ---------------------------------------------------------------------------

def bose_einstein(T, omega, constants: PhysicalConstants = CONSTANTS):
    """Thermal occupation ``1/(e^{hbar omega / k_B T} - 1)``.

    Accepts scalars or arrays; overflow-safe for ``hbar omega >> k_B T``
    (switches to the ``e^{-x}`` asymptotic once the exponent exceeds 700).
    """
    T_arr = np.asarray(T, dtype=float)
    w_arr = np.asarray(omega, dtype=float)
    if np.any(T_arr <= 0.0):
        raise ValueError("temperature must be strictly positive")
    if np.any(w_arr <= 0.0):
        raise ValueError("omega must be strictly positive")
    x = constants.hbar * w_arr / (constants.k_B * T_arr)
    with np.errstate(over="ignore"):
        occ = np.where(x > 700.0, np.exp(-x), 1.0 / np.expm1(np.minimum(x, 700.0)))
    if np.isscalar(T) and np.isscalar(omega):
        return float(occ)
    return occ


def effective_temperature(n_exp, omega, constants: PhysicalConstants = CONSTANTS):
    """Temperature whose Bose-Einstein occupation equals ``n_exp`` at ``omega``.

    Exact inverse of :func:`bose_einstein` at fixed frequency; strictly
    increasing in the occupation.
    """
    n_arr = np.asarray(n_exp, dtype=float)
    if np.any(n_arr <= 0.0):
        raise ValueError("occupation must be strictly positive to define a temperature")
    w_arr = np.asarray(omega, dtype=float)
    if np.any(w_arr <= 0.0):
        raise ValueError("omega must be strictly positive")
    T = constants.hbar * w_arr / (constants.k_B * np.log1p(1.0 / n_arr))
    if np.isscalar(n_exp) and np.isscalar(omega):
        return float(T)
    return T


# ---------------------------------------------------------------------------
# Photon number
# ---------------------------------------------------------------------------

def photon_number_profile(
    stack: LayerStack,
    xs,
    omega: float,
    spec: QuadratureSpec = QuadratureSpec(),
    constants: PhysicalConstants = CONSTANTS,
    solver: GreenSolver | None = None,
) -> np.ndarray:
    """Effective photon number at each observation point.

    The source integral runs over every lossy region, weighting the squared
    vector-potential kernel by the local reservoir occupation; the result is
    normalized by the local LDOS. At global equilibrium this is the constant
    reservoir occupation at every point.
    """
    xs = _as_positions(xs)
    if solver is None:
        solver = solver_for(stack, omega, constants)
    rho = ldos_profile(stack, xs, omega, constants, solver)
    rho_floor = RHO_FLOOR_FACTOR / (math.pi * constants.c * constants.S)
    if np.any(rho < rho_floor):
        bad = xs[rho < rho_floor]
        raise DegenerateLDOSError(
            f"LDOS below {RHO_FLOOR_FACTOR} of the vacuum value at x = {bad}; "
            "photon-number normalization is undefined there"
        )
    pref = 4.0 * math.pi * constants.hbar * omega**2 * constants.eps0 / constants.S
    mu0_sq = constants.mu0**2

    def kernel(xps: np.ndarray) -> np.ndarray:
        G, _, _ = solver.batch(xs, xps)
        w = (
            pref
            * _im_eps_profile(stack, xps, omega)
            * bose_einstein(temperatures_at(stack, xps), omega, constants)
        )
        return mu0_sq * (G.real**2 + G.imag**2) * w[None, :]

    integral = integrate_sources_vec(
        stack, omega, kernel, xs.size, spec, constants, breakpoints=xs
    )
    return constants.eps0 * omega / (2.0 * math.pi**2 * constants.hbar * rho) * integral


def photon_number(
    stack: LayerStack,
    x: float,
    omega: float,
    spec: QuadratureSpec = QuadratureSpec(),
    constants: PhysicalConstants = CONSTANTS,
) -> float:
    """Effective photon number expectation at one point."""
    return float(photon_number_profile(stack, [x], omega, spec, constants)[0])


# ---------------------------------------------------------------------------
# Energy flux and net emission
# ---------------------------------------------------------------------------

def poynting_profile(
    stack: LayerStack,
    xs,
    omega: float,
    spec: QuadratureSpec = QuadratureSpec(),
    constants: PhysicalConstants = CONSTANTS,
    solver: GreenSolver | None = None,
) -> np.ndarray:
    """Spectral Poynting vector at each point (positive = flux towards +x)."""
    xs = _as_positions(xs)
    if solver is None:
        solver = solver_for(stack, omega, constants)
    n_obs = solver.k[solver.layer_of(xs)] * constants.c / omega
    pref = 4.0 * math.pi * constants.hbar * omega**2 * constants.eps0 / constants.S
    mu0 = constants.mu0

    def kernel(xps: np.ndarray) -> np.ndarray:
        G, GR, GL = solver.batch(xs, xps)
        w = (
            pref
            * _im_eps_profile(stack, xps, omega)
            * bose_einstein(temperatures_at(stack, xps), omega, constants)
        )
        flux = (n_obs[:, None] / constants.c * np.conj(G) * (GR - GL)).real
        return mu0 * omega**2 * flux * w[None, :]

    integral = integrate_sources_vec(
        stack, omega, kernel, xs.size, spec, constants, breakpoints=xs
    )
    return integral / (2.0 * math.pi**2)


def poynting_spectral(
    stack: LayerStack,
    x: float,
    omega: float,
    spec: QuadratureSpec = QuadratureSpec(),
    constants: PhysicalConstants = CONSTANTS,
) -> float:
    """Spectral Poynting vector at one point."""
    return float(poynting_profile(stack, [x], omega, spec, constants)[0])


def net_emission_profile(
    stack: LayerStack,
    xs,
    omega: float,
    spec: QuadratureSpec = QuadratureSpec(),
    constants: PhysicalConstants = CONSTANTS,
    solver: GreenSolver | None = None,
) -> np.ndarray:
    """Net spectral emission rate: local emission minus absorption.

    Exactly zero in lossless regions without touching the photon number;
    elsewhere proportional to the gap between the local reservoir occupation
    and the effective field occupation.
    """
    xs = _as_positions(xs)
    out = np.zeros(xs.shape)
    im_eps = _im_eps_profile(stack, xs, omega)
    lossy = im_eps > 0.0
    if not lossy.any():
        return out
    if solver is None:
        solver = solver_for(stack, omega, constants)
    xs_l = xs[lossy]
    rho = ldos_profile(stack, xs_l, omega, constants, solver)
    n_exp = photon_number_profile(stack, xs_l, omega, spec, constants, solver)
    eta = bose_einstein(temperatures_at(stack, xs_l), omega, constants)
    out[lossy] = constants.hbar * omega**2 * im_eps[lossy] * rho * (eta - n_exp)
    return out


def net_emission(
    stack: LayerStack,
    x: float,
    omega: float,
    spec: QuadratureSpec = QuadratureSpec(),
    constants: PhysicalConstants = CONSTANTS,
) -> float:
    """Net spectral emission rate at one point."""
    return float(net_emission_profile(stack, [x], omega, spec, constants)[0])


# ---------------------------------------------------------------------------
# Field maps over a grid
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FieldMap:
    """A named observable sampled on a (position x energy) grid."""

    grid: SpectralGrid
    name: str
    values: np.ndarray
    units: str

    def __post_init__(self) -> None:
        if self.name not in OBSERVABLE_NAMES:
            raise ValueError(f"unknown observable {self.name!r}")
        if self.values.shape != self.grid.shape:
            raise ValueError(
                f"values shape {self.values.shape} does not match grid {self.grid.shape}"
            )
        if self.name == "ldos" and np.any(self.values < 0.0):
            raise ValueError("LDOS must be non-negative")
        if self.name == "temperature" and np.any(self.values <= 0.0):
            raise ValueError("temperatures must be strictly positive")


def _field_column(
    name: str,
    stack: LayerStack,
    xs: tuple,
    energy_ev: float,
    spec: QuadratureSpec,
    constants: PhysicalConstants,
) -> np.ndarray:
    omega = constants.omega_from_ev(energy_ev)
    solver = GreenSolver(stack, omega, constants)
    if name == "ldos":
        rho = ldos_profile(stack, xs, omega, constants, solver)
        return rho * math.pi * constants.c * constants.S / 2.0
    if name == "photon_number":
        return photon_number_profile(stack, xs, omega, spec, constants, solver)
    if name == "temperature":
        n_exp = photon_number_profile(stack, xs, omega, spec, constants, solver)
        return effective_temperature(n_exp, omega, constants)
    if name == "poynting":
        return poynting_profile(stack, xs, omega, spec, constants, solver)
    if name == "net_emission":
        return net_emission_profile(stack, xs, omega, spec, constants, solver)
    raise ValueError(f"unknown observable {name!r}")


def _column_job(args):
    return _field_column(*args)


def field_map(
    stack: LayerStack,
    grid: SpectralGrid,
    name: str,
    spec: QuadratureSpec = QuadratureSpec(),
    constants: PhysicalConstants = CONSTANTS,
    workers: int = 1,
) -> FieldMap:
    """Evaluate an observable on every grid point.

    Deterministic for a given spec: every point is a pure function of its
    coordinates, so results do not depend on evaluation order or on
    ``workers`` (energy columns may be computed in parallel processes).
    """
    if name not in OBSERVABLE_NAMES:
        raise ValueError(f"unknown observable {name!r}; expected one of {OBSERVABLE_NAMES}")
    xs = grid.positions
    jobs = [(name, stack, xs, e, spec, constants) for e in grid.energies_ev]
    failures: list[str] = []
    columns: list[np.ndarray | None] = [None] * len(jobs)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_column_job, job) for job in jobs]
            outcomes = [(i, f) for i, f in enumerate(futures)]
    else:
        outcomes = [(i, job) for i, job in enumerate(jobs)]
    for i, item in outcomes:
        try:
            columns[i] = item.result() if workers > 1 else _column_job(item)
        except Exception as exc:  # noqa: BLE001 - aggregated and re-raised
            failures.append(
                f"energy {grid.energies_ev[i]:.6g} eV "
                f"(x in [{xs[0]:.6g}, {xs[-1]:.6g}] m): {exc}"
            )
    if failures:
        raise FieldMapError(
            f"{len(failures)} of {len(jobs)} energy columns failed:\n" + "\n".join(failures)
        )
    values = np.column_stack(columns)
    return FieldMap(grid=grid, name=name, values=values, units=UNITS[name])


def local_maxima(values, prominence_rel: float = 0.01) -> np.ndarray:
    """Indices of interior local maxima with a relative prominence filter."""
    values = np.asarray(values, dtype=float)
    span = values.max() - values.min()
    if span <= 0.0:
        return np.array([], dtype=int)
    idx, _ = find_peaks(values, prominence=prominence_rel * span)
    return idx
