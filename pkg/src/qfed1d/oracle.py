"""Brute-force finite-difference reference for the layered Green's function.

Solves the Helmholtz equation with a delta source by second-order central
differences on a truncated window, closing both ends with one-way-wave
(outgoing) boundary conditions. Completely independent of the plane-wave
construction in :mod:`qfed1d.greens`; used only by tests.

The grid is piecewise uniform with nodes placed exactly on interfaces, on
the source point, and on requested sample points. At the finitely many
spacing junctions a three-point stencil exact for quadratics keeps the
global error at second order.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.linalg import solve_banded

from .constants import CONSTANTS, PhysicalConstants
from .materials import LayerStack

__all__ = ["green_oracle", "oracle_profile"]


def _ksq_average(boundaries, ksq_layers, lo: float, hi: float) -> complex:
    """Mean of the piecewise-constant k^2 over the interval [lo, hi]."""
    total = 0.0 + 0.0j
    edges = [lo, *[b for b in boundaries if lo < b < hi], hi]
    for a, b in zip(edges, edges[1:]):
        mid = 0.5 * (a + b)
        j = int(np.searchsorted(boundaries, mid, side="right"))
        total += (b - a) * ksq_layers[j]
    return total / (hi - lo)


def oracle_profile(
    stack: LayerStack,
    omega: float,
    xprime: float,
    constants: PhysicalConstants = CONSTANTS,
    points_per_wavelength: int = 600,
    truncation_eps: float = 1e-8,
    window_cap_wavelengths: float = 40.0,
    sample_points=(),
):
    """Finite-difference Green's function profile for a source at ``xprime``.

    Returns ``(nodes, values)``; ``sample_points`` are guaranteed to appear
    among the nodes. Raises if a semi-infinite medium is exactly lossless,
    because the window truncation error could not be bounded then.
    """
    if not omega > 0.0:
        raise ValueError(f"omega must be positive, got {omega}")
    if points_per_wavelength < 200:
        raise ValueError("need at least 200 points per wavelength for the stated accuracy")
    ns = stack.indices(omega)
    for side, n in (("left", ns[0]), ("right", ns[-1])):
        if n.imag <= 0.0:
            raise ValueError(
                f"{side} semi-infinite medium is lossless; oracle truncation error "
                "cannot be bounded (regularize the stack with a small Im(n) instead)"
            )
    c = constants.c
    k_layers = omega * ns / c
    ksq_layers = k_layers * k_layers
    lam_vac = 2.0 * math.pi * c / omega
    b = np.asarray(stack.boundaries, dtype=float)

    def tail_depth(k):
        full = math.log(1.0 / truncation_eps) / (2.0 * k.imag)
        return min(full, window_cap_wavelengths * lam_vac)

    anchor_lo = min(b[0], xprime, *sample_points) if len(sample_points) else min(b[0], xprime)
    anchor_hi = max(b[-1], xprime, *sample_points) if len(sample_points) else max(b[-1], xprime)
    xa = anchor_lo - tail_depth(k_layers[0])
    xb = anchor_hi + tail_depth(k_layers[-1])

    breakpoints = sorted({xa, xb, xprime, *sample_points, *(bi for bi in b if xa < bi < xb)})
    nodes = [np.array([xa])]
    for lo, hi in zip(breakpoints, breakpoints[1:]):
        mid = 0.5 * (lo + hi)
        j = int(np.searchsorted(b, mid, side="right"))
        h_target = lam_vac / (points_per_wavelength * max(ns[j].real, 1.0))
        nsub = max(1, int(math.ceil((hi - lo) / h_target)))
        nodes.append(np.linspace(lo, hi, nsub + 1)[1:])
    x = np.concatenate(nodes)
    n_nodes = x.size
    h = np.diff(x)

    diag = np.zeros(n_nodes, dtype=complex)
    upper = np.zeros(n_nodes - 1, dtype=complex)
    lower = np.zeros(n_nodes - 1, dtype=complex)
    rhs = np.zeros(n_nodes, dtype=complex)

    hl, hr = h[:-1], h[1:]
    lower[:-1] = 2.0 / (hl * (hl + hr))
    upper[1:] = 2.0 / (hr * (hl + hr))
    cell_lo = x[1:-1] - 0.5 * hl
    cell_hi = x[1:-1] + 0.5 * hr
    ksq_nodes = np.array(
        [_ksq_average(b, ksq_layers, lo_i, hi_i) for lo_i, hi_i in zip(cell_lo, cell_hi)]
    )
    diag[1:-1] = -2.0 / (hl * hr) + ksq_nodes

    # one-way-wave closures via ghost-node elimination (outgoing at both ends)
    k_end = k_layers[0]
    diag[0] = -2.0 / h[0] ** 2 + 2j * k_end / h[0] + ksq_layers[0]
    upper[0] = 2.0 / h[0] ** 2
    k_end = k_layers[-1]
    diag[-1] = -2.0 / h[-1] ** 2 + 2j * k_end / h[-1] + ksq_layers[-1]
    lower[-1] = 2.0 / h[-1] ** 2

    i_src = int(np.argmin(np.abs(x - xprime)))
    rhs[i_src] = -2.0 / (h[max(i_src - 1, 0)] + h[min(i_src, n_nodes - 2)])

    ab = np.zeros((3, n_nodes), dtype=complex)
    ab[0, 1:] = upper
    ab[1, :] = diag
    ab[2, :-1] = lower
    g = solve_banded((1, 1), ab, rhs)
    return x, g


def green_oracle(
    stack: LayerStack,
    omega: float,
    x: float,
    xprime: float,
    constants: PhysicalConstants = CONSTANTS,
    points_per_wavelength: int = 600,
    truncation_eps: float = 1e-8,
) -> complex:
    """Single Green's function value from the finite-difference solver."""
    nodes, g = oracle_profile(
        stack,
        omega,
        xprime,
        constants,
        points_per_wavelength=points_per_wavelength,
        truncation_eps=truncation_eps,
        sample_points=(x,),
    )
    return complex(g[int(np.argmin(np.abs(nodes - x)))])
