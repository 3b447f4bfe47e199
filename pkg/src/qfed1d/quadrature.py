"""Adaptive panel quadrature for source-point and frequency integrals.

Source integrands are piecewise smooth: they oscillate on the scale of the
local wavelength inside layers, have a kink where the source meets an
observation point, and decay as pure exponentials into semi-infinite lossy
media (single propagation direction survives there). The integrator therefore
works on per-layer panels no wider than a quarter local wavelength, places
panel edges on interfaces and observation points, truncates each lossy tail
at a depth where the remaining contribution is negligible, and refines
adaptively with a Gauss-Kronrod 7/15 pair evaluated in batch.

Convergence is declared against ``max(abs_floor, rel_tol * L1)`` where ``L1``
is the sum of panel magnitudes: for cancelling integrands (equilibrium energy
flux) the achievable accuracy is relative to the integral of ``|f|``, not the
vanishing net value.

Kernel callables must accept a float array of positions and return an array
of values; they must be safe for concurrent invocation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import CONSTANTS, PhysicalConstants
from .materials import LayerStack

__all__ = [
    "QuadratureSpec",
    "QuadratureError",
    "integrate_sources",
    "integrate_sources_vec",
    "integrate_spectrum",
    "integrate_spectrum_vec",
    "build_spectrum_rule",
    "source_segments",
]

# Gauss-Kronrod 7/15 abscissae and weights on [-1, 1].
_XGK = np.array(
    [
        0.9914553711208126,
        0.9491079123427585,
        0.8648644233597691,
        0.7415311855993944,
        0.5860872354676911,
        0.4058451513773972,
        0.2077849550078985,
    ]
)
_WGK = np.array(
    [
        0.02293532201052922,
        0.06309209262997855,
        0.10479001032225018,
        0.14065325971552592,
        0.16900472663926790,
        0.19035057806478541,
        0.20443294007529889,
    ]
)
_WGK0 = 0.20948214108472783
_WG = np.array(
    [
        0.12948496616886969,
        0.27970539148927666,
        0.38183005050511894,
    ]
)
_WG0 = 0.41795918367346939

NODES = np.concatenate([-_XGK, [0.0], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK, [_WGK0], _WGK[::-1]])
_wg_full = np.zeros(15)
_wg_full[1:7:2] = _WG
_wg_full[7] = _WG0
_wg_full[9:15:2] = _WG[::-1]
GAUSS_WEIGHTS = _wg_full

#: Initial panels are at most a quarter of the local wavelength wide.
PANELS_PER_WAVELENGTH = 4


class QuadratureError(RuntimeError):
    """Adaptive refinement exhausted its budget without meeting tolerance."""


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and budgets for the adaptive integrators."""

    rel_tol: float = 1e-6
    abs_floor: float = 1e-300  # effectively no absolute floor by default
    tail_truncation_eps: float = 1e-10
    max_subdivisions: int = 4000

    def __post_init__(self) -> None:
        for name in ("rel_tol", "abs_floor", "tail_truncation_eps"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ValueError(f"{name} must lie in (0, 1), got {v}")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be at least 1")


def _eval_panels(fvec, panels: np.ndarray):
    """Kronrod value and |K - G| estimate for each panel, one kernel call.

    ``panels``: (n, 2) array of bounds. Returns (I, E) with shape
    (ncomp, n_panels).
    """
    half = 0.5 * (panels[:, 1] - panels[:, 0])
    mid = 0.5 * (panels[:, 0] + panels[:, 1])
    pts = (mid[:, None] + half[:, None] * NODES[None, :]).ravel()
    vals = np.asarray(fvec(pts), dtype=float)
    if vals.ndim == 1:
        vals = vals[None, :]
    vals = vals.reshape(vals.shape[0], panels.shape[0], 15)
    I = (vals * KRONROD_WEIGHTS).sum(axis=2) * half
    G = (vals * GAUSS_WEIGHTS).sum(axis=2) * half
    return I, np.abs(I - G)


def adaptive_panels(fvec, segments, spec: QuadratureSpec):
    """Core adaptive loop over an explicit initial panel list.

    ``fvec`` maps a flat position array to a (ncomp, npoints) array (a 1D
    return is treated as a single component). Returns ``(integral, error,
    panels)`` where ``integral`` and ``error`` are per-component and
    ``panels`` is the final (n, 2) bounds array.
    """
    panels = np.asarray([(float(a), float(b)) for a, b in segments], dtype=float)
    if panels.size == 0:
        return np.zeros(1), np.zeros(1), panels.reshape(0, 2)
    I, E = _eval_panels(fvec, panels)
    splits_used = 0
    while True:
        total = I.sum(axis=1)
        err = E.sum(axis=1)
        l1 = np.abs(I).sum(axis=1)
        tol = np.maximum(spec.abs_floor, spec.rel_tol * l1)
        failing = err > tol
        if not failing.any():
            return total, err, panels
        width = panels[:, 1] - panels[:, 0]
        scale = np.maximum(np.abs(panels).max(), width.max())
        splittable = width > 64.0 * np.finfo(float).eps * scale
        share = tol[failing, None] / (2.0 * panels.shape[0])
        flag = (E[failing] > share).any(axis=0) & splittable
        if not flag.any():
            candidates = np.nonzero(splittable)[0]
            if candidates.size == 0:
                raise QuadratureError(
                    "panels can no longer be refined but tolerance is unmet "
                    f"(error {err.max():.3e}, tolerance {tol.min():.3e})"
                )
            flag[candidates[np.argmax(E[failing].sum(axis=0)[candidates])]] = True
        n_split = int(flag.sum())
        if splits_used + n_split > spec.max_subdivisions:
            raise QuadratureError(
                f"exceeded max_subdivisions={spec.max_subdivisions} "
                f"(error {err.max():.3e}, tolerance {tol.min():.3e})"
            )
        splits_used += n_split
        a = panels[flag, 0]
        b = panels[flag, 1]
        m = 0.5 * (a + b)
        children = np.concatenate(
            [np.stack([a, m], axis=1), np.stack([m, b], axis=1)], axis=0
        )
        Ic, Ec = _eval_panels(fvec, children)
        keep = ~flag
        panels = np.concatenate([panels[keep], children], axis=0)
        I = np.concatenate([I[:, keep], Ic], axis=1)
        E = np.concatenate([E[:, keep], Ec], axis=1)


def _subdivide(lo: float, hi: float, width: float, inner=()):
    """Uniform panels of at most ``width`` between lo and hi, split at ``inner``."""
    edges = [lo, *sorted(p for p in inner if lo < p < hi), hi]
    out = []
    for a, b in zip(edges, edges[1:]):
        n = max(1, int(math.ceil((b - a) / width)))
        sub = np.linspace(a, b, n + 1)
        out.extend(zip(sub[:-1], sub[1:]))
    return out


def source_segments(
    stack: LayerStack,
    omega: float,
    spec: QuadratureSpec,
    constants: PhysicalConstants = CONSTANTS,
    breakpoints=(),
):
    """Initial panel decomposition of the lossy support of a source integral.

    Lossless regions are omitted entirely (the noise-current factor makes
    every source kernel vanish there). Each lossy semi-infinite tail is
    truncated at a depth giving a relative tail error below
    ``tail_truncation_eps``, measured from the deepest of the interface and
    any breakpoint (observation point) inside that medium; beyond a short
    fine zone the panels grow geometrically since the integrand there is a
    non-oscillating exponential.
    """
    ns = stack.indices(omega)
    lam = 2.0 * math.pi * constants.c / omega
    b = stack.boundaries
    bps = sorted(set(float(p) for p in breakpoints))
    segments = []
    for j, layer in enumerate(stack.layers, start=1):
        n = ns[j]
        if (n * n).imag <= 0.0:
            continue
        width = lam / (PANELS_PER_WAVELENGTH * n.real)
        segments.extend(_subdivide(b[j - 1], b[j], width, bps))
    for side in ("left", "right"):
        n = ns[0] if side == "left" else ns[-1]
        if (n * n).imag <= 0.0:
            continue
        im_k = omega * n.imag / constants.c
        depth = math.log(1.0 / spec.tail_truncation_eps) / (2.0 * im_k)
        width = lam / (PANELS_PER_WAVELENGTH * n.real)
        if side == "left":
            edge = b[0]
            inner = [p for p in bps if p < edge]
            anchor = min([edge, *inner])
            fine_lo = anchor - 2.0 * lam / n.real
            segments.extend(_subdivide(fine_lo, edge, width, inner))
            cut = anchor - depth
            pos, w = fine_lo, width
            while pos > cut:
                nxt = max(cut, pos - w)
                segments.append((nxt, pos))
                pos, w = nxt, 2.0 * w
        else:
            edge = b[-1]
            inner = [p for p in bps if p > edge]
            anchor = max([edge, *inner])
            fine_hi = anchor + 2.0 * lam / n.real
            segments.extend(_subdivide(edge, fine_hi, width, inner))
            cut = anchor + depth
            pos, w = fine_hi, width
            while pos < cut:
                nxt = min(cut, pos + w)
                segments.append((pos, nxt))
                pos, w = nxt, 2.0 * w
    return segments


def integrate_sources(
    stack: LayerStack,
    omega: float,
    kernel,
    spec: QuadratureSpec = QuadratureSpec(),
    constants: PhysicalConstants = CONSTANTS,
    breakpoints=(),
) -> float:
    """Integral of a source kernel over the whole real line.

    ``kernel`` maps an array of source positions to an array of values and
    must vanish wherever ``Im[n^2] = 0`` (all physical source kernels carry
    the noise-current factor, which guarantees it).
    """
    if not omega > 0.0:
        raise ValueError(f"omega must be positive, got {omega}")
    segments = source_segments(stack, omega, spec, constants, breakpoints)
    if not segments:
        return 0.0
    total, _, _ = adaptive_panels(lambda xs: np.asarray(kernel(xs), dtype=float), segments, spec)
    return float(total[0])


def integrate_sources_vec(
    stack: LayerStack,
    omega: float,
    kernel_vec,
    n_components: int,
    spec: QuadratureSpec = QuadratureSpec(),
    constants: PhysicalConstants = CONSTANTS,
    breakpoints=(),
) -> np.ndarray:
    """Vector-valued source integral sharing one adaptive panel set.

    ``kernel_vec`` maps an (n,) position array to an (n_components, n) array.
    The refinement is driven by the worst component.
    """
    if not omega > 0.0:
        raise ValueError(f"omega must be positive, got {omega}")
    segments = source_segments(stack, omega, spec, constants, breakpoints)
    if not segments:
        return np.zeros(n_components)
    total, _, _ = adaptive_panels(kernel_vec, segments, spec)
    return total


def _spectrum_segments(omega_lo: float, omega_hi: float):
    if not 0.0 < omega_lo < omega_hi:
        raise ValueError(f"need 0 < omega_lo < omega_hi, got [{omega_lo}, {omega_hi}]")
    # geometric initial panels: wide bands span several decades
    n = max(1, int(math.ceil(math.log2(omega_hi / omega_lo))))
    edges = omega_lo * (omega_hi / omega_lo) ** (np.arange(n + 1) / n)
    edges[0], edges[-1] = omega_lo, omega_hi
    return list(zip(edges[:-1], edges[1:]))


def integrate_spectrum(
    f, omega_lo: float, omega_hi: float, spec: QuadratureSpec = QuadratureSpec()
) -> float:
    """Adaptive integral of a scalar function over a positive frequency band."""
    def fvec(ws):
        return np.array([f(w) for w in ws], dtype=float)

    total, _, _ = adaptive_panels(fvec, _spectrum_segments(omega_lo, omega_hi), spec)
    return float(total[0])


def integrate_spectrum_vec(
    fvec, omega_lo: float, omega_hi: float, spec: QuadratureSpec = QuadratureSpec()
) -> np.ndarray:
    """Vector-valued frequency integral; ``fvec`` maps (n,) to (ncomp, n)."""
    total, _, _ = adaptive_panels(fvec, _spectrum_segments(omega_lo, omega_hi), spec)
    return total


def build_spectrum_rule(
    f, omega_lo: float, omega_hi: float, spec: QuadratureSpec = QuadratureSpec()
):
    """Fixed collocation rule from an adaptive run against a probe integrand.

    Returns ``(nodes, weights)`` reproducing the final panel structure's
    Kronrod rule. Useful when many similar spectra must be integrated on a
    shared grid (self-consistency iterations); final results should still be
    verified with a fresh adaptive pass.
    """
    def probe(ws):
        return np.array([f(w) for w in ws], dtype=float)

    _, _, panels = adaptive_panels(probe, _spectrum_segments(omega_lo, omega_hi), spec)
    half = 0.5 * (panels[:, 1] - panels[:, 0])
    mid = 0.5 * (panels[:, 0] + panels[:, 1])
    nodes = (mid[:, None] + half[:, None] * NODES[None, :]).ravel()
    weights = (half[:, None] * KRONROD_WEIGHTS[None, :]).ravel()
    order = np.argsort(nodes)
    return nodes[order], weights[order]
