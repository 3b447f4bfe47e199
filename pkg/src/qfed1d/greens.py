"""Green's function of the 1D Helmholtz operator in layered media.

``G(x, omega, x')`` solves ``(d^2/dx^2 + omega^2 n(x)^2 / c^2) G = -delta(x - x')``
with ``G`` continuous everywhere, a unit downward jump of ``dG/dx`` at the
source, and outgoing waves in both semi-infinite media.

The construction uses one upward (``e^{+ikx}``) and one downward (``e^{-ikx}``)
plane-wave amplitude per layer, anchored to the nearest interface so that
every stored exponential has magnitude <= 1 in its layer (no overflow in
thick lossy layers). The amplitudes solve the interface continuity /
radiation-condition linear system, LU-factorized once per (geometry, omega).
Because the right-hand side depends on the source position only through two
bounded exponentials, a pair of pre-solved coefficient vectors per source
layer turns evaluation over many (x, x') pairs into outer products.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import LinAlgError, lu_factor, lu_solve

from .constants import CONSTANTS, PhysicalConstants
from .materials import LayerStack, j0_squared

__all__ = [
    "GreenComponents",
    "ScaledGreens",
    "GreenSolver",
    "green_homogeneous",
    "green_layered",
    "scaled_greens",
    "DEFAULT_LOSSLESS_REG",
]

#: Imaginary part substituted into lossless semi-infinite media so the
#: radiation condition selects decaying solutions. Results must be (and are,
#: see tests) insensitive to halving this value.
DEFAULT_LOSSLESS_REG = 1e-9


@dataclass(frozen=True)
class GreenComponents:
    """Green's function value split into its propagation directions.

    ``rightgoing``/``leftgoing`` are the parts of ``G`` at the observation
    point carrying ``e^{+ikx}`` / ``e^{-ikx}`` factors in the observation
    layer; ``total`` is exactly their sum.
    """

    total: complex
    rightgoing: complex
    leftgoing: complex

    @classmethod
    def from_parts(cls, rightgoing: complex, leftgoing: complex) -> "GreenComponents":
        return cls(rightgoing + leftgoing, rightgoing, leftgoing)


@dataclass(frozen=True)
class ScaledGreens:
    """Source-strength-weighted field kernels at one (x, omega, x') triple.

    ``g_a`` is the vector-potential kernel, ``g_e = i omega g_a`` the electric
    one, ``g_b`` the magnetic-flux kernel built from the directional parts,
    and ``g_h = g_b / mu0`` (relative permeability is 1 throughout).
    """

    g_a: complex
    g_e: complex
    g_b: complex
    g_h: complex


def _validate_omega(omega: float) -> None:
    if not omega > 0.0:
        raise ValueError(f"omega must be positive, got {omega}")


class GreenSolver:
    """Per-(stack, omega) evaluator for the layered Green's function.

    Pure after construction; evaluation methods are safe to call
    concurrently. This is the batch workhorse behind the scalar module-level
    operations and all quadratures.
    """

    def __init__(
        self,
        stack: LayerStack,
        omega: float,
        constants: PhysicalConstants = CONSTANTS,
        lossless_reg: float = DEFAULT_LOSSLESS_REG,
    ):
        _validate_omega(omega)
        self.stack = stack
        self.omega = omega
        self.constants = constants
        self.boundaries = np.asarray(stack.boundaries, dtype=float)
        ns = stack.indices(omega)
        for j in (0, len(ns) - 1):
            if ns[j].imag < lossless_reg:
                ns[j] = complex(ns[j].real, lossless_reg)
        self.indices = ns
        self.k = omega * ns / constants.c
        L = len(ns)
        self.num_layers = L
        self._n_unknowns = 2 * (L - 1)
        self._lu = self._factorize()
        self._source_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}

    # -- linear system -----------------------------------------------------

    def _factorize(self):
        L = self.num_layers
        b = self.boundaries
        k = self.k
        M = np.zeros((self._n_unknowns, self._n_unknowns), dtype=complex)
        for m in range(L - 1):
            xm = b[m]
            rv, rd = 2 * m, 2 * m + 1
            # layer m (left of the interface), contributes with + sign
            j = m
            if j > 0:
                pa = np.exp(1j * k[j] * (xm - b[j - 1]))
                M[rv, 2 * j - 1] += pa
                M[rd, 2 * j - 1] += 1j * k[j] * pa
            if j < L - 1:  # always true here; downward wave anchored at b[j] = xm
                M[rv, 2 * j] += 1.0
                M[rd, 2 * j] += -1j * k[j]
            # layer m + 1 (right of the interface), contributes with - sign
            j = m + 1
            if j > 0:  # upward wave anchored at b[j-1] = xm
                M[rv, 2 * j - 1] -= 1.0
                M[rd, 2 * j - 1] -= 1j * k[j]
            if j < L - 1:
                pb = np.exp(1j * k[j] * (b[j] - xm))
                M[rv, 2 * j] -= pb
                M[rd, 2 * j] -= -1j * k[j] * pb
        try:
            return lu_factor(M)
        except LinAlgError as exc:  # passive media should never get here
            raise RuntimeError(
                "internal error: singular interface system for the layered Green's function"
            ) from exc

    def _source_vectors(self, s: int) -> tuple[np.ndarray, np.ndarray]:
        """Coefficient responses to the two bounded source exponentials.

        The homogeneous amplitudes for a source at ``x'`` in layer ``s`` are
        ``u(x') = e1(x') U1 + e2(x') U2`` with ``e1 = e^{i k_s (x' - left edge)}``
        and ``e2 = e^{i k_s (right edge - x')}``.
        """
        cached = self._source_cache.get(s)
        if cached is not None:
            return cached
        b = self.boundaries
        ks = self.k[s]
        r1 = np.zeros(self._n_unknowns, dtype=complex)
        r2 = np.zeros(self._n_unknowns, dtype=complex)
        if s > 0:
            m = s - 1
            r1[2 * m] += 1j / (2 * ks)
            r1[2 * m + 1] += 0.5
        if s < self.num_layers - 1:
            m = s
            r2[2 * m] += -1j / (2 * ks)
            r2[2 * m + 1] += 0.5
        U1 = lu_solve(self._lu, r1)
        U2 = lu_solve(self._lu, r2)
        self._source_cache[s] = (U1, U2)
        return U1, U2

    # -- evaluation --------------------------------------------------------

    def layer_of(self, x) -> np.ndarray:
        return np.searchsorted(self.boundaries, np.asarray(x, dtype=float), side="right")

    def _source_exponentials(self, s: int, xp: np.ndarray):
        ks = self.k[s]
        b = self.boundaries
        e1 = np.exp(1j * ks * (xp - b[s - 1])) if s > 0 else np.zeros_like(xp, dtype=complex)
        e2 = (
            np.exp(1j * ks * (b[s] - xp))
            if s < self.num_layers - 1
            else np.zeros_like(xp, dtype=complex)
        )
        return e1, e2

    def batch(self, xs, xps) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Directional Green's matrices over observation x source grids.

        Returns ``(G, G_right, G_left)`` with shape ``(len(xs), len(xps))``.
        """
        xs = np.atleast_1d(np.asarray(xs, dtype=float))
        xps = np.atleast_1d(np.asarray(xps, dtype=float))
        GR = np.zeros((xs.size, xps.size), dtype=complex)
        GL = np.zeros_like(GR)
        obs_layers = self.layer_of(xs)
        src_layers = self.layer_of(xps)
        b = self.boundaries
        last = self.num_layers - 1
        for s in np.unique(src_layers):
            cols = np.nonzero(src_layers == s)[0]
            e1, e2 = self._source_exponentials(s, xps[cols])
            U1, U2 = self._source_vectors(s)
            for o in np.unique(obs_layers):
                rows = np.nonzero(obs_layers == o)[0]
                x = xs[rows]
                ko = self.k[o]
                if o > 0:
                    amp = e1 * U1[2 * o - 1] + e2 * U2[2 * o - 1]
                    GR[np.ix_(rows, cols)] += np.outer(np.exp(1j * ko * (x - b[o - 1])), amp)
                if o < last:
                    amp = e1 * U1[2 * o] + e2 * U2[2 * o]
                    GL[np.ix_(rows, cols)] += np.outer(np.exp(-1j * ko * (x - b[o])), amp)
                if o == s:
                    dx = x[:, None] - xps[cols][None, :]
                    gp = 1j * np.exp(1j * ko * np.abs(dx)) / (2 * ko)
                    sign = np.sign(dx)
                    blk = np.ix_(rows, cols)
                    GR[blk] += gp * (0.5 * (1.0 + sign))
                    GL[blk] += gp * (0.5 * (1.0 - sign))
        return GR + GL, GR, GL

    def coincident(self, xs) -> np.ndarray:
        """Vector of ``G(x, x)`` values (source and observation coincide)."""
        xs = np.atleast_1d(np.asarray(xs, dtype=float))
        out = np.empty(xs.size, dtype=complex)
        layers = self.layer_of(xs)
        b = self.boundaries
        last = self.num_layers - 1
        for o in np.unique(layers):
            sel = np.nonzero(layers == o)[0]
            x = xs[sel]
            ko = self.k[o]
            e1, e2 = self._source_exponentials(o, x)
            U1, U2 = self._source_vectors(o)
            g = np.full(x.size, 1j / (2 * ko), dtype=complex)
            if o > 0:
                amp = e1 * U1[2 * o - 1] + e2 * U2[2 * o - 1]
                g += amp * np.exp(1j * ko * (x - b[o - 1]))
            if o < last:
                amp = e1 * U1[2 * o] + e2 * U2[2 * o]
                g += amp * np.exp(-1j * ko * (x - b[o]))
            out[sel] = g
        return out

    def components(self, x: float, xprime: float) -> GreenComponents:
        _, gr, gl = self.batch([x], [xprime])
        return GreenComponents.from_parts(complex(gr[0, 0]), complex(gl[0, 0]))

    def field_in_layer(self, j: int, x: float, xprime: float) -> complex:
        """Green's function evaluated with the layer-``j`` representation.

        Intended for boundary-limit checks: at an interface the adjacent
        representations must agree.
        """
        e1, e2 = self._source_exponentials(
            (s := int(self.layer_of(xprime))), np.asarray([xprime], dtype=float)
        )
        U1, U2 = self._source_vectors(s)
        b = self.boundaries
        kj = self.k[j]
        g = 0.0 + 0.0j
        if j > 0:
            g += (e1[0] * U1[2 * j - 1] + e2[0] * U2[2 * j - 1]) * np.exp(
                1j * kj * (x - b[j - 1])
            )
        if j < self.num_layers - 1:
            g += (e1[0] * U1[2 * j] + e2[0] * U2[2 * j]) * np.exp(-1j * kj * (x - b[j]))
        if j == s:
            g += 1j * np.exp(1j * kj * abs(x - xprime)) / (2 * kj)
        return complex(g)


@lru_cache(maxsize=128)
def _cached_solver(
    stack: LayerStack, omega: float, constants: PhysicalConstants, lossless_reg: float
) -> GreenSolver:
    return GreenSolver(stack, omega, constants, lossless_reg)


def solver_for(
    stack: LayerStack,
    omega: float,
    constants: PhysicalConstants = CONSTANTS,
    lossless_reg: float = DEFAULT_LOSSLESS_REG,
) -> GreenSolver:
    """Shared, memoized :class:`GreenSolver` for scalar convenience calls."""
    return _cached_solver(stack, omega, constants, lossless_reg)


def green_homogeneous(
    n: complex, omega: float, x: float, xprime: float, constants: PhysicalConstants = CONSTANTS
) -> GreenComponents:
    """Closed-form Green's function of an unbounded homogeneous medium.

    ``G = i e^{i k |x - x'|} / (2 k)`` with ``k = omega n / c``. The single
    term is rightgoing for ``x > x'``, leftgoing for ``x < x'``, and split
    evenly at coincidence.
    """
    _validate_omega(omega)
    n = complex(n)
    if not (n.real > 0.0) or n.imag < 0.0:
        raise ValueError(f"require Re(n) > 0 and Im(n) >= 0, got {n}")
    k = omega * n / constants.c
    g = 1j * np.exp(1j * k * abs(x - xprime)) / (2 * k)
    if x > xprime:
        return GreenComponents.from_parts(g, 0.0)
    if x < xprime:
        return GreenComponents.from_parts(0.0, g)
    return GreenComponents.from_parts(g / 2, g / 2)


def green_layered(
    stack: LayerStack,
    omega: float,
    x: float,
    xprime: float,
    constants: PhysicalConstants = CONSTANTS,
    lossless_reg: float = DEFAULT_LOSSLESS_REG,
) -> GreenComponents:
    """Layered-media Green's function with its directional decomposition."""
    return solver_for(stack, omega, constants, lossless_reg).components(x, xprime)


def scaled_greens(
    stack: LayerStack,
    omega: float,
    x: float,
    xprime: float,
    constants: PhysicalConstants = CONSTANTS,
    lossless_reg: float = DEFAULT_LOSSLESS_REG,
) -> ScaledGreens:
    """Field kernels carrying the thermal source strength at ``x'``.

    All four kernels vanish identically when the source sits in a lossless
    region (zero noise-current scaling).
    """
    solver = solver_for(stack, omega, constants, lossless_reg)
    j0 = math.sqrt(j0_squared(stack, xprime, omega, constants))
    comps = solver.components(x, xprime)
    mu0 = constants.mu0
    g_a = mu0 * j0 * comps.total
    g_e = 1j * omega * g_a
    k_obs = solver.k[int(solver.layer_of(x))]
    g_b = 1j * mu0 * k_obs * j0 * (comps.rightgoing - comps.leftgoing)
    return ScaledGreens(g_a=g_a, g_e=g_e, g_b=g_b, g_h=g_b / mu0)
