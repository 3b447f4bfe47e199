"""Materials, layered geometry, reservoir temperatures.

A :class:`LayerStack` is a semi-infinite left medium, zero or more finite
interior layers, and a semi-infinite right medium. Interface positions are
derived from the interior thicknesses with the first interface at ``x = 0``.
Every position on the real line belongs to exactly one layer; a point exactly
on an interface belongs to the layer on its right.

All types are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field

import numpy as np

from .constants import CONSTANTS, PhysicalConstants

__all__ = [
    "Material",
    "CellTemperatures",
    "Layer",
    "LayerStack",
    "SpectralGrid",
    "n_at",
    "temperature_at",
    "temperatures_at",
    "j0_squared",
]


@dataclass(frozen=True)
class Material:
    """Passive optical medium described by its complex refractive index.

    The index is either a frequency-independent constant or a table of
    ``(omega, n)`` samples interpolated linearly in angular frequency.
    Relative permittivity is ``n^2``; relative permeability is 1 for every
    material handled here (no magnetic media).
    """

    n: complex | None = None
    table: tuple[tuple[float, complex], ...] | None = None

    def __post_init__(self) -> None:
        if (self.n is None) == (self.table is None):
            raise ValueError("Material requires exactly one of a constant index or a table")
        if self.n is not None:
            _check_index(complex(self.n))
            object.__setattr__(self, "n", complex(self.n))
        else:
            tab = tuple((float(w), complex(nv)) for w, nv in self.table)
            if len(tab) < 2:
                raise ValueError("index table needs at least two samples")
            omegas = [w for w, _ in tab]
            if any(b <= a for a, b in zip(omegas, omegas[1:])):
                raise ValueError("index table frequencies must be strictly increasing")
            for _, nv in tab:
                _check_index(nv)
            object.__setattr__(self, "table", tab)

    @classmethod
    def constant(cls, n: complex) -> "Material":
        return cls(n=complex(n))

    @classmethod
    def tabulated(cls, omegas, ns) -> "Material":
        return cls(table=tuple(zip(map(float, omegas), map(complex, ns))))

    def index(self, omega: float) -> complex:
        """Refractive index at angular frequency ``omega`` (rad/s)."""
        if self.n is not None:
            return self.n
        omegas = [w for w, _ in self.table]
        if not omegas[0] <= omega <= omegas[-1]:
            raise ValueError(
                f"omega {omega:.6e} outside tabulated range "
                f"[{omegas[0]:.6e}, {omegas[-1]:.6e}]"
            )
        i = min(bisect_right(omegas, omega), len(omegas) - 1)
        w0, n0 = self.table[i - 1]
        w1, n1 = self.table[i]
        t = (omega - w0) / (w1 - w0)
        return n0 + t * (n1 - n0)

    def permittivity(self, omega: float) -> complex:
        n = self.index(omega)
        return n * n

    def is_lossy(self, omega: float) -> bool:
        return self.index(omega).imag > 0.0


def _check_index(n: complex) -> None:
    if not (n.real > 0.0):
        raise ValueError(f"refractive index must have Re(n) > 0, got {n}")
    if n.imag < 0.0:
        raise ValueError(f"gain media (Im(n) < 0) are not supported, got {n}")


@dataclass(frozen=True)
class CellTemperatures:
    """Piecewise-constant temperature profile inside one interior layer.

    ``edges`` are offsets from the layer's left interface, spanning the full
    layer thickness; ``values`` holds one temperature per cell.
    """

    edges: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        edges = tuple(float(e) for e in self.edges)
        values = tuple(float(v) for v in self.values)
        if len(edges) != len(values) + 1:
            raise ValueError("need exactly one more edge than cell value")
        if any(b <= a for a, b in zip(edges, edges[1:])):
            raise ValueError("cell edges must be strictly increasing")
        if edges[0] != 0.0:
            raise ValueError("first cell edge must be 0 (layer-local offset)")
        _check_temps(values)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "values", values)

    def at(self, offset: float) -> float:
        i = bisect_right(self.edges, offset) - 1
        return self.values[min(max(i, 0), len(self.values) - 1)]


def _check_temps(values) -> None:
    for v in values:
        if not (v > 0.0) or math.isnan(v):
            raise ValueError(f"temperatures must be strictly positive, got {v}")


@dataclass(frozen=True)
class Layer:
    """Finite interior layer: material, thickness (m), reservoir temperature."""

    material: Material
    thickness: float
    temperature: float | CellTemperatures

    def __post_init__(self) -> None:
        if not (self.thickness > 0.0):
            raise ValueError(f"layer thickness must be strictly positive, got {self.thickness}")
        if isinstance(self.temperature, CellTemperatures):
            if abs(self.temperature.edges[-1] - self.thickness) > 1e-12 * self.thickness:
                raise ValueError("cell profile must span the full layer thickness")
        else:
            _check_temps((self.temperature,))
            object.__setattr__(self, "temperature", float(self.temperature))


@dataclass(frozen=True)
class LayerStack:
    """1D layered geometry with reservoir temperatures.

    ``left``/``right`` are the semi-infinite media; ``layers`` the finite
    interior ones, ordered from left to right. The first interface sits at
    ``x = 0`` and the remaining interface positions follow from the
    thicknesses.
    """

    left_material: Material
    left_temperature: float
    layers: tuple[Layer, ...]
    right_material: Material
    right_temperature: float
    boundaries: tuple[float, ...] = field(init=False, compare=False)

    def __post_init__(self) -> None:
        _check_temps((self.left_temperature, self.right_temperature))
        object.__setattr__(self, "layers", tuple(self.layers))
        b = [0.0]
        for layer in self.layers:
            b.append(b[-1] + layer.thickness)
        object.__setattr__(self, "boundaries", tuple(b))

    @property
    def num_layers(self) -> int:
        return len(self.layers) + 2

    def layer_index(self, x: float) -> int:
        """Index of the layer containing ``x`` (interface points go right)."""
        return bisect_right(self.boundaries, x)

    def material(self, j: int) -> Material:
        if j == 0:
            return self.left_material
        if j == self.num_layers - 1:
            return self.right_material
        return self.layers[j - 1].material

    def index_of_layer(self, j: int, omega: float) -> complex:
        return self.material(j).index(omega)

    def temperature_of_layer(self, j: int, x: float) -> float:
        if j == 0:
            return self.left_temperature
        if j == self.num_layers - 1:
            return self.right_temperature
        t = self.layers[j - 1].temperature
        if isinstance(t, CellTemperatures):
            return t.at(x - self.boundaries[j - 1])
        return t

    def indices(self, omega: float) -> np.ndarray:
        """Refractive index of every layer at ``omega`` as a complex array."""
        return np.array(
            [self.index_of_layer(j, omega) for j in range(self.num_layers)], dtype=complex
        )

    def with_layer_temperature(self, j: int, temperature) -> "LayerStack":
        """Copy of the stack with interior layer ``j`` at a new temperature.

        ``j`` is the stack-wide layer index (1 .. number of interior layers);
        ``temperature`` may be a float or a :class:`CellTemperatures`.
        """
        if not 1 <= j <= len(self.layers):
            raise ValueError(f"layer index {j} is not an interior layer")
        old = self.layers[j - 1]
        new = Layer(old.material, old.thickness, temperature)
        layers = self.layers[: j - 1] + (new,) + self.layers[j:]
        return LayerStack(
            self.left_material,
            self.left_temperature,
            layers,
            self.right_material,
            self.right_temperature,
        )


def n_at(stack: LayerStack, x: float, omega: float) -> complex:
    """Refractive index of the layer containing ``x``, evaluated at ``omega``."""
    if not omega > 0.0:
        raise ValueError(f"omega must be positive, got {omega}")
    return stack.index_of_layer(stack.layer_index(x), omega)


def temperature_at(stack: LayerStack, x: float) -> float:
    """Reservoir temperature (K) at position ``x``.

    Interior layers carrying a per-cell profile are resolved piecewise
    constantly over their cells.
    """
    return stack.temperature_of_layer(stack.layer_index(x), x)


def temperatures_at(stack: LayerStack, xs) -> np.ndarray:
    """Vectorized :func:`temperature_at` over an array of positions."""
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    out = np.empty(xs.shape)
    layers = np.searchsorted(stack.boundaries, xs, side="right")
    last = stack.num_layers - 1
    for j in np.unique(layers):
        sel = layers == j
        if j == 0:
            out[sel] = stack.left_temperature
        elif j == last:
            out[sel] = stack.right_temperature
        else:
            t = stack.layers[j - 1].temperature
            if isinstance(t, CellTemperatures):
                offs = xs[sel] - stack.boundaries[j - 1]
                idx = np.clip(
                    np.searchsorted(t.edges, offs, side="right") - 1, 0, len(t.values) - 1
                )
                out[sel] = np.asarray(t.values)[idx]
            else:
                out[sel] = t
    return out


def j0_squared(
    stack: LayerStack, x: float, omega: float, constants: PhysicalConstants = CONSTANTS
) -> float:
    """Squared scaling factor of the thermal noise current at ``(x, omega)``.

    Equals ``4 pi hbar omega^2 eps0 Im[n^2] / S`` and is exactly zero in
    lossless regions, which makes such regions drop out of all source
    integrals.
    """
    if not omega > 0.0:
        raise ValueError(f"omega must be positive, got {omega}")
    n = n_at(stack, x, omega)
    im_eps = (n * n).imag
    if im_eps == 0.0:
        return 0.0
    return 4.0 * math.pi * constants.hbar * omega**2 * constants.eps0 * im_eps / constants.S


@dataclass(frozen=True)
class SpectralGrid:
    """Shared (position x photon energy) evaluation lattice.

    Positions in metres, photon energies in eV; both strictly increasing and
    energies strictly positive (the Bose-Einstein occupation diverges at 0).
    """

    positions: tuple[float, ...]
    energies_ev: tuple[float, ...]

    def __post_init__(self) -> None:
        pos = tuple(float(x) for x in self.positions)
        en = tuple(float(e) for e in self.energies_ev)
        if not pos or not en:
            raise ValueError("grid axes must be non-empty")
        if any(b <= a for a, b in zip(pos, pos[1:])):
            raise ValueError("grid positions must be strictly increasing")
        if any(b <= a for a, b in zip(en, en[1:])):
            raise ValueError("grid energies must be strictly increasing")
        if en[0] <= 0.0:
            raise ValueError("grid energies must be strictly positive")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "energies_ev", en)

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.positions), len(self.energies_ev))
