"""Shared geometries and generators for the test suite."""

import numpy as np

from qfed1d import CONSTANTS, Layer, LayerStack, Material

GAP = 10e-6


def omega_of(energy_ev: float) -> float:
    return CONSTANTS.omega_from_ev(energy_ev)


def vacuum_cavity_stack(t_left=400.0, t_right=300.0) -> LayerStack:
    """Two lossy half-spaces around a 10 um vacuum gap."""
    return LayerStack(
        Material.constant(1.5 + 0.3j),
        t_left,
        (Layer(Material.constant(1.0), GAP, 300.0),),
        Material.constant(2.5 + 0.5j),
        t_right,
    )


def lossy_cavity_stack(t_left=400.0, t_right=300.0, t_cavity=350.0) -> LayerStack:
    """Same half-spaces around a lossy 10 um cavity layer."""
    return LayerStack(
        Material.constant(1.5 + 0.3j),
        t_left,
        (Layer(Material.constant(1.1 + 0.1j), GAP, t_cavity),),
        Material.constant(2.5 + 0.5j),
        t_right,
    )


def random_lossy_stack(rng: np.random.Generator, max_interior: int = 3) -> LayerStack:
    """Random stack with every layer lossy (Im n in [0.05, 0.6])."""

    def material() -> Material:
        return Material.constant(
            complex(1.0 + 2.0 * rng.random(), 0.05 + 0.55 * rng.random())
        )

    n_interior = int(rng.integers(0, max_interior + 1))
    layers = tuple(
        Layer(material(), float(10.0 ** rng.uniform(-0.3, 0.8)) * 1e-6, 250.0 + 200.0 * rng.random())
        for _ in range(n_interior)
    )
    return LayerStack(material(), 400.0, layers, material(), 300.0)
