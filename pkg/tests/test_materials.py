"""Materials, geometry resolution, and the noise-current scale."""

import math

import numpy as np
import pytest

from qfed1d import (
    CONSTANTS,
    CellTemperatures,
    Layer,
    LayerStack,
    Material,
    PhysicalConstants,
    SpectralGrid,
    j0_squared,
    n_at,
    temperature_at,
    temperatures_at,
)
from helpers import lossy_cavity_stack, omega_of, vacuum_cavity_stack


class TestConstants:
    def test_em_identity(self):
        c = CONSTANTS
        assert abs(c.c**2 * c.eps0 * c.mu0 - 1.0) < 1e-12

    def test_all_positive(self):
        c = CONSTANTS
        assert min(c.hbar, c.k_B, c.c, c.eps0, c.mu0, c.S) > 0.0

    def test_default_quantization_area(self):
        assert CONSTANTS.S == 1.0

    def test_inconsistent_constants_rejected(self):
        with pytest.raises(ValueError):
            PhysicalConstants(mu0=1.3e-6)

    def test_ev_roundtrip(self):
        w = CONSTANTS.omega_from_ev(0.118)
        assert CONSTANTS.ev_from_omega(w) == pytest.approx(0.118, rel=1e-15)


class TestMaterial:
    def test_constant_index(self):
        m = Material.constant(1.5 + 0.3j)
        assert m.index(1e14) == 1.5 + 0.3j
        assert m.permittivity(1e14) == (1.5 + 0.3j) ** 2

    def test_gain_rejected(self):
        with pytest.raises(ValueError):
            Material.constant(1.5 - 0.1j)

    def test_nonpositive_re_rejected(self):
        with pytest.raises(ValueError):
            Material.constant(-1.0 + 0.1j)

    def test_tabulated_interpolation(self):
        m = Material.tabulated([1e14, 2e14], [1.0 + 0.1j, 2.0 + 0.3j])
        assert m.index(1.5e14) == pytest.approx(1.5 + 0.2j)
        assert m.index(1e14) == 1.0 + 0.1j
        with pytest.raises(ValueError):
            m.index(5e13)


class TestLayerStack:
    def test_interfaces_from_thicknesses(self):
        stack = lossy_cavity_stack()
        assert stack.boundaries == (0.0, 10e-6)

    def test_negative_thickness_rejected(self):
        with pytest.raises(ValueError):
            Layer(Material.constant(1.0), -1e-6, 300.0)

    def test_nonpositive_temperature_rejected(self):
        with pytest.raises(ValueError):
            vacuum_cavity_stack(t_left=0.0)

    def test_layer_at_is_total_and_right_owned(self):
        stack = vacuum_cavity_stack()
        assert stack.layer_index(-1e-9) == 0
        assert stack.layer_index(0.0) == 1  # interface belongs to the right layer
        assert stack.layer_index(10e-6) == 2
        assert stack.layer_index(5e-6) == 1

    def test_left_right_limits_bracket_each_interface(self):
        stack = lossy_cavity_stack()
        for b in stack.boundaries:
            assert stack.layer_index(b) == stack.layer_index(b - 1e-12) + 1


class TestResolution:
    def test_gap_is_vacuum(self):
        assert n_at(vacuum_cavity_stack(), 5e-6, omega_of(0.1)) == 1.0 + 0.0j

    def test_left_medium_index(self):
        assert n_at(vacuum_cavity_stack(), -5e-6, omega_of(0.1)) == 1.5 + 0.3j

    def test_lossy_cavity_index(self):
        assert n_at(lossy_cavity_stack(), 5e-6, omega_of(0.1)) == 1.1 + 0.1j

    def test_omega_must_be_positive(self):
        with pytest.raises(ValueError):
            n_at(vacuum_cavity_stack(), 0.0, -1.0)

    def test_reservoir_temperatures(self):
        stack = vacuum_cavity_stack()
        assert temperature_at(stack, -1e-6) == 400.0
        assert temperature_at(stack, 11e-6) == 300.0

    def test_uniform_temperature(self):
        stack = vacuum_cavity_stack(t_left=350.0, t_right=350.0)
        stack = LayerStack(
            stack.left_material,
            350.0,
            (Layer(stack.layers[0].material, 10e-6, 350.0),),
            stack.right_material,
            350.0,
        )
        for x in (-20e-6, 0.0, 3e-6, 10e-6, 40e-6):
            assert temperature_at(stack, x) == 350.0

    def test_cell_profile_lookup(self):
        cells = CellTemperatures((0.0, 4e-6, 10e-6), (310.0, 340.0))
        stack = vacuum_cavity_stack().with_layer_temperature(1, cells)
        assert temperature_at(stack, 1e-6) == 310.0
        assert temperature_at(stack, 7e-6) == 340.0
        xs = np.array([-1e-6, 1e-6, 5e-6, 12e-6])
        np.testing.assert_allclose(temperatures_at(stack, xs), [400.0, 310.0, 340.0, 300.0])


class TestNoiseCurrentScale:
    def test_vacuum_is_exactly_zero(self):
        assert j0_squared(vacuum_cavity_stack(), 5e-6, omega_of(0.1)) == 0.0

    def test_algebraic_value(self):
        # Im[n^2] = 2 Re(n) Im(n) = 0.9 for n = 1.5 + 0.3i
        w = omega_of(0.1)
        got = j0_squared(vacuum_cavity_stack(), -5e-6, w)
        want = 4 * math.pi * CONSTANTS.hbar * w**2 * CONSTANTS.eps0 * 0.9 / CONSTANTS.S
        assert got == pytest.approx(want, rel=1e-15)

    def test_quadratic_frequency_scaling(self):
        w = omega_of(0.05)
        stack = vacuum_cavity_stack()
        assert j0_squared(stack, -5e-6, 2 * w) == pytest.approx(
            4 * j0_squared(stack, -5e-6, w), rel=1e-12
        )

    def test_nonnegative_everywhere(self):
        stack = lossy_cavity_stack()
        w = omega_of(0.118)
        for x in np.linspace(-5e-6, 15e-6, 23):
            n = n_at(stack, x, w)
            assert (n * n).imag >= 0.0
            assert j0_squared(stack, x, w) >= 0.0


class TestSpectralGrid:
    def test_valid(self):
        g = SpectralGrid((0.0, 1e-6), (0.01, 0.02))
        assert g.shape == (2, 2)

    def test_zero_energy_rejected(self):
        with pytest.raises(ValueError):
            SpectralGrid((0.0,), (0.0, 0.1))

    def test_non_monotone_rejected(self):
        with pytest.raises(ValueError):
            SpectralGrid((0.0, 0.0), (0.01,))
        with pytest.raises(ValueError):
            SpectralGrid((0.0,), (0.02, 0.01))
