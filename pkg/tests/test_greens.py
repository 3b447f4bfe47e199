"""Layered Green's function: closed forms, defining PDE, symmetries."""

import numpy as np
import pytest

from qfed1d import (
    CONSTANTS,
    GreenSolver,
    Layer,
    LayerStack,
    Material,
    green_homogeneous,
    green_layered,
    scaled_greens,
)
from helpers import omega_of, random_lossy_stack, vacuum_cavity_stack


def homogeneous_stack(n: complex) -> LayerStack:
    m = Material.constant(n)
    return LayerStack(m, 300.0, (), m, 300.0)


class TestHomogeneous:
    def test_vacuum_coincidence_imaginary_part(self):
        w = omega_of(0.1)
        g = green_homogeneous(1.0, w, 3e-6, 3e-6)
        assert g.total.imag == pytest.approx(CONSTANTS.c / (2 * w), rel=1e-14)

    def test_reciprocity(self):
        rng = np.random.default_rng(7)
        w = omega_of(0.08)
        for _ in range(20):
            x, xp = rng.uniform(-20e-6, 20e-6, 2)
            a = green_homogeneous(1.7 + 0.2j, w, x, xp).total
            b = green_homogeneous(1.7 + 0.2j, w, xp, x).total
            assert a == b

    def test_lossy_modulus_decay(self):
        n = 2.0 + 0.4j
        w = omega_of(0.15)
        rng = np.random.default_rng(3)
        for _ in range(10):
            x, xp = rng.uniform(-5e-6, 5e-6, 2)
            got = abs(green_homogeneous(n, w, x, xp).total)
            want = (
                CONSTANTS.c
                / (2 * w * abs(n))
                * np.exp(-w * n.imag * abs(x - xp) / CONSTANTS.c)
            )
            assert got == pytest.approx(want, rel=1e-12)

    def test_directional_assignment(self):
        w = omega_of(0.1)
        assert green_homogeneous(1.0, w, 2e-6, 1e-6).leftgoing == 0.0
        assert green_homogeneous(1.0, w, 1e-6, 2e-6).rightgoing == 0.0
        g = green_homogeneous(1.0, w, 1e-6, 1e-6)
        assert g.rightgoing == g.leftgoing == g.total / 2

    def test_rejects_nonpositive_omega(self):
        with pytest.raises(ValueError):
            green_homogeneous(1.0, -1.0, 0.0, 0.0)
        with pytest.raises(ValueError):
            green_layered(vacuum_cavity_stack(), 0.0, 0.0, 1e-6)


class TestLayered:
    def test_identical_lossy_layers_match_closed_form(self):
        n = 1.8 + 0.25j
        m = Material.constant(n)
        stack = LayerStack(m, 300.0, (Layer(m, 4e-6, 300.0),), m, 300.0)
        w = omega_of(0.12)
        rng = np.random.default_rng(11)
        for _ in range(15):
            x, xp = rng.uniform(-6e-6, 10e-6, 2)
            got = green_layered(stack, w, x, xp).total
            want = green_homogeneous(n, w, x, xp).total
            assert got == pytest.approx(want, rel=1e-12)

    def test_total_is_exact_sum_of_directions(self):
        stack = vacuum_cavity_stack()
        w = omega_of(0.118)
        rng = np.random.default_rng(5)
        for _ in range(20):
            x, xp = rng.uniform(-10e-6, 20e-6, 2)
            g = green_layered(stack, w, x, xp)
            assert g.total == g.rightgoing + g.leftgoing

    def test_reciprocity_on_random_lossy_stacks(self):
        rng = np.random.default_rng(42)
        for _ in range(8):
            stack = random_lossy_stack(rng)
            w = omega_of(float(rng.uniform(0.03, 0.25)))
            span = stack.boundaries[-1] - stack.boundaries[0] + 10e-6
            for _ in range(5):
                x, xp = rng.uniform(-span, stack.boundaries[-1] + span, 2)
                a = green_layered(stack, w, x, xp).total
                b = green_layered(stack, w, xp, x).total
                assert a == pytest.approx(b, rel=1e-10)

    def test_continuity_across_interfaces(self):
        rng = np.random.default_rng(9)
        for _ in range(5):
            stack = random_lossy_stack(rng)
            w = omega_of(0.1)
            solver = GreenSolver(stack, w)
            xp = float(rng.uniform(-2e-6, stack.boundaries[-1] + 2e-6))
            for m, b in enumerate(stack.boundaries):
                left = solver.field_in_layer(m, b, xp)
                right = solver.field_in_layer(m + 1, b, xp)
                assert left == pytest.approx(right, rel=1e-10)

    def test_continuity_at_source_point(self):
        stack = vacuum_cavity_stack()
        w = omega_of(0.118)
        for xp in (-3e-6, 4e-6, 13e-6):
            delta = 1e-12 * CONSTANTS.c / w  # k * delta ~ 1e-12
            g0 = green_layered(stack, w, xp, xp).total
            for x in (xp - delta, xp + delta):
                assert green_layered(stack, w, x, xp).total == pytest.approx(g0, rel=1e-10)

    def test_radiation_conditions(self):
        stack = vacuum_cavity_stack()
        w = omega_of(0.09)
        # observation deep left, source to the right: nothing travels right
        g = green_layered(stack, w, -4e-6, 5e-6)
        assert g.rightgoing == 0.0
        assert g.leftgoing != 0.0
        # mirror statement on the right
        g = green_layered(stack, w, 15e-6, 5e-6)
        assert g.leftgoing == 0.0
        assert g.rightgoing != 0.0

    def test_defining_pde_by_central_differences(self):
        stack = vacuum_cavity_stack()
        w = omega_of(0.118)
        lam = 2 * np.pi * CONSTANTS.c / w
        h = lam / 2000.0
        xp = 2e-6
        for x, n in ((-2.5e-6, 1.5 + 0.3j), (6.5e-6, 1.0 + 0.0j), (13e-6, 2.5 + 0.5j)):
            g = lambda xx: green_layered(stack, w, xx, xp).total  # noqa: E731
            second = (g(x + h) - 2 * g(x) + g(x - h)) / h**2
            k2 = (w * n / CONSTANTS.c) ** 2
            assert second == pytest.approx(-k2 * g(x), rel=1e-4)

    def test_second_resonance_peak_at_quarter_gap(self):
        # standing-wave antinode of the second cavity resonance sits at 2.5 um
        stack = vacuum_cavity_stack()
        energies = np.arange(0.100, 0.136, 0.00025)
        vals = [green_layered(stack, omega_of(e), 2.5e-6, 2.5e-6).total.imag for e in energies]
        peak = energies[int(np.argmax(vals))]
        assert abs(peak - 0.118) <= 0.002

    def test_lossless_regularizer_insensitivity(self):
        # all-lossless stack: halving the substitute absorption must not matter
        stack = homogeneous_stack(2.0)
        w = omega_of(0.1)
        a = green_layered(stack, w, 1e-6, 3e-6, lossless_reg=1e-9).total
        b = green_layered(stack, w, 1e-6, 3e-6, lossless_reg=5e-10).total
        assert a == pytest.approx(b, rel=1e-8)
        g0 = green_layered(stack, w, 1e-6, 1e-6).total
        assert g0.imag == pytest.approx(CONSTANTS.c / (2 * w * 2.0), rel=1e-9)


class TestScaledGreens:
    def test_vacuum_source_gives_zero_kernels(self):
        sg = scaled_greens(vacuum_cavity_stack(), omega_of(0.1), -2e-6, 5e-6)
        assert sg.g_a == sg.g_e == sg.g_b == sg.g_h == 0.0

    def test_electric_kernel_is_i_omega_times_vector_potential(self):
        w = omega_of(0.13)
        rng = np.random.default_rng(21)
        for _ in range(10):
            x = float(rng.uniform(-8e-6, 18e-6))
            xp = float(rng.uniform(-8e-6, 0.0))  # lossy left medium
            sg = scaled_greens(vacuum_cavity_stack(), w, x, xp)
            assert sg.g_e == 1j * w * sg.g_a
            assert sg.g_h == sg.g_b / CONSTANTS.mu0

    def test_magnetic_to_electric_ratio_in_homogeneous_medium(self):
        # far from the source only one direction survives: |g_b/g_e| = |n|/c
        n = 1.6 + 0.3j
        stack = homogeneous_stack(n)
        w = omega_of(0.1)
        sg = scaled_greens(stack, w, 6e-6, -1e-6)
        assert abs(sg.g_b / sg.g_e) * CONSTANTS.c == pytest.approx(abs(n), rel=1e-12)
