"""Observables: LDOS, occupations, temperatures, flux, net emission."""

import math

import numpy as np
import pytest

from qfed1d import (
    CONSTANTS,
    DegenerateLDOSError,
    Layer,
    LayerStack,
    Material,
    QuadratureSpec,
    SpectralGrid,
    bose_einstein,
    effective_temperature,
    field_map,
    ldos,
    net_emission,
    photon_number,
    poynting_spectral,
)
from qfed1d import observables
from qfed1d.observables import (
    local_maxima,
    net_emission_profile,
    photon_number_profile,
    poynting_profile,
)
from helpers import omega_of, vacuum_cavity_stack

LDOS_UNIT = 2.0 / (math.pi * CONSTANTS.c * CONSTANTS.S)


def homogeneous(n):
    m = Material.constant(n)
    return LayerStack(m, 300.0, (), m, 300.0)


class TestLdos:
    def test_vacuum_value(self):
        got = ldos(homogeneous(1.0), 2e-6, omega_of(0.1))
        assert got / LDOS_UNIT == pytest.approx(0.5, rel=1e-10)

    def test_real_index_value(self):
        for n in (1.5, 2.0, 3.0):
            got = ldos(homogeneous(n), 2e-6, omega_of(0.1))
            assert got / LDOS_UNIT == pytest.approx(1.0 / (2.0 * n), rel=1e-6)

    def test_real_index_insensitive_to_regularizer(self):
        a = ldos(homogeneous(2.0), 2e-6, omega_of(0.1), lossless_reg=1e-9)
        b = ldos(homogeneous(2.0), 2e-6, omega_of(0.1), lossless_reg=5e-10)
        assert a == pytest.approx(b, rel=1e-9)

    @pytest.mark.parametrize(
        "energy_ev,n_peaks", [(0.056, 1), (0.118, 2), (0.180, 3)]
    )
    def test_cavity_spatial_peak_counts(self, energy_ev, n_peaks):
        stack = vacuum_cavity_stack()
        w = omega_of(energy_ev)
        xs = np.linspace(0.2e-6, 9.8e-6, 385)
        vals = observables.ldos_profile(stack, xs, w)
        assert len(local_maxima(vals)) == n_peaks

    def test_positivity_across_structure(self):
        stack = vacuum_cavity_stack()
        for e in (0.03, 0.118, 0.22):
            vals = observables.ldos_profile(
                stack, np.linspace(-8e-6, 18e-6, 53), omega_of(e)
            )
            assert np.all(vals >= 0.0)


class TestBoseEinstein:
    def test_ln2_point_is_exactly_one(self):
        T = 300.0
        w = CONSTANTS.k_B * T * math.log(2.0) / CONSTANTS.hbar
        assert bose_einstein(T, w) == pytest.approx(1.0, rel=1e-12)

    def test_unit_exponent(self):
        T = 300.0
        w = CONSTANTS.k_B * T / CONSTANTS.hbar
        assert bose_einstein(T, w) == pytest.approx(1.0 / (math.e - 1.0), rel=1e-12)

    def test_asymptotic_tail(self):
        T = 300.0
        for expo in (5.0, 20.0, 80.0):
            w = expo * CONSTANTS.k_B * T / CONSTANTS.hbar
            assert bose_einstein(T, w) == pytest.approx(math.exp(-expo), rel=1e-2)

    def test_overflow_safe(self):
        T = 1.0
        w = 800.0 * CONSTANTS.k_B * T / CONSTANTS.hbar
        val = bose_einstein(T, w)
        assert 0.0 <= val < 1e-300

    def test_rejects_invalid_arguments(self):
        with pytest.raises(ValueError):
            bose_einstein(-1.0, 1e14)
        with pytest.raises(ValueError):
            bose_einstein(300.0, 0.0)


class TestEffectiveTemperature:
    def test_unit_occupation(self):
        w = omega_of(0.1)
        want = CONSTANTS.hbar * w / (CONSTANTS.k_B * math.log(2.0))
        assert effective_temperature(1.0, w) == pytest.approx(want, rel=1e-14)

    def test_roundtrip_inverse_of_bose(self):
        # keep hbar*omega/(k_B T) below ~700 so the occupation stays representable
        for T, e in (
            (5.0, 0.01),
            (5.0, 0.1),
            (300.0, 0.01),
            (300.0, 0.118),
            (300.0, 0.4),
            (1200.0, 0.118),
            (1200.0, 0.4),
        ):
            w = omega_of(e)
            assert effective_temperature(bose_einstein(T, w), w) == pytest.approx(
                T, rel=1e-12
            )

    def test_strictly_increasing_and_vanishing_limit(self):
        # T falls off only logarithmically in the occupation: the smallest
        # normal double reaches ~1.7 K at 0.1 eV
        w = omega_of(0.1)
        ns = np.logspace(-290, 2, 60)
        Ts = effective_temperature(ns, w)
        assert np.all(np.diff(Ts) > 0.0)
        assert Ts[0] < 2.0

    def test_rejects_nonpositive_occupation(self):
        with pytest.raises(ValueError):
            effective_temperature(0.0, omega_of(0.1))
        with pytest.raises(ValueError):
            effective_temperature(-0.3, omega_of(0.1))


class TestPhotonNumber:
    def test_equilibrium_is_reservoir_occupation_everywhere(self):
        stack = vacuum_cavity_stack(t_left=300.0, t_right=300.0)
        spec = QuadratureSpec()
        for e in (0.03, 0.118):
            w = omega_of(e)
            xs = np.linspace(-6e-6, 16e-6, 23)
            vals = photon_number_profile(stack, xs, w, spec)
            eta = bose_einstein(300.0, w)
            assert np.max(np.abs(vals / eta - 1.0)) < 10.0 * spec.rel_tol

    def test_saturates_to_reservoir_occupation_deep_inside(self):
        stack = vacuum_cavity_stack()
        w = omega_of(0.118)
        depth = math.log(1e6) * CONSTANTS.c / (2.0 * w * 0.3)
        got = photon_number(stack, -1.05 * depth, w)
        assert got == pytest.approx(bose_einstein(400.0, w), rel=1e-2)

    def test_oscillates_across_gap_at_resonance(self):
        stack = vacuum_cavity_stack()
        w = omega_of(0.118)
        xs = np.linspace(0.5e-6, 9.5e-6, 41)
        vals = photon_number_profile(stack, xs, w)
        assert (vals.max() - vals.min()) / vals.mean() > 0.05

    def test_degenerate_ldos_rejected(self, monkeypatch):
        stack = vacuum_cavity_stack()
        w = omega_of(0.1)
        monkeypatch.setattr(
            observables, "ldos_profile", lambda *a, **k: np.zeros(1)
        )
        with pytest.raises(DegenerateLDOSError):
            photon_number(stack, 5e-6, w)

    def test_effective_temperature_oscillation_decay_scale(self):
        # the interference amplitude decays at twice the field absorption rate;
        # measured 1/e scale must sit within a factor of 2 of that
        stack = vacuum_cavity_stack()
        w = omega_of(0.118)
        xs = np.linspace(-12e-6, -1e-6, 223)
        T = effective_temperature(photon_number_profile(stack, xs, w), w)

        def amplitude(lo, hi):
            sel = (xs >= lo) & (xs <= hi)
            return (T[sel].max() - T[sel].min()) / 2.0

        a_near = amplitude(-4e-6, -2e-6)
        a_far = amplitude(-9e-6, -7e-6)
        rate = math.log(a_near / a_far) / 5e-6
        predicted = 2.0 * w * 0.3 / CONSTANTS.c
        assert predicted / 2.0 < rate < predicted * 2.0


class TestPoynting:
    def test_equilibrium_flux_vanishes(self):
        stack = vacuum_cavity_stack(t_left=300.0, t_right=300.0)
        ref = vacuum_cavity_stack()
        w = omega_of(0.118)
        scale = poynting_spectral(ref, 5e-6, w)
        got = poynting_spectral(stack, 5e-6, w)
        assert abs(got) < 1e-8 * abs(scale)

    def test_constant_and_positive_across_gap(self):
        stack = vacuum_cavity_stack()
        w = omega_of(0.118)
        xs = np.linspace(0.5e-6, 9.5e-6, 17)
        vals = poynting_profile(stack, xs, w)
        assert np.all(vals > 0.0)
        assert (vals.max() - vals.min()) / vals.mean() < 1e-5

    def test_positive_at_all_thermal_energies(self):
        stack = vacuum_cavity_stack()
        for e in (0.02, 0.056, 0.118, 0.2):
            assert poynting_spectral(stack, 5e-6, omega_of(e)) > 0.0


class TestNetEmission:
    def test_exactly_zero_in_vacuum_gap(self):
        stack = vacuum_cavity_stack()
        w = omega_of(0.118)
        xs = np.linspace(0.5e-6, 9.5e-6, 9)
        np.testing.assert_array_equal(net_emission_profile(stack, xs, w), 0.0)

    def test_equilibrium_balance_in_lossy_media(self):
        stack = vacuum_cavity_stack(t_left=300.0, t_right=300.0)
        ref = vacuum_cavity_stack()
        w = omega_of(0.118)
        scale = abs(net_emission(ref, -0.5e-6, w))
        for x in (-2e-6, 12e-6):
            assert abs(net_emission(stack, x, w)) < 1e-8 * scale

    def test_matches_flux_divergence_near_interface(self):
        stack = vacuum_cavity_stack()
        w = omega_of(0.118)
        h = 2.0 * math.pi * CONSTANTS.c / w / 1.5 / 1000.0
        for x in (-0.6e-6, -1.7e-6):
            s = poynting_profile(stack, [x - 2 * h, x - h, x + h, x + 2 * h], w)
            ds = (-s[3] + 8.0 * s[2] - 8.0 * s[1] + s[0]) / (12.0 * h)
            q = net_emission(stack, x, w)
            assert ds == pytest.approx(q, rel=1e-2)


class TestFieldMap:
    def test_single_point_grid_matches_scalar_bitwise(self):
        stack = vacuum_cavity_stack()
        grid = SpectralGrid((5e-6,), (0.118,))
        w = omega_of(0.118)
        fm = field_map(stack, grid, "photon_number")
        assert fm.values[0, 0] == photon_number(stack, 5e-6, w)
        fm = field_map(stack, grid, "poynting")
        assert fm.values[0, 0] == poynting_spectral(stack, 5e-6, w)
        fm = field_map(stack, grid, "ldos")
        assert fm.values[0, 0] == ldos(stack, 5e-6, w) / LDOS_UNIT

    def test_repeated_evaluation_is_bit_identical(self):
        stack = vacuum_cavity_stack()
        grid = SpectralGrid(tuple(np.linspace(-2e-6, 12e-6, 5)), (0.05, 0.118))
        a = field_map(stack, grid, "temperature")
        b = field_map(stack, grid, "temperature")
        np.testing.assert_array_equal(a.values, b.values)
        assert a.units == "K"

    def test_unknown_observable_rejected(self):
        with pytest.raises(ValueError):
            field_map(vacuum_cavity_stack(), SpectralGrid((0.0,), (0.1,)), "entropy")

    def test_shape_and_units(self):
        stack = vacuum_cavity_stack()
        grid = SpectralGrid(tuple(np.linspace(-2e-6, 12e-6, 4)), (0.05, 0.1, 0.2))
        fm = field_map(stack, grid, "ldos")
        assert fm.values.shape == (4, 3)
        assert fm.units == "2/(pi c S)"
        assert np.all(fm.values >= 0.0)

    def test_failures_are_aggregated_with_coordinates(self, monkeypatch):
        original = observables._field_column

        def flaky(name, stack, xs, energy_ev, spec, constants):
            if energy_ev > 0.15:
                raise RuntimeError("boom")
            return original(name, stack, xs, energy_ev, spec, constants)

        monkeypatch.setattr(observables, "_field_column", flaky)
        grid = SpectralGrid((5e-6,), (0.05, 0.18, 0.2))
        with pytest.raises(observables.FieldMapError) as err:
            field_map(vacuum_cavity_stack(), grid, "ldos")
        msg = str(err.value)
        assert "2 of 3" in msg and "0.18" in msg and "boom" in msg
