import numpy as np
import pytest
from scipy.special import jv

from latwalk.lattice import (LatticeSpec, eigensystem, hamiltonian, i_power, propagator,
                             single_photon_amplitude_infinite, truncation_half_width)

from conftest import bessel_series

# Table-style aperiodic profile used across the suite: center-outward half
# profile [3.00, 9.58, 6.22, 7.68] mirrored onto 8 bonds of a 9-guide array.
APERIODIC_9 = (7.68, 6.22, 9.58, 3.00, 3.00, 9.58, 6.22, 7.68)


class TestBesselBackend:
    """The package's Bessel source (scipy.special.jv) against the series oracle."""

    @pytest.mark.parametrize("x", [0.25, 1.0, 2.0, 5.0, 10.0, 20.0, 35.0, 50.0])
    @pytest.mark.parametrize("n", [0, 1, 2, 3, 5, 10, -7, 25, -40, 60])
    def test_matches_power_series(self, n, x):
        ref = bessel_series(n, x)
        assert jv(n, x) == pytest.approx(ref, abs=1e-12)

    def test_frozen_value_j2_of_1(self):
        # power-series oracle gives J_2(1) = 0.11490348493190048
        assert jv(2, 1.0) == pytest.approx(0.11490348493190048, abs=1e-14)


class TestSinglePhotonAmplitude:
    def test_no_propagation(self):
        assert single_photon_amplitude_infinite(0, 1.0, 0.0) == pytest.approx(1.0 + 0.0j)

    def test_first_equality_of_j1_and_j0(self):
        # |amplitude(n=1)| first equals |amplitude(n=0)| at 2Cz = 1.43469565,
        # i.e. a walk depth near 0.72
        x_star = 1.43469565081956
        a0 = single_photon_amplitude_infinite(0, 1.0, x_star / 2)
        a1 = single_photon_amplitude_infinite(1, 1.0, x_star / 2)
        assert abs(a1) == pytest.approx(abs(a0), abs=1e-10)
        assert x_star / 2 == pytest.approx(0.72, abs=0.01)

    def test_derived_j2_value(self):
        # i**2 J_2(1) at C=0.5, z=1
        amp = single_photon_amplitude_infinite(2, 0.5, 1.0)
        assert amp == pytest.approx(-0.11490348493190048 + 0.0j, abs=1e-13)

    def test_tunneling_phase_is_plus_i(self):
        amp = single_photon_amplitude_infinite(1, 1.0, 0.1)
        assert amp.real == pytest.approx(0.0, abs=1e-15)
        assert amp.imag > 0

    def test_normalization_over_window(self):
        cl = 4.0
        half = truncation_half_width(cl)
        ns = np.arange(-half, half + 1)
        total = sum(abs(single_photon_amplitude_infinite(n, 2.0, 1.0)) ** 2 for n in ns)
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            single_photon_amplitude_infinite(0, -1.0, 1.0)
        with pytest.raises(ValueError):
            single_photon_amplitude_infinite(0, 1.0, -0.5)


class TestLatticeSpec:
    def test_validation(self):
        with pytest.raises(ValueError):
            LatticeSpec(3, (1.0,), 1.0)  # wrong coupling count
        with pytest.raises(ValueError):
            LatticeSpec(3, (1.0, -1.0), 1.0)
        with pytest.raises(ValueError):
            LatticeSpec(1, (), 1.0)

    def test_labels_centered(self):
        spec = LatticeSpec.uniform(9, 1.0, 1.0)
        assert list(spec.labels) == list(range(-4, 5))
        assert spec.index_of(0) == 4
        with pytest.raises(ValueError):
            spec.index_of(5)

    def test_uniformity_tolerance(self):
        assert LatticeSpec.uniform(5, 2.0, 1.0).is_uniform
        wiggled = LatticeSpec(5, (2.0, 2.0, 2.0, 2.0 * (1 + 1e-8)), 1.0)
        assert not wiggled.is_uniform


class TestHamiltonian:
    def test_uniform_3x3(self):
        h = hamiltonian(LatticeSpec.uniform(3, 1.0, 1.0))
        assert np.array_equal(h, [[0, 1, 0], [1, 0, 1], [0, 1, 0]])
        evals = np.linalg.eigvalsh(h)
        assert evals == pytest.approx([-np.sqrt(2), 0.0, np.sqrt(2)], abs=1e-12)

    def test_toeplitz_band_edges(self):
        # closed-form tridiagonal Toeplitz spectrum 2 C cos(m pi / (N+1))
        h = hamiltonian(LatticeSpec.uniform(101, 1.0, 1.0))
        evals = np.linalg.eigvalsh(h)
        edge = 2.0 * np.cos(np.pi / 102)
        assert evals[-1] == pytest.approx(edge, abs=1e-10)
        assert evals[0] == pytest.approx(-edge, abs=1e-10)

    def test_aperiodic_profile_structure(self):
        spec = LatticeSpec(9, APERIODIC_9, 1.0)
        h = hamiltonian(spec)
        assert h.shape == (9, 9)
        assert np.array_equal(h, h.T)
        assert np.all(np.diag(h) == 0)
        assert np.array_equal(h, np.flip(h))  # symmetric about the array center
        assert h[3, 4] == 3.00 and h[0, 1] == 7.68


class TestPropagator:
    def test_identity_at_zero(self):
        spec = LatticeSpec(9, APERIODIC_9, 1.0)
        u = propagator(spec, 0.0).matrix
        assert np.max(np.abs(u - np.eye(9))) < 1e-12

    @pytest.mark.parametrize("trial", range(6))
    def test_unitarity_random_specs(self, trial, rng):
        n = int(rng.integers(2, 102))
        couplings = tuple(rng.uniform(0.1, 20.0, n - 1))
        length = float(rng.uniform(0.0, 10.0))
        spec = LatticeSpec(n, couplings, 1.0)
        u = propagator(spec, length).matrix
        assert np.max(np.abs(u.conj().T @ u - np.eye(n))) <= 1e-10

    def test_semigroup(self, rng):
        spec = LatticeSpec(15, tuple(rng.uniform(0.5, 3.0, 14)), 1.0)
        u1 = propagator(spec, 0.7).matrix
        u2 = propagator(spec, 1.6).matrix
        u12 = propagator(spec, 2.3).matrix
        assert np.max(np.abs(u1 @ u2 - u12)) <= 1e-9

    def test_central_column_matches_infinite_array(self):
        # 2Cz = 4 well below 0.4 N for N = 61
        spec = LatticeSpec.uniform(61, 1.0, 2.0)
        u = propagator(spec, 2.0).matrix
        center = spec.index_of(0)
        for n in range(-10, 11):
            expected = single_photon_amplitude_infinite(n, 1.0, 2.0)
            assert u[center + n, center] == pytest.approx(expected, abs=1e-8)

    def test_mirror_symmetry_for_symmetric_profiles(self):
        spec = LatticeSpec(9, APERIODIC_9, 1.0)
        u = propagator(spec, 1.0).matrix
        assert np.max(np.abs(u - np.flip(u))) < 1e-10

    def test_two_waveguide_cross_coupling(self):
        # single-photon cross-over probability sin^2(Cz) for two guides
        spec = LatticeSpec.uniform(2, 1.0, 1.0)
        for z in (0.2, 0.9, 1.7):
            u = propagator(spec, z).matrix
            assert abs(u[0, 1]) ** 2 == pytest.approx(np.sin(z) ** 2, abs=1e-12)

    def test_rejects_negative_z(self):
        with pytest.raises(ValueError):
            propagator(LatticeSpec.uniform(3, 1.0, 1.0), -0.1)


def test_i_power_exact():
    assert list(i_power(np.array([0, 1, 2, 3, 4, -1, -2]))) == [
        1, 1j, -1, -1j, 1, -1j, -1]


def test_eigensystem_orthonormal():
    evals, evecs = eigensystem(LatticeSpec(9, APERIODIC_9, 1.0))
    assert np.max(np.abs(evecs.T @ evecs - np.eye(9))) < 1e-12
    assert np.all(np.diff(evals) >= 0)
