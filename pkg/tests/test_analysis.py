import numpy as np
import pytest

from latwalk.analysis import (CorrelationMatrix, classical_two_beam_correlation, correlation,
                              nonclassicality, phase_free_fidelity, sample_counts,
                              schmidt_number, similarity)
from latwalk.lattice import LatticeSpec
from latwalk.linear_walk import BiphotonState, InputSpec, propagate_linear
from latwalk.nonlinear_walk import PumpProfile, SpdcSettings, spdc_state

ANALYTIC = SpdcSettings(mode="analytic_infinite")


def spdc(pump, cl, **kw):
    settings = SpdcSettings(mode="analytic_infinite", **kw)
    return spdc_state(pump, LatticeSpec.uniform(3, 1.0, cl), settings).normalize()


class TestCorrelation:
    def test_point_state(self):
        state = BiphotonState([[1.0, 0], [0, 0]], [0, 1])
        corr = correlation(state)
        assert corr.gamma_matrix[0, 0] == 1.0
        assert corr.total == pytest.approx(1.0)

    def test_zero_state_rejected(self):
        with pytest.raises(ValueError):
            correlation(BiphotonState(np.zeros((2, 2)), [0, 1]))

    def test_marginals(self):
        corr = CorrelationMatrix([[0.1, 0.2], [0.3, 0.4]], [0, 1])
        assert corr.marginal_signal() == pytest.approx([0.3, 0.7])
        assert corr.marginal_idler() == pytest.approx([0.4, 0.6])

    def test_negative_entries_rejected(self):
        with pytest.raises(ValueError):
            CorrelationMatrix([[-0.1, 0], [0, 0]], [0, 1])

    def test_square_pattern_of_deep_separable_walk(self):
        spec = LatticeSpec.uniform(3, 1.0, 5.0)
        out = propagate_linear(InputSpec.separable_same_waveguide(0), spec,
                               mode="analytic_infinite")
        corr = correlation(out)
        gamma = corr.gamma_matrix
        # vertices of the square pattern dominate the center
        i0 = out.index_of(0)
        i8 = out.index_of(8)
        im8 = out.index_of(-8)
        assert gamma[i8, i8] > 2 * gamma[i0, i0]
        assert gamma[i8, im8] == pytest.approx(gamma[i8, i8], abs=1e-12)

    def test_spdc_mass_on_diagonals(self):
        corr = correlation(spdc(PumpProfile.single(0), 5.0))
        gamma = corr.gamma_matrix
        both = np.trace(gamma) + np.trace(np.fliplr(gamma))
        assert both > 0.5


class TestSchmidtNumber:
    def test_separable_stays_one(self):
        for cl in (0.5, 2.0, 6.0):
            spec = LatticeSpec.uniform(3, 1.0, cl)
            out = propagate_linear(InputSpec.separable_same_waveguide(0), spec,
                                   mode="analytic_infinite")
            assert schmidt_number(out) == pytest.approx(1.0, abs=1e-9)

    def test_path_entangled_stays_two(self):
        for kind in (InputSpec.path_entangled_plus(0), InputSpec.path_entangled_minus(0)):
            for cl in (0.5, 2.0, 6.0):
                spec = LatticeSpec.uniform(3, 1.0, cl)
                out = propagate_linear(kind, spec, mode="analytic_infinite")
                assert schmidt_number(out) == pytest.approx(2.0, abs=1e-9)

    def test_ideal_w_state_reaches_dimension(self, rng):
        n = 9
        phases = np.exp(1j * rng.uniform(0, 2 * np.pi, n))
        state = BiphotonState(np.diag(phases) / np.sqrt(n), np.arange(n) - 4)
        assert schmidt_number(state) == pytest.approx(9.0, abs=1e-12)

    @pytest.mark.parametrize("trial", range(4))
    def test_invariant_under_local_unitaries(self, trial, rng):
        n = 7
        psi = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        u, _ = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
        v, _ = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
        labels = np.arange(n) - 3
        k1 = schmidt_number(BiphotonState(psi, labels))
        k2 = schmidt_number(BiphotonState(u @ psi @ v.T, labels))
        assert k2 == pytest.approx(k1, abs=1e-9)

    def test_bounds(self, rng):
        n = 5
        psi = rng.normal(size=(n, n))
        k = schmidt_number(BiphotonState(psi, np.arange(n) - 2))
        assert 1.0 <= k <= n


class TestNonClassicality:
    def test_pure_bunching_plugin(self):
        n = 4
        corr = CorrelationMatrix(np.eye(n) / n, np.arange(n))
        report = nonclassicality(corr)
        off = ~np.eye(n, dtype=bool)
        assert report.i_cs_total == 0.0
        assert report.i_b_matrix[off] == pytest.approx(2.0 / (3.0 * n))
        assert np.all(np.diag(report.i_b_matrix) == 0.0)
        assert np.all(np.diag(report.i_cs_matrix) == 0.0)

    def test_totals_match_matrices(self):
        corr = correlation(spdc(PumpProfile.single(0), 3.0))
        report = nonclassicality(corr)
        assert report.i_b_total == report.i_b_matrix.sum()
        assert report.i_cs_total == report.i_cs_matrix.sum()

    def test_single_pump_violates_bunching_bound_only(self):
        for cl in (0.7, 3.3):
            report = nonclassicality(correlation(spdc(PumpProfile.single(0), cl)))
            assert report.i_cs_total <= 1e-12
            assert report.i_b_total > 0.0

    def test_in_phase_pair_violates_cauchy_schwarz_when_deep(self):
        report = nonclassicality(correlation(spdc(PumpProfile.pair_in_phase(0), 2.0)))
        assert report.i_cs_total > 0.0

    def test_out_of_phase_pair_never_violates_cauchy_schwarz(self):
        for cl in (0.7, 3.3, 5.1):
            report = nonclassicality(correlation(spdc(PumpProfile.pair_out_of_phase(0), cl)))
            assert report.i_cs_total <= 1e-12

    def test_bunching_violation_grows_with_depth(self):
        totals = [nonclassicality(correlation(spdc(PumpProfile.single(0), cl))).i_b_total
                  for cl in (0.7, 3.3, 5.1, 7.6)]
        assert all(b > a for a, b in zip(totals, totals[1:]))


class TestSimilarity:
    def test_identical_is_one(self):
        corr = correlation(spdc(PumpProfile.single(0), 2.0))
        assert similarity(corr, corr) == pytest.approx(1.0, abs=1e-12)

    def test_disjoint_supports_is_zero(self):
        a = CorrelationMatrix(np.diag([1.0, 0.0]), [0, 1])
        b = CorrelationMatrix(np.diag([0.0, 1.0]), [0, 1])
        assert similarity(a, b) == 0.0

    def test_scale_invariance(self, rng):
        gamma = rng.uniform(0.0, 1.0, (6, 6))
        labels = np.arange(6)
        a = CorrelationMatrix(gamma, labels)
        b = CorrelationMatrix(37.5 * gamma, labels)
        assert similarity(a, b) == pytest.approx(1.0, abs=1e-12)

    def test_symmetry(self, rng):
        labels = np.arange(5)
        a = CorrelationMatrix(rng.uniform(0, 1, (5, 5)), labels)
        b = CorrelationMatrix(rng.uniform(0, 1, (5, 5)), labels)
        assert similarity(a, b) == pytest.approx(similarity(b, a), abs=1e-14)

    def test_dimension_mismatch(self):
        a = CorrelationMatrix(np.eye(3), [-1, 0, 1])
        b = CorrelationMatrix(np.eye(4), np.arange(4))
        with pytest.raises(ValueError):
            similarity(a, b)


class TestPhaseFreeFidelity:
    def test_perfect_w_state(self, rng):
        n = 9
        phases = np.exp(1j * rng.uniform(0, 2 * np.pi, n))
        state = BiphotonState(np.diag(phases) / np.sqrt(n), np.arange(n) - 4)
        target = np.eye(n) / n
        assert phase_free_fidelity(state, target) == pytest.approx(1.0, abs=1e-12)

    def test_equals_similarity_for_support_targets(self):
        # with one free phase per occupied cell the maximized fidelity reduces
        # to the same overlap of square roots the similarity computes
        state = spdc(PumpProfile.single(0), 1.0)
        n = state.labels.size
        target = np.eye(n) / n
        fid = phase_free_fidelity(state, target)
        sim = similarity(correlation(state), CorrelationMatrix(target, state.labels))
        assert fid == pytest.approx(sim, abs=1e-12)


class TestSampleCounts:
    def test_single_count(self):
        corr = CorrelationMatrix(np.full((2, 2), 0.25), [0, 1])
        counts = sample_counts(corr, 1, seed=3)
        assert counts.sum() == 1
        assert np.count_nonzero(counts) == 1

    def test_binomial_spread_uniform_four_cells(self):
        corr = CorrelationMatrix(np.full((2, 2), 1.0), [0, 1])
        counts = sample_counts(corr, 10**6, seed=11)
        # sigma = sqrt(n p (1-p)) = 433; allow 4 sigma
        assert counts.sum() == 10**6
        assert np.all(np.abs(counts - 250_000) < 4 * 433)

    def test_zero_probability_cells_never_drawn(self):
        state = spdc(PumpProfile.pair_out_of_phase(0), 5.0)
        corr = correlation(state)
        counts = sample_counts(corr, 10**5, seed=7)
        for n in range(-15, 16):
            i = int(np.nonzero(corr.labels == n)[0][0])
            j = int(np.nonzero(corr.labels == 1 - n)[0][0])
            assert counts[i, j] == 0

    def test_reproducible(self):
        corr = CorrelationMatrix(np.full((3, 3), 1.0), [-1, 0, 1])
        a = sample_counts(corr, 1000, seed=42)
        b = sample_counts(corr, 1000, seed=42)
        assert np.array_equal(a, b)

    def test_rejects_nonpositive_total(self):
        corr = CorrelationMatrix(np.eye(2), [0, 1])
        with pytest.raises(ValueError):
            sample_counts(corr, 0, seed=1)


def _exact_two_beam_gamma(spec, guide_a, guide_b):
    """Closed-form phase average: Gamma = S_q S_r + 2 Re(w_q conj(w_r))."""
    from latwalk.lattice import propagator
    u = propagator(spec, spec.length).matrix
    col_a = u[:, spec.index_of(guide_a)]
    col_b = u[:, spec.index_of(guide_b)]
    strength = np.abs(col_a) ** 2 + np.abs(col_b) ** 2
    w = np.conj(col_a) * col_b
    return np.outer(strength, strength) + 2.0 * np.real(np.outer(w, np.conj(w)))


class TestClassicalLightOracle:
    def test_monte_carlo_matches_exact_phase_average(self):
        spec = LatticeSpec.uniform(21, 1.0, 2.0)
        corr, stderr = classical_two_beam_correlation(spec, 0, 1, n_samples=50_000, seed=5)
        exact = _exact_two_beam_gamma(spec, 0, 1)
        assert np.all(np.abs(corr.gamma_matrix - exact) <= 6.0 * stderr + 1e-12)

    def test_tight_classical_bound_holds_everywhere(self):
        # for fixed-amplitude beams with uniform random relative phase the
        # provable bound is Gamma_qr >= (1/3) sqrt(Gamma_qq Gamma_rr):
        # Gamma_qr >= S_q S_r - 2|w_q||w_r| with |w_q| <= S_q/2 and
        # Gamma_qq = S_q^2 + 2|w_q|^2 <= (3/2) S_q^2
        spec = LatticeSpec.uniform(21, 1.0, 2.0)
        corr, stderr = classical_two_beam_correlation(spec, 0, 1, n_samples=10_000, seed=5)
        gamma = corr.gamma_matrix
        diag = np.diag(gamma)
        bound = np.sqrt(np.outer(diag, diag)) / 3.0
        assert np.all(gamma >= bound - 5.0 * stderr - 1e-12)

    def test_witness_constant_exceeded_on_interference_cells(self):
        # the 2/3 witness constant is NOT satisfied by this ensemble where
        # the two output columns interfere with opposite phase at balanced
        # magnitude; those cells lie on the antidiagonal through the
        # injection pair (exact minimum ratio 0.3456 for this lattice)
        spec = LatticeSpec.uniform(21, 1.0, 2.0)
        gamma = _exact_two_beam_gamma(spec, 0, 1)
        diag = np.diag(gamma)
        ratio = gamma / np.sqrt(np.outer(diag, diag))
        assert ratio.min() == pytest.approx(0.34557, abs=1e-4)
        i, j = np.unravel_index(np.argmin(ratio), ratio.shape)
        assert spec.labels[i] + spec.labels[j] == 1

    def test_factorized_coincidences_satisfy_two_thirds_bound(self):
        # when the cross-guide intensity products decorrelate (beat period
        # far below the coincidence window) the off-diagonal factorizes to
        # S_q S_r while the same-guide statistics keep their interference
        # bunching <= (3/2) S_q^2; that model obeys the 2/3 witness bound,
        # tightly at balanced cells
        from latwalk.lattice import propagator
        for cl in (0.7, 2.0, 5.1):
            spec = LatticeSpec.uniform(31, 1.0, cl)
            u = propagator(spec, spec.length).matrix
            col_a = u[:, spec.index_of(0)]
            col_b = u[:, spec.index_of(1)]
            strength = np.abs(col_a) ** 2 + np.abs(col_b) ** 2
            w = np.conj(col_a) * col_b
            gamma = np.outer(strength, strength)
            np.fill_diagonal(gamma, strength**2 + 2.0 * np.abs(w) ** 2)
            diag = np.diag(gamma)
            ratio = gamma / np.sqrt(np.outer(diag, diag))
            off = ~np.eye(31, dtype=bool)
            assert np.all(ratio[off] >= 2.0 / 3.0 - 1e-12)

    def test_reproducible(self):
        spec = LatticeSpec.uniform(7, 1.0, 1.0)
        a, _ = classical_two_beam_correlation(spec, 0, 1, n_samples=500, seed=9)
        b, _ = classical_two_beam_correlation(spec, 0, 1, n_samples=500, seed=9)
        assert np.array_equal(a.gamma_matrix, b.gamma_matrix)
