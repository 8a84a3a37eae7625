"""Observables: correlations, Schmidt number, non-classicality, similarity.

The measurable coincidence pattern is the correlation matrix
Gamma(n_s, n_i) = |Psi(n_s, n_i)|**2.  Two complementary classical bounds
turn it into non-classicality witnesses: violation of
Gamma(n_s, n_i) >= (2/3) * sqrt(Gamma(n_s, n_s) * Gamma(n_i, n_i)) flags
bunching-type quantum correlations, violation of the Cauchy-Schwarz bound
Gamma(n_s, n_i) <= sqrt(Gamma(n_s, n_s) * Gamma(n_i, n_i)) flags
antibunching.  Totals are reported raw (unnormalized); use ``sample_counts``
to emulate finite coincidence statistics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import LatticeSpec, propagator
from .linear_walk import BiphotonState

__all__ = [
    "CorrelationMatrix",
    "NonClassicalityReport",
    "correlation",
    "schmidt_number",
    "nonclassicality",
    "similarity",
    "sample_counts",
    "phase_free_fidelity",
    "classical_two_beam_correlation",
]


@dataclass(frozen=True)
class CorrelationMatrix:
    """Nonnegative coincidence matrix Gamma with its waveguide labels."""

    gamma_matrix: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        g = np.array(self.gamma_matrix, dtype=float)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise ValueError("gamma_matrix must be square")
        if not np.all(np.isfinite(g)) or np.any(g < 0.0):
            raise ValueError("gamma_matrix entries must be finite and nonnegative")
        labels = np.array(self.labels, dtype=int)
        if labels.shape != (g.shape[0],):
            raise ValueError("labels must match the matrix dimension")
        g.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "gamma_matrix", g)
        object.__setattr__(self, "labels", labels)

    @property
    def total(self) -> float:
        return float(self.gamma_matrix.sum())

    def normalized(self) -> "CorrelationMatrix":
        t = self.total
        if t == 0.0:
            raise ValueError("cannot normalize an all-zero correlation matrix")
        return CorrelationMatrix(self.gamma_matrix / t, self.labels)

    def marginal_signal(self) -> np.ndarray:
        """I(n_s) = sum over idler waveguides."""
        return self.gamma_matrix.sum(axis=1)

    def marginal_idler(self) -> np.ndarray:
        return self.gamma_matrix.sum(axis=0)


@dataclass(frozen=True)
class NonClassicalityReport:
    """Entrywise witnesses and their totals for both classical bounds."""

    i_b_matrix: np.ndarray
    i_cs_matrix: np.ndarray
    i_b_total: float
    i_cs_total: float


def correlation(state: BiphotonState) -> CorrelationMatrix:
    """Coincidence matrix |Psi|**2 of a biphoton state."""
    gamma = np.abs(state.amplitudes) ** 2
    if gamma.sum() == 0.0:
        raise ValueError("zero state has no correlation matrix")
    return CorrelationMatrix(gamma, state.labels)


def schmidt_number(state: BiphotonState) -> float:
    """Effective mode count K = 1 / sum(p_i**2) of the biphoton state.

    p_i are the normalized squared singular values of the amplitude matrix;
    K = 1 for separable states and at most the matrix dimension.  Invariant
    under any unitary acting on either photon separately.
    """
    sv = np.linalg.svd(state.amplitudes, compute_uv=False)
    weight = sv**2
    total = weight.sum()
    if total == 0.0:
        raise ValueError("zero state has no Schmidt decomposition")
    p = weight / total
    return float(1.0 / np.sum(p**2))


def nonclassicality(corr: CorrelationMatrix) -> NonClassicalityReport:
    """Entrywise violations of the two classical-light bounds."""
    gamma = corr.gamma_matrix
    diag = np.diag(gamma)
    geo = np.sqrt(np.outer(diag, diag))
    i_b = np.maximum(2.0 / 3.0 * geo - gamma, 0.0)
    i_cs = np.maximum(gamma - geo, 0.0)
    return NonClassicalityReport(i_b_matrix=i_b, i_cs_matrix=i_cs,
                                 i_b_total=float(i_b.sum()),
                                 i_cs_total=float(i_cs.sum()))


def similarity(generated: CorrelationMatrix, target: CorrelationMatrix) -> float:
    """Overlap S = (sum sqrt(G_gen * G_tar))**2 / (sum G_gen * sum G_tar).

    Scale invariant and symmetric; equals 1 exactly when the matrices are
    proportional and 0 when their supports are disjoint.
    """
    g = generated.gamma_matrix
    t = target.gamma_matrix
    if g.shape != t.shape:
        raise ValueError(f"shape mismatch: {g.shape} vs {t.shape}")
    g_total, t_total = g.sum(), t.sum()
    if g_total == 0.0 or t_total == 0.0:
        raise ValueError("similarity requires nonzero matrices")
    return float(np.sum(np.sqrt(g * t)) ** 2 / (g_total * t_total))


def sample_counts(corr: CorrelationMatrix, total_counts: int, seed: int) -> np.ndarray:
    """Multinomial coincidence counts over the normalized correlation matrix."""
    if total_counts < 1:
        raise ValueError("total_counts must be at least 1")
    p = corr.gamma_matrix / corr.total
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(int(total_counts), p.ravel())
    return counts.reshape(corr.gamma_matrix.shape)


def phase_free_fidelity(state: BiphotonState, target_gamma: np.ndarray) -> float:
    """Best-case fidelity to a target with free per-cell phases.

    For targets of the form sum_c sqrt(T_c) * exp(i*phi_c) |c> with arbitrary
    phases phi_c, the fidelity maximized over the phases is
    (sum_c sqrt(T_c) * |Psi_c|)**2 with Psi normalized.
    """
    target = np.asarray(target_gamma, dtype=float)
    if target.shape != state.amplitudes.shape:
        raise ValueError(f"shape mismatch: {target.shape} vs {state.amplitudes.shape}")
    t_total = target.sum()
    if t_total <= 0.0:
        raise ValueError("target must have positive total weight")
    psi = state.normalize().amplitudes
    return float(np.sum(np.sqrt(target / t_total) * np.abs(psi)) ** 2)


def classical_two_beam_correlation(spec: LatticeSpec, waveguide_a: int, waveguide_b: int,
                                   n_samples: int, seed: int,
                                   batch: int = 4096) -> tuple[CorrelationMatrix, np.ndarray]:
    """Intensity correlations of two mutually incoherent classical beams.

    Unit-amplitude beams enter waveguides a and b with independent uniform
    random phases; Gamma(n_s, n_i) = <I_ns * I_ni> is averaged over
    n_samples phase draws.  Returns the averaged matrix and the entrywise
    Monte Carlo standard error.  Classical light of this kind satisfies
    Gamma(n_s, n_i) >= (2/3) * sqrt(Gamma(n_s, n_s) * Gamma(n_i, n_i)).
    """
    if n_samples < 2:
        raise ValueError("n_samples must be at least 2")
    u = propagator(spec, spec.length).matrix
    col_a = u[:, spec.index_of(waveguide_a)]
    col_b = u[:, spec.index_of(waveguide_b)]
    rng = np.random.default_rng(seed)
    n = spec.n_waveguides
    sum1 = np.zeros((n, n))
    sum2 = np.zeros((n, n))
    remaining = int(n_samples)
    while remaining > 0:
        m = min(batch, remaining)
        theta_a = rng.uniform(0.0, 2.0 * np.pi, m)
        theta_b = rng.uniform(0.0, 2.0 * np.pi, m)
        field = (np.exp(1j * theta_a)[:, None] * col_a[None, :]
                 + np.exp(1j * theta_b)[:, None] * col_b[None, :])
        intensity = np.abs(field) ** 2
        sum1 += intensity.T @ intensity
        sq = intensity**2
        sum2 += sq.T @ sq
        remaining -= m
    mean = sum1 / n_samples
    var = np.maximum(sum2 / n_samples - mean**2, 0.0)
    stderr = np.sqrt(var / n_samples)
    return CorrelationMatrix(mean, spec.labels), stderr
