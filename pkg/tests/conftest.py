"""Shared test helpers, including the independent Bessel power-series oracle."""

import mpmath as mp
import numpy as np
import pytest


def bessel_series(n: int, x: float, dps: int = 50) -> float:
    """J_n(x) from the defining power series, evaluated in extended precision.

    sum_k (-1)**k (x/2)**(2k+n) / (k! (k+n)!) for n >= 0, with
    J_{-n} = (-1)**n J_n.  Independent of the scipy backend used by the
    package; the alternating series needs extended precision for x up to 50.
    """
    with mp.workdps(dps):
        n = int(n)
        sign = mp.mpf(1)
        if n < 0:
            sign = mp.mpf(-1) ** (-n)
            n = -n
        x_half = mp.mpf(x) / 2
        scale = x_half**n
        total = mp.mpf(0)
        k = 0
        while True:
            term = (-1) ** k * x_half ** (2 * k) / (mp.factorial(k) * mp.factorial(k + n))
            total += term
            if k > abs(x) / 2 and abs(term * scale) < mp.mpf(10) ** (-dps + 5):
                break
            k += 1
        return float(sign * scale * total)


def align_states(state_a, state_b):
    """Restrict two biphoton states to their common label window."""
    common = np.intersect1d(state_a.labels, state_b.labels)
    idx_a = np.array([np.nonzero(state_a.labels == l)[0][0] for l in common])
    idx_b = np.array([np.nonzero(state_b.labels == l)[0][0] for l in common])
    return (state_a.amplitudes[np.ix_(idx_a, idx_a)],
            state_b.amplitudes[np.ix_(idx_b, idx_b)], common)


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)
