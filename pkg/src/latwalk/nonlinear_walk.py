"""Biphoton states generated by SPDC inside a nonlinear waveguide array.

Photon pairs are created with equal probability at every longitudinal
position, so the output state is the coherent z-integral of two-photon walks
started at each pumped waveguide:

    Psi = gamma * sum_n A_n * integral_0^L (U(z) e_n) (U(z) e_n)^T dz

with A_n the classical pump amplitude in waveguide n (the pump itself does
not couple transversely).  The analytic mode evaluates the same integral with
the infinite-array Bessel propagator; ``spdc_state_momentum`` provides the
closed momentum-space form for cross-validation.

Operation is degenerate and phase matched by default; finite mode accepts a
scalar phase mismatch and a split signal/idler coupling profile for
sensitivity studies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from types import MappingProxyType

import numpy as np
from scipy.special import jv, roots_legendre

from ._search import first_threshold
from .errors import ConfigurationError, QuadratureError
from .lattice import LatticeSpec, eigensystem, i_power, truncation_half_width
from .linear_walk import BiphotonState

__all__ = [
    "PumpProfile",
    "SpdcSettings",
    "spdc_state",
    "spdc_state_momentum",
    "momentum_grid",
    "real_space_from_momentum",
    "stabilization_threshold_nonlinear",
    "marginal_evolution",
]

_PANEL_ORDER = 16
_CONVERGENCE_TOL = 1e-8


@dataclass(frozen=True)
class PumpProfile:
    """Complex pump amplitudes A_n, sparse over waveguide labels."""

    amplitudes: dict

    def __post_init__(self):
        amps = {int(n): complex(a) for n, a in self.amplitudes.items() if a != 0}
        if not amps:
            raise ValueError("pump must have at least one nonzero amplitude")
        for n, a in amps.items():
            if not (np.isfinite(a.real) and np.isfinite(a.imag)):
                raise ValueError(f"pump amplitude in waveguide {n} is not finite")
        object.__setattr__(self, "amplitudes", MappingProxyType(amps))

    @classmethod
    def single(cls, n: int = 0, amplitude: complex = 1.0) -> "PumpProfile":
        return cls({n: amplitude})

    @classmethod
    def pair_in_phase(cls, n: int = 0, amplitude: complex = 1.0) -> "PumpProfile":
        """Equal pump amplitudes in neighbouring waveguides n and n+1."""
        return cls({n: amplitude, n + 1: amplitude})

    @classmethod
    def pair_out_of_phase(cls, n: int = 0, amplitude: complex = 1.0) -> "PumpProfile":
        """Opposite pump amplitudes in neighbouring waveguides n and n+1."""
        return cls({n: amplitude, n + 1: -amplitude})

    @classmethod
    def symmetric_three(cls, ratio: float, phase: float, center: int = 0) -> "PumpProfile":
        """Central waveguide at unit amplitude, neighbours at ratio*exp(i*phase)."""
        if ratio < 0.0:
            raise ValueError("ratio must be nonnegative")
        side = ratio * np.exp(1j * phase)
        return cls({center - 1: side, center: 1.0, center + 1: side})

    @property
    def waveguides(self) -> tuple[int, ...]:
        return tuple(sorted(self.amplitudes))


@dataclass(frozen=True)
class SpdcSettings:
    """Knobs of the SPDC evaluation.

    gamma scales the raw magnitude only.  quadrature_points is the total
    number of Gauss-Legendre nodes (composite 16-point panels) over [0, L];
    when check_convergence is set the state is recomputed with twice the
    nodes and must agree to 1e-8 after normalization.  delta_beta0 is an
    optional residual single-waveguide phase mismatch (finite mode only).
    """

    gamma: float = 1.0
    quadrature_points: int = 64
    mode: str = "finite"
    check_convergence: bool = True
    delta_beta0: float = 0.0

    def __post_init__(self):
        if self.gamma <= 0.0 or not np.isfinite(self.gamma):
            raise ValueError("gamma must be positive and finite")
        if self.quadrature_points < 16:
            raise ValueError("quadrature_points must be at least 16")
        if self.mode not in ("finite", "analytic_infinite"):
            raise ValueError(f"unknown SPDC mode {self.mode!r}")


def _gl_nodes(n_points: int, length: float) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes/weights on [0, length], 16-point panels."""
    panels = max(1, math.ceil(n_points / _PANEL_ORDER))
    x, w = roots_legendre(_PANEL_ORDER)
    edges = np.linspace(0.0, length, panels + 1)
    half = np.diff(edges) / 2.0
    mid = (edges[:-1] + edges[1:]) / 2.0
    z = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return z, weights


def _validate_pump(pump: PumpProfile, spec: LatticeSpec) -> None:
    for n in pump.waveguides:
        spec.index_of(n)  # raises if outside the array


def _spdc_finite(pump: PumpProfile, spec: LatticeSpec, gamma: float, n_points: int,
                 delta_beta0: float, idler_spec: LatticeSpec | None) -> np.ndarray:
    evals_s, vecs_s = eigensystem(spec)
    if idler_spec is None:
        evals_i, vecs_i = evals_s, vecs_s
    else:
        evals_i, vecs_i = eigensystem(idler_spec)
    z, w = _gl_nodes(n_points, spec.length)
    weights = w.astype(complex)
    if delta_beta0 != 0.0:
        weights = weights * np.exp(1j * delta_beta0 * z)
    phases_s = np.exp(1j * np.outer(z, evals_s))
    phases_i = phases_s if idler_spec is None else np.exp(1j * np.outer(z, evals_i))
    n = spec.n_waveguides
    psi = np.zeros((n, n), dtype=complex)
    for label, amp in pump.amplitudes.items():
        idx = spec.index_of(label)
        u_s = (phases_s * vecs_s[idx, :]) @ vecs_s.T  # rows are U(z_q) e_n
        u_i = u_s if idler_spec is None else (phases_i * vecs_i[idx, :]) @ vecs_i.T
        psi += amp * (u_s.T * weights) @ u_i
    return gamma * psi


def _spdc_analytic(pump: PumpProfile, spec: LatticeSpec, gamma: float, n_points: int,
                   half_width: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    coupling = spec.couplings[0]
    cl = coupling * spec.length
    pump_reach = max(abs(n) for n in pump.waveguides)
    if half_width is None:
        half_width = truncation_half_width(cl) + pump_reach
    labels = np.arange(-half_width, half_width + 1)
    orders = np.arange(-half_width - pump_reach, half_width + pump_reach + 1)
    z, w = _gl_nodes(n_points, spec.length)
    bessel = jv(orders[:, None], 2.0 * coupling * z[None, :])
    phase = i_power(labels)
    psi = np.zeros((labels.size, labels.size), dtype=complex)
    for n, amp in pump.amplitudes.items():
        rows = (labels - n) - orders[0]
        jn = bessel[rows, :]
        overlap = (jn * w) @ jn.T  # integral of J_{ns-n} J_{ni-n} dz
        sign = -1.0 if n % 2 else 1.0  # i**(-2n)
        psi += amp * sign * overlap
    psi *= gamma * np.outer(phase, phase)
    return psi, labels


def _evaluate(pump, spec, settings: SpdcSettings, n_points, idler_spec,
              half_width=None) -> tuple[np.ndarray, np.ndarray]:
    if settings.mode == "analytic_infinite":
        return _spdc_analytic(pump, spec, settings.gamma, n_points, half_width)
    psi = _spdc_finite(pump, spec, settings.gamma, n_points,
                       settings.delta_beta0, idler_spec)
    return psi, spec.labels


def spdc_state(pump: PumpProfile, spec: LatticeSpec, settings: SpdcSettings,
               idler_spec: LatticeSpec | None = None) -> BiphotonState:
    """Raw (gamma-scaled) biphoton state generated along the array.

    Finite mode integrates outer products of propagator columns over the
    generation coordinate; analytic mode requires a uniform lattice and uses
    the infinite-array Bessel form on a window wide enough that the truncated
    tail is negligible.  Call ``normalize`` on the result for unit norm.
    """
    _validate_pump(pump, spec)
    if settings.mode == "analytic_infinite":
        if not spec.is_uniform:
            raise ConfigurationError("analytic mode requires a uniform lattice")
        if idler_spec is not None:
            raise ConfigurationError("split signal/idler propagation requires finite mode")
        if settings.delta_beta0 != 0.0:
            raise ConfigurationError("scalar phase mismatch is only supported in finite mode")
    if idler_spec is not None:
        if idler_spec.n_waveguides != spec.n_waveguides:
            raise ConfigurationError("signal and idler lattices must have the same size")
        if idler_spec.length != spec.length:
            raise ConfigurationError("signal and idler lattices must have the same length")

    if spec.length == 0.0:
        n = spec.n_waveguides
        return BiphotonState(np.zeros((n, n)), spec.labels)

    psi, labels = _evaluate(pump, spec, settings, settings.quadrature_points, idler_spec)
    if not settings.check_convergence:
        return BiphotonState(psi, labels)

    psi_fine, _ = _evaluate(pump, spec, settings, 2 * settings.quadrature_points,
                            idler_spec, half_width=(labels.size - 1) // 2
                            if settings.mode == "analytic_infinite" else None)
    norm_coarse = np.linalg.norm(psi)
    norm_fine = np.linalg.norm(psi_fine)
    if norm_fine == 0.0:
        return BiphotonState(psi_fine, labels)
    residual = float(np.max(np.abs(psi / max(norm_coarse, np.finfo(float).tiny)
                                   - psi_fine / norm_fine)))
    if residual > _CONVERGENCE_TOL:
        raise QuadratureError(
            f"quadrature not converged: doubling {settings.quadrature_points} points "
            f"changes the normalized state by {residual:.3e} (tolerance {_CONVERGENCE_TOL:g}); "
            "increase quadrature_points", residual)
    return BiphotonState(psi_fine, labels)


def momentum_grid(k_grid: int) -> np.ndarray:
    """Uniform transverse-wavevector grid over [-pi, pi)."""
    if k_grid < 2:
        raise ValueError("k_grid must be at least 2")
    return -np.pi + 2.0 * np.pi * np.arange(k_grid) / k_grid


def spdc_state_momentum(pump: PumpProfile, spec: LatticeSpec, settings: SpdcSettings,
                        k_grid: int) -> np.ndarray:
    """Closed-form biphoton wavefunction on the (k_s, k_i) grid.

    Psi(k_s, k_i) = gamma * L * A~(k_s + k_i) * sinc(f) * exp(i f) with
    f = (cos k_s + cos k_i) * C * L and A~ the spatial Fourier transform of
    the pump profile.  Valid for uniform lattices at zero phase mismatch.
    """
    if not spec.is_uniform:
        raise ConfigurationError("momentum-space form requires a uniform lattice")
    k = momentum_grid(k_grid)
    k_sum = k[:, None] + k[None, :]
    pump_ft = np.zeros_like(k_sum, dtype=complex)
    for n, amp in pump.amplitudes.items():
        pump_ft += amp * np.exp(-1j * k_sum * n)
    f = (np.cos(k)[:, None] + np.cos(k)[None, :]) * spec.couplings[0] * spec.length
    return settings.gamma * spec.length * pump_ft * np.sinc(f / np.pi) * np.exp(1j * f)


def real_space_from_momentum(psi_k: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Inverse discrete Fourier transform of a (k_s, k_i) wavefunction.

    Returns centered waveguide labels and the real-space matrix; accurate to
    the grid's aliasing error once k_grid exceeds the occupied window.
    """
    n_k = psi_k.shape[0]
    if psi_k.shape != (n_k, n_k):
        raise ValueError("momentum matrix must be square")
    raw = np.fft.ifft2(psi_k)
    labels = np.round(np.fft.fftfreq(n_k) * n_k).astype(int)
    # grid starts at k = -pi, which contributes (-1)**(ns+ni)
    signs = np.where(labels % 2 == 0, 1.0, -1.0)
    psi = raw * np.outer(signs, signs)
    order = np.argsort(labels)
    return labels[order], psi[np.ix_(order, order)]


def _pair_integral(order_a: int, order_b: int, coupling: float, length: float,
                   n_points: int = 256) -> float:
    z, w = _gl_nodes(n_points, length)
    x = 2.0 * coupling * z
    return float(np.sum(w * jv(order_a, x) * jv(order_b, x)))


def _classify_pump(pump: PumpProfile) -> str:
    wgs = pump.waveguides
    if len(wgs) == 1:
        return "single"
    if len(wgs) == 2 and wgs[1] == wgs[0] + 1:
        ratio = pump.amplitudes[wgs[1]] / pump.amplitudes[wgs[0]]
        if abs(abs(ratio) - 1.0) <= 1e-9:
            angle = abs(np.angle(ratio))
            if angle <= 1e-9:
                return "in_phase"
            if abs(angle - np.pi) <= 1e-9:
                return "out_of_phase"
    raise ValueError("threshold defined only for single-waveguide or equal-amplitude "
                     "neighbour pumping (in phase or in phase opposition)")


def stabilization_threshold_nonlinear(pump: PumpProfile, coupling: float) -> float:
    """Smallest walk depth CL at which the SPDC correlation pattern locks in.

    Single-waveguide pump: the first diagonal element overtakes the first
    off-diagonal one.  In-phase neighbour pump: the antidiagonal through the
    pumped pair overtakes the diagonal.  Out-of-phase pumping nulls that
    antidiagonal exactly, so its pattern is stable from CL = 0.
    """
    if coupling <= 0.0:
        raise ValueError("coupling must be positive")
    shape = _classify_pump(pump)
    if shape == "out_of_phase":
        return 0.0

    if shape == "single":
        def excess(length):
            return (_pair_integral(1, 1, coupling, length)
                    - abs(_pair_integral(0, 1, coupling, length)))
    else:
        def excess(length):
            cross = _pair_integral(0, 1, coupling, length)
            return 2.0 * abs(cross) - abs(_pair_integral(0, 0, coupling, length)
                                          - _pair_integral(1, 1, coupling, length))

    z_star = first_threshold(excess, upper=4.0 / coupling,
                             scan_step=0.01 / coupling, tol=1e-4 / coupling)
    return coupling * z_star


def marginal_evolution(pump: PumpProfile, spec: LatticeSpec, settings: SpdcSettings,
                       z_steps: int) -> np.ndarray:
    """Signal marginal I(n_s) of the normalized running state at each z.

    Rows correspond to z = linspace(0, L, z_steps); the z = 0 row is zero
    because no pairs have been generated yet.
    """
    if z_steps < 2:
        raise ValueError("z_steps must be at least 2")
    _validate_pump(pump, spec)
    # one convergence check at full length, then a fixed rule along the sweep
    full = spdc_state(pump, spec, settings)
    half_width = (full.labels.size - 1) // 2 if settings.mode == "analytic_infinite" else None
    swept = replace(settings, check_convergence=False)
    z_values = np.linspace(0.0, spec.length, z_steps)
    marginals = np.zeros((z_steps, full.labels.size))
    for row, z in enumerate(z_values):
        if z == 0.0:
            continue
        partial = LatticeSpec(spec.n_waveguides, spec.couplings, z)
        psi, _ = _evaluate(pump, partial, swept, swept.quadrature_points, None,
                           half_width=half_width)
        norm = np.linalg.norm(psi)
        if norm > 0.0:
            marginals[row] = np.sum(np.abs(psi / norm) ** 2, axis=1)
    return marginals
