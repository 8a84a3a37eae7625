"""Two-photon propagation through a linear (passive) waveguide array.

The biphoton amplitude matrix Psi(n_s, n_i) evolves as Psi_out = U Psi_in U^T
where U is the single-photon propagator; the idler index contracts on its own
copy of U, hence the transpose.  Signal and idler are treated as
distinguishable (no symmetrization), matching cross-polarized photon pairs;
``BiphotonState.symmetrized`` is available for indistinguishable-photon
studies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import jv

from ._search import first_threshold
from .errors import ConfigurationError
from .lattice import LatticeSpec, i_power, propagator, truncation_half_width

__all__ = [
    "BiphotonState",
    "InputSpec",
    "propagate_linear",
    "stabilization_threshold_linear",
]


@dataclass(frozen=True)
class BiphotonState:
    """Complex amplitude matrix over output waveguide pairs.

    amplitudes[i, j] is the amplitude for the signal photon in the waveguide
    labeled labels[i] and the idler photon in labels[j].  Raw SPDC states
    carry their gamma-scaled magnitude until ``normalize`` is called.
    """

    amplitudes: np.ndarray
    labels: np.ndarray
    mode_labels: tuple[str, str] = ("signal", "idler")

    def __post_init__(self):
        amp = np.array(self.amplitudes, dtype=complex)
        if amp.ndim != 2 or amp.shape[0] != amp.shape[1]:
            raise ValueError("amplitudes must be a square matrix")
        if not np.all(np.isfinite(amp.real)) or not np.all(np.isfinite(amp.imag)):
            raise ValueError("amplitudes must be finite")
        labels = np.array(self.labels, dtype=int)
        if labels.shape != (amp.shape[0],):
            raise ValueError("labels must match the matrix dimension")
        amp.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)
        object.__setattr__(self, "labels", labels)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalize(self) -> "BiphotonState":
        n = self.norm
        if n == 0.0:
            raise ValueError("cannot normalize a zero state")
        return BiphotonState(self.amplitudes / n, self.labels, self.mode_labels)

    def index_of(self, label: int) -> int:
        hits = np.nonzero(self.labels == int(label))[0]
        if hits.size == 0:
            raise ValueError(f"waveguide {label} not in this state's window")
        return int(hits[0])

    def amplitude(self, n_s: int, n_i: int) -> complex:
        """Amplitude for signal in waveguide n_s and idler in n_i (labels)."""
        return complex(self.amplitudes[self.index_of(n_s), self.index_of(n_i)])

    def symmetrized(self) -> "BiphotonState":
        """Exchange-symmetric state (A + A^T)/2, not renormalized."""
        return BiphotonState((self.amplitudes + self.amplitudes.T) / 2.0,
                             self.labels, self.mode_labels)


_INPUT_KINDS = ("separable_same_waveguide", "path_entangled_plus",
                "path_entangled_minus", "custom")


@dataclass(frozen=True)
class InputSpec:
    """Two-photon input state fed into the array.

    The path-entangled kinds encode (|n,n> +- |n+1,n+1>)/sqrt(2); all
    constructors emit unit-norm states.
    """

    kind: str
    waveguide: int = 0
    matrix: np.ndarray | None = None
    matrix_labels: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in _INPUT_KINDS:
            raise ValueError(f"unknown input kind {self.kind!r}")
        if self.kind == "custom":
            if self.matrix is None or self.matrix_labels is None:
                raise ValueError("custom inputs need matrix and matrix_labels")
            m = np.array(self.matrix, dtype=complex)
            lab = np.array(self.matrix_labels, dtype=int)
            if m.ndim != 2 or m.shape[0] != m.shape[1] or lab.shape != (m.shape[0],):
                raise ValueError("custom matrix must be square with matching labels")
            m.setflags(write=False)
            lab.setflags(write=False)
            object.__setattr__(self, "matrix", m)
            object.__setattr__(self, "matrix_labels", lab)

    @classmethod
    def separable_same_waveguide(cls, n: int = 0) -> "InputSpec":
        return cls("separable_same_waveguide", waveguide=n)

    @classmethod
    def path_entangled_plus(cls, n: int = 0) -> "InputSpec":
        """(|n,n> + |n+1,n+1>)/sqrt(2)."""
        return cls("path_entangled_plus", waveguide=n)

    @classmethod
    def path_entangled_minus(cls, n: int = 0) -> "InputSpec":
        """(|n,n> - |n+1,n+1>)/sqrt(2)."""
        return cls("path_entangled_minus", waveguide=n)

    @classmethod
    def custom(cls, matrix, labels) -> "InputSpec":
        return cls("custom", matrix=matrix, matrix_labels=labels)

    @property
    def support(self) -> np.ndarray:
        """Labels of the waveguides the input state occupies."""
        if self.kind == "separable_same_waveguide":
            return np.array([self.waveguide])
        if self.kind in ("path_entangled_plus", "path_entangled_minus"):
            return np.array([self.waveguide, self.waveguide + 1])
        occupied = np.nonzero(np.any(self.matrix != 0, axis=0) | np.any(self.matrix != 0, axis=1))[0]
        return self.matrix_labels[occupied]

    def state_on(self, labels: np.ndarray) -> np.ndarray:
        """Materialize the unit-norm input matrix on the given label window."""
        labels = np.asarray(labels)
        n = labels.size
        psi = np.zeros((n, n), dtype=complex)

        def idx(label):
            hits = np.nonzero(labels == label)[0]
            if hits.size == 0:
                raise ValueError(f"input waveguide {label} lies outside the array")
            return int(hits[0])

        if self.kind == "separable_same_waveguide":
            i = idx(self.waveguide)
            psi[i, i] = 1.0
        elif self.kind in ("path_entangled_plus", "path_entangled_minus"):
            sign = 1.0 if self.kind == "path_entangled_plus" else -1.0
            i, j = idx(self.waveguide), idx(self.waveguide + 1)
            psi[i, i] = 1.0 / np.sqrt(2.0)
            psi[j, j] = sign / np.sqrt(2.0)
        else:
            for a, la in enumerate(self.matrix_labels):
                for b, lb in enumerate(self.matrix_labels):
                    if self.matrix[a, b] != 0:
                        psi[idx(la), idx(lb)] = self.matrix[a, b]
        return psi


def _infinite_transfer(out_labels: np.ndarray, in_labels: np.ndarray, cl: float) -> np.ndarray:
    """Transfer matrix i**(a-m) J_{a-m}(2*CL) of the infinite uniform array."""
    diff = out_labels[:, None] - in_labels[None, :]
    return i_power(diff) * jv(diff, 2.0 * cl)


def propagate_linear(input_spec: InputSpec, spec: LatticeSpec, mode: str = "finite",
                     idler_spec: LatticeSpec | None = None) -> BiphotonState:
    """Propagate a two-photon input over the array length.

    mode "finite" uses the exact propagator of the given lattice; mode
    "analytic_infinite" uses the Bessel closed form and requires uniform
    couplings (edge-free reference).  idler_spec optionally propagates the
    idler photon under a different coupling profile (finite mode only).
    """
    if mode not in ("finite", "analytic_infinite"):
        raise ValueError(f"unknown propagation mode {mode!r}")
    if mode == "analytic_infinite":
        if not spec.is_uniform:
            raise ConfigurationError("analytic mode requires a uniform lattice")
        if idler_spec is not None:
            raise ConfigurationError("distinct idler propagation requires finite mode")
        cl = spec.couplings[0] * spec.length
        support = input_spec.support
        half = truncation_half_width(cl) + int(np.max(np.abs(support)))
        out_labels = np.arange(-half, half + 1)
        transfer = _infinite_transfer(out_labels, support, cl)
        small = input_spec.state_on(support)
        out = transfer @ small @ transfer.T
        return BiphotonState(out, out_labels)

    psi_in = input_spec.state_on(spec.labels)
    u_signal = propagator(spec, spec.length).matrix
    if idler_spec is None:
        u_idler = u_signal
    else:
        if idler_spec.n_waveguides != spec.n_waveguides:
            raise ConfigurationError("signal and idler lattices must have the same size")
        if idler_spec.length != spec.length:
            raise ConfigurationError("signal and idler lattices must have the same length")
        u_idler = propagator(idler_spec, idler_spec.length).matrix
    out = u_signal @ psi_in @ u_idler.T
    return BiphotonState(out, spec.labels)


def stabilization_threshold_linear(input_spec: InputSpec, coupling: float) -> float:
    """Smallest walk depth CL at which the output correlation pattern locks in.

    Separable input: the ballistic terms overtake the leading off-diagonal
    one when |J_1| >= |J_0| at argument 2*CL.  Plus state: the antidiagonal
    through the injection pair overtakes the diagonal.  The minus state is
    antidiagonal-free at any depth, so its pattern is stable from CL = 0.
    """
    if coupling <= 0.0:
        raise ValueError("coupling must be positive")
    if input_spec.kind == "path_entangled_minus":
        return 0.0

    if input_spec.kind == "separable_same_waveguide":
        def excess(z):
            x = 2.0 * coupling * z
            return abs(jv(1, x)) - abs(jv(0, x))
    elif input_spec.kind == "path_entangled_plus":
        def excess(z):
            x = 2.0 * coupling * z
            j0, j1 = jv(0, x), jv(1, x)
            return 2.0 * abs(j0 * j1) - abs(j0 * j0 - j1 * j1)
    else:
        raise ValueError(f"no stabilization threshold defined for kind {input_spec.kind!r}")

    z_star = first_threshold(excess, upper=4.0 / coupling,
                             scan_step=0.01 / coupling, tol=1e-4 / coupling)
    return coupling * z_star
