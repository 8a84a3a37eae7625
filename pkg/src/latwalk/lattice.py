"""Waveguide-array model and single-photon propagators.

A lattice is a chain of evanescently coupled waveguides described by a real
symmetric tridiagonal coupled-mode Hamiltonian H with zero diagonal (the
common single-waveguide propagation constant only contributes a global phase
and is dropped) and H[j, j+1] = C_j, the coupling between neighbours j and
j+1 in units of 1/length.

Sign convention: propagation over a distance z is U(z) = exp(+i H z) with
positive couplings, so that tunneling to an adjacent waveguide carries a
phase factor of +i.  For an infinite uniform array this reproduces the
closed form amplitude i**n * J_n(2*C*z) for injection in waveguide 0, where
J_n is the Bessel function of the first kind.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import jv

__all__ = [
    "LatticeSpec",
    "Propagator",
    "single_photon_amplitude_infinite",
    "hamiltonian",
    "eigensystem",
    "propagator",
    "i_power",
    "truncation_half_width",
]

# couplings equal within this relative tolerance count as uniform
_UNIFORM_RTOL = 1e-12

_I_POW = np.array([1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j])


def i_power(n):
    """i**n for integer n or integer arrays, computed exactly."""
    return _I_POW[np.mod(n, 4)]


def truncation_half_width(cl: float) -> int:
    """Half width of the waveguide window used for infinite-array formulas.

    Chosen so the Bessel tail mass sum(J_n(2*CL)**2, |n| > M) stays below
    1e-12 for all propagation depths up to CL.
    """
    return int(np.ceil(2.0 * max(cl, 0.0))) + 20


@dataclass(frozen=True)
class LatticeSpec:
    """Geometry of a waveguide array.

    couplings[j] couples neighbours j and j+1 (units 1/length); length is the
    propagation distance L.  Waveguide labels are centered: for odd N they
    run -(N-1)/2 .. +(N-1)/2 with the middle waveguide at 0; for even N the
    label 0 sits at index (N-1)//2.
    """

    n_waveguides: int
    couplings: tuple[float, ...]
    length: float

    def __post_init__(self):
        n = int(self.n_waveguides)
        if n < 2:
            raise ValueError("a lattice needs at least two waveguides")
        cs = tuple(float(c) for c in self.couplings)
        if len(cs) != n - 1:
            raise ValueError(f"expected {n - 1} couplings for {n} waveguides, got {len(cs)}")
        if not all(np.isfinite(c) and c > 0.0 for c in cs):
            raise ValueError("couplings must be strictly positive and finite")
        length = float(self.length)
        if not (np.isfinite(length) and length >= 0.0):
            raise ValueError("length must be nonnegative and finite")
        object.__setattr__(self, "n_waveguides", n)
        object.__setattr__(self, "couplings", cs)
        object.__setattr__(self, "length", length)

    @classmethod
    def uniform(cls, n_waveguides: int, coupling: float, length: float) -> "LatticeSpec":
        return cls(n_waveguides, (float(coupling),) * (n_waveguides - 1), length)

    @property
    def labels(self) -> np.ndarray:
        """Centered waveguide labels, one per waveguide."""
        return np.arange(self.n_waveguides) - (self.n_waveguides - 1) // 2

    def index_of(self, label: int) -> int:
        """Matrix index of the waveguide with the given centered label."""
        idx = int(label) + (self.n_waveguides - 1) // 2
        if not 0 <= idx < self.n_waveguides:
            raise ValueError(f"waveguide {label} lies outside the array")
        return idx

    @property
    def is_uniform(self) -> bool:
        c = np.asarray(self.couplings)
        return bool(np.all(np.abs(c - c[0]) <= _UNIFORM_RTOL * abs(c[0])))

    @property
    def mean_coupling(self) -> float:
        return float(np.mean(self.couplings))

    @property
    def walk_depth(self) -> float:
        """Dimensionless depth mean(C) * L of the walk."""
        return self.mean_coupling * self.length


@dataclass(frozen=True)
class Propagator:
    """Single-photon transfer matrix U(z) of a finite array."""

    matrix: np.ndarray
    z: float

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "z", float(self.z))


def single_photon_amplitude_infinite(n: int, coupling: float, z: float) -> complex:
    """Amplitude i**n * J_n(2*C*z) in waveguide n of an infinite uniform array.

    The photon is injected in waveguide 0; n is the (signed) transverse
    displacement.
    """
    if coupling <= 0.0:
        raise ValueError("coupling must be positive")
    if z < 0.0:
        raise ValueError("z must be nonnegative")
    return complex(i_power(n) * jv(n, 2.0 * coupling * z))


def hamiltonian(spec: LatticeSpec) -> np.ndarray:
    """Real symmetric tridiagonal coupled-mode Hamiltonian (zero diagonal)."""
    c = np.asarray(spec.couplings, dtype=float)
    return np.diag(c, 1) + np.diag(c, -1)


def eigensystem(spec: LatticeSpec) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and orthonormal eigenvectors of the lattice Hamiltonian."""
    try:
        evals, evecs = np.linalg.eigh(hamiltonian(spec))
    except np.linalg.LinAlgError as exc:  # should not happen for real symmetric input
        raise RuntimeError(f"eigendecomposition failed for lattice {spec}: {exc}") from exc
    return evals, evecs


def propagator(spec: LatticeSpec, z: float) -> Propagator:
    """Unitary U(z) = exp(+i H z) of the finite array."""
    if z < 0.0:
        raise ValueError("z must be nonnegative")
    evals, evecs = eigensystem(spec)
    u = (evecs * np.exp(1j * evals * z)) @ evecs.T
    return Propagator(matrix=u, z=z)
