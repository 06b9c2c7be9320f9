"""Arbitrary-spin operator algebra, coherent states, Husimi Q, and purity.

Conventions used throughout the package:

- The basis of a spin-I system is ordered by descending magnetic quantum
  number, m = I, I-1, ..., -I, so ``|I, I>`` is the first basis vector.
- All Hamiltonians are expressed in frequency units (Hz); time propagators
  are always ``exp(-i 2 pi H t)``. Rotations by an angle use
  ``exp(-i phi Iz)`` directly (radians, no 2 pi).
- A direction (theta, phi) refers to the unit vector
  (sin theta cos phi, sin theta sin phi, cos theta).

Operator payloads are plain complex ndarrays; the invariants of the domain
types (Hermiticity, unitarity, state norm, density-matrix validity) are
enforced by the ``check_*`` validators at operation boundaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConfigError

__all__ = [
    "SpinQuantumNumber",
    "SphereDirection",
    "SpinOperators",
    "check_hermitian",
    "check_unitary",
    "check_state_vector",
    "check_density_matrix",
    "make_spin_operators",
    "hermitian_eigensystem",
    "unitary_exp",
    "rotation_operator",
    "spin_coherent_state",
    "spin_coherent_bank",
    "rotated_operator_about_z",
    "husimi_q",
    "husimi_grid",
    "purity",
]

MAX_TWO_I = 31  # largest supported spin, dimension 32


@dataclass(frozen=True)
class SpinQuantumNumber:
    """Spin quantum number I = two_i / 2, half-integer values allowed.

    Parameters
    ----------
    two_i : int
        Twice the spin quantum number; must satisfy 1 <= two_i <= 31.
    """

    two_i: int

    def __post_init__(self) -> None:
        if not isinstance(self.two_i, (int, np.integer)) or isinstance(self.two_i, bool):
            raise ConfigError(f"two_i must be an integer, got {self.two_i!r}")
        if self.two_i < 1:
            raise ConfigError(f"two_i must be >= 1, got {self.two_i}")
        if self.two_i > MAX_TWO_I:
            raise ConfigError(
                f"two_i = {self.two_i} exceeds the supported maximum {MAX_TWO_I}"
            )

    @property
    def i(self) -> float:
        return self.two_i / 2.0

    @property
    def dim(self) -> int:
        return self.two_i + 1

    @classmethod
    def from_i(cls, i: float) -> "SpinQuantumNumber":
        """Build from I itself (e.g. 3.5); I must be a non-negative half-integer."""
        two_i = int(round(2 * i))
        if abs(2 * i - two_i) > 1e-12:
            raise ConfigError(f"spin must be a half-integer, got {i}")
        return cls(two_i)


@dataclass(frozen=True)
class SphereDirection:
    """A point on the unit sphere.

    theta is the polar angle in [0, pi], phi the azimuth in [0, 2 pi).
    """

    theta: float
    phi: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.theta <= math.pi:
            raise ConfigError(f"theta must lie in [0, pi], got {self.theta}")
        if not 0.0 <= self.phi < 2.0 * math.pi:
            raise ConfigError(f"phi must lie in [0, 2 pi), got {self.phi}")

    @property
    def unit_vector(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array(
            [st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)]
        )

    @classmethod
    def from_vector(cls, v) -> "SphereDirection":
        v = np.asarray(v, dtype=float)
        r = float(np.linalg.norm(v))
        if r == 0.0:
            raise ConfigError("zero vector has no direction")
        theta = math.acos(max(-1.0, min(1.0, v[2] / r)))
        phi = math.atan2(v[1], v[0]) % (2.0 * math.pi)
        if phi >= 2.0 * math.pi:  # guard the wrap at exactly 2 pi
            phi = 0.0
        return cls(theta, phi)


@dataclass(frozen=True)
class SpinOperators:
    """The dimensionless operator triple (Ix, Iy, Iz) for one spin value.

    Arrays are read-only; iterate to unpack as ``ix, iy, iz = ops``.
    """

    spin: SpinQuantumNumber
    ix: np.ndarray
    iy: np.ndarray
    iz: np.ndarray

    def __iter__(self):
        return iter((self.ix, self.iy, self.iz))

    @property
    def dim(self) -> int:
        return self.spin.dim


def check_hermitian(m, tol: float = 1e-14, name: str = "matrix") -> np.ndarray:
    """Validate Hermiticity entrywise, relative to max(1, largest entry)."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ConfigError(f"{name} must be square, got shape {m.shape}")
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    defect = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
    if defect > tol * scale:
        raise ConfigError(
            f"{name} is not Hermitian: defect {defect:.3e} exceeds {tol:.1e} * {scale:.3e}"
        )
    return m


def check_unitary(u, tol: float = 1e-12, name: str = "matrix") -> np.ndarray:
    """Validate unitarity in operator (spectral) norm."""
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ConfigError(f"{name} must be square, got shape {u.shape}")
    defect = float(np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0]), 2))
    if defect > tol:
        raise ConfigError(f"{name} is not unitary: defect {defect:.3e} > {tol:.1e}")
    return u


def check_state_vector(psi, tol: float = 1e-12) -> np.ndarray:
    """Validate unit norm of a state vector."""
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    norm = float(np.linalg.norm(psi))
    if abs(norm - 1.0) > tol:
        raise ConfigError(f"state vector norm {norm!r} deviates from 1 beyond {tol:.1e}")
    return psi


def check_density_matrix(
    rho, trace_tol: float = 1e-10, eig_floor: float = -1e-10
) -> np.ndarray:
    """Validate a density matrix: Hermitian, unit trace, eigenvalues >= eig_floor."""
    rho = check_hermitian(rho, tol=1e-10, name="density matrix")
    tr = complex(np.trace(rho))
    if abs(tr - 1.0) > trace_tol:
        raise ConfigError(f"density matrix trace {tr!r} deviates from 1 beyond {trace_tol:.1e}")
    evals = np.linalg.eigvalsh(rho)
    if float(evals.min()) < eig_floor:
        raise ConfigError(
            f"density matrix has eigenvalue {evals.min():.3e} below {eig_floor:.1e}"
        )
    return rho


@lru_cache(maxsize=64)
def _spin_operator_arrays(two_i: int):
    i = two_i / 2.0
    d = two_i + 1
    m = i - np.arange(d)  # descending: I, I-1, ..., -I
    raise_op = np.zeros((d, d), dtype=complex)
    for col in range(1, d):
        mc = m[col]
        raise_op[col - 1, col] = math.sqrt(i * (i + 1) - mc * (mc + 1))
    ix = (raise_op + raise_op.conj().T) / 2.0
    iy = (raise_op - raise_op.conj().T) / 2.0j
    iz = np.diag(m).astype(complex)
    for a in (ix, iy, iz):
        a.setflags(write=False)
    return ix, iy, iz


def make_spin_operators(spin: SpinQuantumNumber) -> SpinOperators:
    """Build (Ix, Iy, Iz) in the descending-m basis.

    The matrices satisfy [Ix, Iy] = i Iz (and cyclic permutations) and
    Ix^2 + Iy^2 + Iz^2 = I(I+1) * identity.
    """
    ix, iy, iz = _spin_operator_arrays(spin.two_i)
    return SpinOperators(spin=spin, ix=ix, iy=iy, iz=iz)


def _fix_eigenvector_phases(vecs: np.ndarray) -> np.ndarray:
    """Make the first non-negligible component of each column real-positive."""
    vecs = vecs.copy()
    for k in range(vecs.shape[1]):
        col = vecs[:, k]
        mags = np.abs(col)
        ref = mags.max()
        if ref == 0.0:
            continue
        idx = int(np.argmax(mags > 1e-12 * ref))
        pivot = col[idx]
        if pivot != 0.0:
            vecs[:, k] = col * (pivot.conjugate() / abs(pivot))
    return vecs


def hermitian_eigensystem(m, tol: float = 1e-10):
    """Eigendecomposition of a Hermitian matrix with deterministic output.

    Returns (eigenvalues ascending, eigenvectors as columns). Eigenvector
    phases are fixed so the first non-negligible component is real-positive.
    """
    m = check_hermitian(m, tol=tol, name="eigensystem input")
    evals, evecs = np.linalg.eigh(m)
    return evals, _fix_eigenvector_phases(evecs)


def _expm_hermitian_scaled(h: np.ndarray, factor: complex) -> np.ndarray:
    """exp(factor * H) for Hermitian H via eigendecomposition."""
    evals, evecs = np.linalg.eigh(h)
    return (evecs * np.exp(factor * evals)) @ evecs.conj().T


def unitary_exp(h, t: float) -> np.ndarray:
    """Propagator exp(-i 2 pi H t) for a Hamiltonian H in Hz and time t in s."""
    h = check_hermitian(h, tol=1e-10, name="Hamiltonian")
    return _expm_hermitian_scaled(h, -2j * math.pi * t)


def rotation_operator(spin: SpinQuantumNumber, direction: SphereDirection) -> np.ndarray:
    """Unitary taking |I, I> to the spin coherent state at ``direction``.

    Implements exp(-i theta n.I) with rotation axis n = (-sin phi, cos phi, 0);
    this sign convention is fixed by requiring exact agreement with the
    binomial expansion used by :func:`spin_coherent_state`.
    """
    ops = make_spin_operators(spin)
    generator = -math.sin(direction.phi) * ops.ix + math.cos(direction.phi) * ops.iy
    return _expm_hermitian_scaled(generator, -1j * direction.theta)


def spin_coherent_bank(spin: SpinQuantumNumber, thetas, phis) -> np.ndarray:
    """Amplitude rows of spin coherent states for paired angle arrays.

    thetas and phis must have equal length n; returns an (n, d) complex array
    whose row j is the coherent state at (thetas[j], phis[j]).
    """
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    phis = np.atleast_1d(np.asarray(phis, dtype=float))
    if thetas.shape != phis.shape:
        raise ConfigError("thetas and phis must have matching shapes")
    two_i = spin.two_i
    k = np.arange(two_i + 1)  # k = I - m, so m descends with k
    root_binom = np.sqrt([math.comb(two_i, int(a)) for a in k])
    half = thetas[:, None] / 2.0
    amps = (
        root_binom[None, :]
        * np.exp(1j * phis[:, None] * k[None, :])
        * np.cos(half) ** (two_i - k[None, :])
        * np.sin(half) ** k[None, :]
    )
    return amps


def spin_coherent_state(spin: SpinQuantumNumber, direction: SphereDirection) -> np.ndarray:
    """Spin coherent state |theta, phi> from the explicit binomial expansion.

    Amplitude on |I, m> is binom(2I, I+m)^(1/2) e^(i phi (I-m))
    cos(theta/2)^(I+m) sin(theta/2)^(I-m); satisfies <Iz> = I cos theta.
    """
    return spin_coherent_bank(spin, [direction.theta], [direction.phi])[0]


def rotated_operator_about_z(a, phi: float) -> np.ndarray:
    """Conjugation R(-phi) A R(phi) with R(phi) = exp(-i phi Iz).

    Works for any operator expressed in the descending-m basis; Iz is inferred
    from the matrix dimension.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ConfigError(f"operator must be square, got shape {a.shape}")
    d = a.shape[0]
    m = (d - 1) / 2.0 - np.arange(d)
    return a * np.exp(1j * phi * (m[:, None] - m[None, :]))


def husimi_q(rho, direction: SphereDirection, validate: bool = True) -> float:
    """Husimi Q value (1/pi) <theta,phi| rho |theta,phi>, in [0, 1/pi]."""
    rho = check_density_matrix(rho) if validate else np.asarray(rho, dtype=complex)
    spin = SpinQuantumNumber(rho.shape[0] - 1)
    c = spin_coherent_state(spin, direction)
    return float(np.real(c.conj() @ rho @ c)) / math.pi


def husimi_grid(rho, thetas, phis, validate: bool = True) -> np.ndarray:
    """Husimi Q on the outer grid thetas x phis; returns shape (len(thetas), len(phis))."""
    rho = check_density_matrix(rho) if validate else np.asarray(rho, dtype=complex)
    spin = SpinQuantumNumber(rho.shape[0] - 1)
    thetas = np.asarray(thetas, dtype=float)
    phis = np.asarray(phis, dtype=float)
    tt, pp = np.meshgrid(thetas, phis, indexing="ij")
    bank = spin_coherent_bank(spin, tt.ravel(), pp.ravel())
    q = np.einsum("nd,de,ne->n", bank.conj(), rho, bank).real / math.pi
    return q.reshape(tt.shape)


def purity(rho) -> float:
    """Tr(rho^2); 1 for pure states, 1/d for the maximally mixed state."""
    rho = check_density_matrix(rho)
    return float(np.real(np.vdot(rho, rho)))
