"""Dense complex linear algebra shared by every other module.

Matrices are plain ``numpy`` arrays of dtype complex128. Qubit ordering is
big-endian throughout: wire 0 is the most significant bit of a basis index.
"""

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import NegativeEigenvalue, NotHermitian, QSPForgeError

HERMITIAN_TOL = 1e-10
RANK_TOL = 1e-10

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
PAULI = {"I": I2, "X": X, "Y": Y, "Z": Z}


def as_matrix(M):
    """Coerce to a finite 2-D complex array.

    Raises:
        QSPForgeError: If ``M`` is not 2-D or holds NaN/Inf.
    """
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2:
        raise QSPForgeError(f"expected a 2-D matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise QSPForgeError("matrix has non-finite entries")
    return M


def dagger(M):
    return np.conj(M).T


def is_hermitian(M, tol=HERMITIAN_TOL):
    M = np.asarray(M)
    return M.shape[0] == M.shape[1] and np.max(np.abs(M - dagger(M)), initial=0.0) <= tol


def unitarity_residual(U):
    """Frobenius norm of U U^dagger - I."""
    U = np.asarray(U)
    return np.linalg.norm(U @ dagger(U) - np.eye(U.shape[0]))


def is_unitary(U, tol=1e-10):
    U = np.asarray(U)
    return U.ndim == 2 and U.shape[0] == U.shape[1] and unitarity_residual(U) <= tol


def _check_hermitian(M, tol=HERMITIAN_TOL):
    M = as_matrix(M)
    if not is_hermitian(M, tol):
        raise NotHermitian("matrix is not Hermitian")
    return (M + dagger(M)) / 2


def psd_sqrt(M, tol=HERMITIAN_TOL):
    """Principal square root of a positive semidefinite Hermitian matrix.

    Eigenvalues in ``[-tol, 0)`` are treated as roundoff and clamped to zero.

    Args:
        M: Hermitian matrix.
        tol: Hermiticity and negativity tolerance.

    Returns:
        Hermitian S with S @ S == M.

    Raises:
        NotHermitian: If ``M`` is not Hermitian within ``tol``.
        NegativeEigenvalue: If an eigenvalue lies below ``-tol``.
    """
    M = _check_hermitian(M, tol)
    w, V = np.linalg.eigh(M)
    if w.size and w.min() < -tol:
        raise NegativeEigenvalue(f"eigenvalue {w.min():.3e} below -{tol:g}")
    w = np.sqrt(np.clip(w, 0.0, None))
    S = (V * w) @ dagger(V)
    return (S + dagger(S)) / 2


def matrix_exponential(H, t):
    """Return exp(-i H t) for Hermitian ``H`` via full diagonalization.

    Raises:
        NotHermitian: If ``H`` is not Hermitian.
    """
    H = _check_hermitian(H)
    w, V = np.linalg.eigh(H)
    return (V * np.exp(-1j * w * t)) @ dagger(V)


def spectral_norm(M):
    """Largest singular value."""
    M = np.asarray(M, dtype=complex)
    if M.size == 0:
        return 0.0
    return float(np.linalg.svd(M, compute_uv=False)[0])


def numerical_rank(M, tol=RANK_TOL):
    """Number of singular values strictly above ``tol``."""
    if tol <= 0:
        raise QSPForgeError("tol must be positive")
    M = np.asarray(M, dtype=complex)
    if M.size == 0:
        return 0
    return int(np.sum(np.linalg.svd(M, compute_uv=False) > tol))


def kron_all(*mats):
    return reduce(np.kron, mats, np.eye(1, dtype=complex))


def pauli_matrix(string):
    """Dense matrix of a Pauli word such as ``"XZI"`` (leftmost = wire 0)."""
    return kron_all(*(PAULI[c] for c in string))


def is_power_of_two(n):
    return n >= 1 and (n & (n - 1)) == 0


def haar_unitary(n, rng):
    """Haar-random n x n unitary from the QR of a complex Ginibre matrix."""
    G = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    Q, R = np.linalg.qr(G)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def random_contraction(n, rng, norm=None):
    """Random n x n matrix with spectral norm ``norm`` (uniform in (0, 1) by default)."""
    A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    if norm is None:
        norm = rng.uniform(0.05, 1.0)
    return A * (norm / spectral_norm(A))


def random_hermitian(n, rng):
    A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (A + dagger(A)) / 2


@dataclass(frozen=True)
class QuantumState:
    """Normalized state vector on ``qubit_count`` qubits."""

    qubit_count: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != 2 ** self.qubit_count:
            raise QSPForgeError(
                f"{amps.size} amplitudes do not fit {self.qubit_count} qubits")
        if abs(np.vdot(amps, amps).real - 1.0) > 1e-10:
            raise QSPForgeError("state is not normalized")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_vector(cls, vec, normalize=False):
        vec = np.asarray(vec, dtype=complex).reshape(-1)
        n = int(round(np.log2(vec.size)))
        if 2 ** n != vec.size:
            raise QSPForgeError("length is not a power of two")
        if normalize:
            nrm = np.linalg.norm(vec)
            if nrm == 0:
                raise QSPForgeError("cannot normalize the zero vector")
            vec = vec / nrm
        return cls(n, vec)

    @classmethod
    def basis(cls, bits):
        """Computational basis state from a bitstring like ``"010"``."""
        n = len(bits)
        vec = np.zeros(2 ** n, dtype=complex)
        vec[int(bits, 2) if n else 0] = 1.0
        return cls(n, vec)

    def probabilities(self):
        return np.abs(self.amplitudes) ** 2
