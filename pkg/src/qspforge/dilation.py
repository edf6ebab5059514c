"""Unitary dilations of contractions and the BlockEncoding container.

A block-encoding stores a unitary ``U`` together with the location of an
``N x N`` block equal to ``A / alpha``. Ancilla registers are the most
significant qubits, so the block at ancilla row pattern ``r`` and column
pattern ``c`` is ``U[r*N:(r+1)*N, c*N:(c+1)*N]``.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import AlphaTooSmall, BadBlockStructure, NotContraction
from .linalg import (
    as_matrix,
    dagger,
    is_power_of_two,
    numerical_rank,
    psd_sqrt,
    spectral_norm,
    RANK_TOL,
    _check_hermitian,
)

CONTRACTION_TOL = 1e-12
DEFECT_TOL = 1e-14


@dataclass(frozen=True)
class BlockEncoding:
    """Unitary with a designated block holding ``A / alpha``.

    Attributes:
        unitary: Square unitary matrix.
        alpha: Subnormalization; the encoded operator is ``alpha * block``.
        system_dim: Size N of the encoded block.
        row_block: Block-row index (in units of N) of the payload.
        col_block: Block-column index (in units of N) of the payload.
        provenance: Short tag naming the construction.
        meta: Free-form extra bookkeeping (never used for numerics).
    """

    unitary: np.ndarray
    alpha: float
    system_dim: int
    row_block: int = 0
    col_block: int = 0
    provenance: str = ""
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def dim(self):
        return self.unitary.shape[0]

    @property
    def ancilla_count(self):
        ratio = self.dim / self.system_dim
        return int(np.ceil(np.log2(ratio) - 1e-12)) if ratio > 1 else 0

    @property
    def simulable(self):
        """True when the unitary acts on ``ancilla_count`` qubits times the system."""
        return (
            is_power_of_two(self.system_dim)
            and self.dim == 2 ** self.ancilla_count * self.system_dim
        )

    @property
    def block_locator(self):
        """Ancilla bitstrings (row, column) selecting the payload block."""
        m = self.ancilla_count
        if not self.simulable:
            return (str(self.row_block), str(self.col_block))
        if m == 0:
            return ("", "")
        return (format(self.row_block, f"0{m}b"), format(self.col_block, f"0{m}b"))

    def block(self):
        return extract_block(self)

    def with_unitary(self, U, **changes):
        return replace(self, unitary=U, **changes)


def _make(U, alpha, N, row=0, col=0, provenance="", **meta):
    U = np.asarray(U, dtype=complex)
    U.setflags(write=False)
    return BlockEncoding(U, float(alpha), int(N), row, col, provenance, meta)


def extract_block(be):
    """Return the N x N payload block ``A / alpha`` selected by the locator."""
    N = be.system_dim
    r, c = be.row_block * N, be.col_block * N
    return np.array(be.unitary[r:r + N, c:c + N])


def _check_alpha(A, alpha):
    nrm = spectral_norm(A)
    if alpha <= 0 or nrm > alpha * (1 + CONTRACTION_TOL) + CONTRACTION_TOL:
        raise AlphaTooSmall(f"alpha={alpha} is below the spectral norm {nrm}")


def _check_contraction(A):
    nrm = spectral_norm(A)
    if nrm > 1 + CONTRACTION_TOL:
        raise NotContraction(f"spectral norm {nrm} exceeds 1")


def _defect_roots(A):
    """``sqrt(I - A A^dagger)`` and ``sqrt(I - A^dagger A)`` from one SVD.

    Returns:
        Tuple ``(W, Zh, S, T)`` with ``A = W diag(s) Zh``.
    """
    W, s, Zh = np.linalg.svd(A)
    # Defects at roundoff level are zeroed; their square roots would not be.
    defect = np.clip((1 - s) * (1 + s), 0.0, None)
    defect[defect < DEFECT_TOL] = 0.0
    root = np.sqrt(defect)
    return W, Zh, (W * root) @ dagger(W), (dagger(Zh) * root) @ Zh


def hermitian_dilation(H, alpha):
    """Encode Hermitian ``H / alpha`` as ``[[H/a, S], [S, -H/a]]``.

    The result is Hermitian as well as unitary, which is what the
    reflection-based polynomial routines in :mod:`qspforge.qsp` expect.

    Raises:
        NotHermitian: If ``H`` is not Hermitian.
        AlphaTooSmall: If ``alpha < ||H||``.
    """
    H = _check_hermitian(H)
    _check_alpha(H, alpha)
    N = H.shape[0]
    Hs = H / alpha
    S = psd_sqrt(np.eye(N) - Hs @ Hs, tol=1e-9)
    U = np.block([[Hs, S], [S, -Hs]])
    return _make(U, alpha, N, provenance="hermitian")


def polar_dilation(A, phase=0.0):
    """Two-block dilation built from the left polar decomposition ``A = P V``.

    Returns ``[[A, e^{-i phase} S], [-e^{i phase} V^dagger S V, A^dagger]]``
    with ``S = sqrt(I - P^2) = sqrt(I - A A^dagger)``. The lower-left defect
    ``V^dagger S V`` equals ``sqrt(I - A^dagger A)``, which keeps the result
    unitary for non-normal ``A``; for normal ``A`` it reduces to ``S``.

    Raises:
        NotContraction: If ``||A|| > 1``.
    """
    A = as_matrix(A)
    _check_contraction(A)
    N = A.shape[0]
    W, Zh, S, T = _defect_roots(A)
    V = W @ Zh
    U = np.block([
        [A, np.exp(-1j * phase) * S],
        [-np.exp(1j * phase) * T, dagger(A)],
    ])
    return _make(U, 1.0, N, provenance="polar", polar_unitary=V)


def hermitian_embed(A):
    """Return the Hermitian matrix ``[[0, A], [A^dagger, 0]]``.

    Rectangular ``A`` (m x n) gives an (m+n) square result.
    """
    A = as_matrix(A)
    m, n = A.shape
    return np.block([[np.zeros((m, m)), A], [dagger(A), np.zeros((n, n))]])


def four_block_dilation(A, alpha=1.0, move_to_diagonal=False):
    """Hermitian 4N dilation of a general ``A`` through its Hermitian embedding.

    ``A / alpha`` sits in block (0, 1). With ``move_to_diagonal`` the columns
    are multiplied by ``I (x) X (x) I`` so the payload lands in block (0, 0).

    Raises:
        AlphaTooSmall: If ``alpha < ||A||``.
    """
    A = as_matrix(A)
    N = A.shape[0]
    if A.shape != (N, N):
        raise BadBlockStructure("four_block_dilation needs a square matrix")
    _check_alpha(A, alpha)
    Aa = A / alpha
    I = np.eye(N)
    _, _, P, Q = _defect_roots(Aa)
    O = np.zeros((N, N))
    U = np.block([
        [O, Aa, P, O],
        [dagger(Aa), O, O, Q],
        [P, O, O, -Aa],
        [O, Q, -dagger(Aa), O],
    ])
    if move_to_diagonal:
        swap = np.kron(np.kron(np.eye(2), np.array([[0, 1], [1, 0]])), I)
        return _make(U @ swap, alpha, N, 0, 0, provenance="four-block-diag")
    return _make(U, alpha, N, 0, 1, provenance="four-block")


def minimal_dilation(A, tol=RANK_TOL):
    """Smallest unitary dilation, of size ``N + rank(I - A^dagger A)``.

    Uses the factorization ``I - A A^dagger = X diag(I, 0) X^dagger`` and
    ``I - A^dagger A = Y^dagger diag(0, I) Y`` with ``X`` and ``Y`` read off
    eigendecompositions (eigenvalues descending for ``X``, ascending for
    ``Y``, so the nonzero part sits where each identity block expects it).

    Raises:
        NotContraction: If ``||A|| > 1``.
    """
    A = as_matrix(A)
    _check_contraction(A)
    N = A.shape[0]
    I = np.eye(N)
    delta = numerical_rank(I - dagger(A) @ A, tol)
    if delta == 0:
        return _make(A, 1.0, N, provenance="minimal", delta=0)

    lam, VX = np.linalg.eigh(I - A @ dagger(A))
    lam, VX = lam[::-1], VX[:, ::-1]
    sx = np.ones(N)
    sx[:delta] = np.sqrt(np.clip(lam[:delta], 0, None))
    X = VX * sx

    mu, VY = np.linalg.eigh(I - dagger(A) @ A)
    sy = np.ones(N)
    sy[N - delta:] = np.sqrt(np.clip(mu[N - delta:], 0, None))
    Y = sy[:, None] * dagger(VY)

    B = X[:, :delta]
    C = -Y[N - delta:, :]
    Xinv_h = np.linalg.inv(dagger(X))
    D = Y[N - delta:, :] @ dagger(A) @ Xinv_h[:, :delta]
    U = np.block([[A, B], [C, D]])
    return _make(U, 1.0, N, provenance="minimal", delta=delta)


def chain_dilation(be, k):
    """Lift a dilation ``[[A, Z12], [Z21, Z22]]`` to the k-step chain form.

    The complement size is ``M = dim(U) - N`` (``M = N`` for the usual 2N
    dilations), giving an ``N + k M`` unitary whose top-left block is still
    ``A`` and whose middle rows are shifted identities.

    Raises:
        BadBlockStructure: If the payload is not the top-left block or ``k < 2``.
    """
    if k < 2:
        raise BadBlockStructure("chain length k must be at least 2")
    if be.row_block != 0 or be.col_block != 0:
        raise BadBlockStructure("payload must sit in the top-left block")
    U = be.unitary
    N = be.system_dim
    M = U.shape[0] - N
    if M < 0:
        raise BadBlockStructure("unitary is smaller than its payload")
    if M == 0:
        return be
    D = N + k * M
    V = np.zeros((D, D), dtype=complex)
    V[:N, :N + M] = U[:N, :]
    for j in range(k - 1):
        r = N + j * M
        V[r:r + M, r + M:r + 2 * M] = np.eye(M)
    V[D - M:, :N + M] = U[N:, :]
    return _make(V, be.alpha, N, provenance=f"chain(k={k})<-{be.provenance}", k=k)
