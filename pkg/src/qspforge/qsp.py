"""Phase sequences and their evaluation.

Two conventions are supported:

* ``"qsp-wx"``: ``U(x) = S(phi_0) W(x) S(phi_1) ... W(x) S(phi_d)`` with
  ``W(x) = [[x, i sqrt(1-x^2)], [i sqrt(1-x^2), x]]`` and ``S(phi) = exp(i phi Z)``.
  Then ``U = [[P, i Q sqrt(1-x^2)], [i Q* sqrt(1-x^2), P*]]`` where ``*``
  conjugates the coefficients.
* ``"gqsp"``: ``R_d A ... R_1 A R_0`` with ``A = diag(U, I)`` (the signal
  fires on ancilla 0) and ``R(theta, phi, lam)`` the general SU(2)-like
  rotation; only ``R_0`` carries ``lam``.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from .dilation import _make, extract_block
from .errors import (
    ConventionMismatch,
    NotHermitianPayload,
    NotUnitary,
    QSPForgeError,
    XOutOfRange,
)
from .linalg import is_hermitian, is_unitary
from .polynomial import Polynomial, interpolate

QSP_WX = "qsp-wx"
GQSP = "gqsp"


@dataclass(frozen=True)
class PhaseSequence:
    """Phase data tagged with its convention.

    For ``qsp-wx`` only ``phases`` is used. For ``gqsp`` the rotation angles
    live in ``thetas`` and ``phis`` (one per layer, ``k = 0..d``) plus the
    single ``lam``.
    """

    convention: str
    phases: np.ndarray = field(default_factory=lambda: np.zeros(0))
    thetas: np.ndarray = field(default_factory=lambda: np.zeros(0))
    phis: np.ndarray = field(default_factory=lambda: np.zeros(0))
    lam: float = 0.0

    def __post_init__(self):
        conv = self.convention.lower()
        if conv in ("qsp", "wx"):
            conv = QSP_WX
        if conv not in (QSP_WX, GQSP):
            raise QSPForgeError(f"unknown convention {self.convention!r}")
        object.__setattr__(self, "convention", conv)
        for name in ("phases", "thetas", "phis"):
            arr = np.atleast_1d(np.asarray(getattr(self, name), dtype=float)).copy()
            if not np.all(np.isfinite(arr)):
                raise QSPForgeError(f"{name} must be finite")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if not np.isfinite(self.lam):
            raise QSPForgeError("lam must be finite")
        object.__setattr__(self, "lam", float(self.lam))
        if conv == QSP_WX and self.phases.size == 0:
            raise QSPForgeError("qsp-wx sequence needs at least one phase")
        if conv == GQSP:
            if self.thetas.size == 0 or self.thetas.size != self.phis.size:
                raise QSPForgeError("gqsp sequence needs equal, non-empty thetas and phis")

    @classmethod
    def qsp(cls, phases):
        return cls(QSP_WX, phases=phases)

    @classmethod
    def gqsp(cls, thetas, phis, lam=0.0):
        return cls(GQSP, thetas=thetas, phis=phis, lam=lam)

    @property
    def degree(self):
        n = self.phases.size if self.convention == QSP_WX else self.thetas.size
        return n - 1

    def to_dict(self):
        d = {"convention": self.convention, "phases": self.phases.tolist()}
        if self.convention == GQSP:
            d["phases"] = []
            d["gqsp"] = {"thetas": self.thetas.tolist(), "phis": self.phis.tolist(),
                         "lambda": self.lam}
        return d

    @classmethod
    def from_dict(cls, d):
        try:
            conv = d["convention"]
            if str(conv).lower() == GQSP:
                g = d["gqsp"]
                return cls.gqsp(g["thetas"], g["phis"], g.get("lambda", 0.0))
            return cls.qsp(d["phases"])
        except (KeyError, TypeError) as exc:
            raise QSPForgeError(f"malformed phase record: {exc}") from exc


# ---------------------------------------------------------------- QSP-Wx

def _check_x(x):
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1 + 1e-12):
        raise XOutOfRange("x must lie in [-1, 1]")
    return np.clip(x, -1.0, 1.0)


def signal_w(x):
    s = np.sqrt(1 - x * x)
    return np.array([[x, 1j * s], [1j * s, x]], dtype=complex)


def qsp_products(phases, x):
    """Batched QSP-Wx unitaries, shape ``(len(x), 2, 2)``."""
    x = _check_x(np.atleast_1d(x))
    phases = np.asarray(phases, dtype=float)
    s = np.sqrt(1 - x * x)
    e = np.exp(1j * phases[0])
    # Start from S(phi_0) and right-multiply W S(phi_k).
    U = np.zeros((x.size, 2, 2), dtype=complex)
    U[:, 0, 0] = e
    U[:, 1, 1] = np.conj(e)
    Wm = np.zeros_like(U)
    Wm[:, 0, 0] = Wm[:, 1, 1] = x
    Wm[:, 0, 1] = Wm[:, 1, 0] = 1j * s
    for phi in phases[1:]:
        U = U @ Wm
        f = np.exp(1j * phi)
        U[:, :, 0] *= f
        U[:, :, 1] *= np.conj(f)
    return U


def qsp_unitary(seq, x):
    """2x2 QSP-Wx unitary at a single ``x`` in [-1, 1].

    Raises:
        XOutOfRange: If ``|x| > 1``.
        ConventionMismatch: For a GQSP sequence.
    """
    if seq.convention != QSP_WX:
        raise ConventionMismatch("qsp_unitary needs a qsp-wx sequence")
    if abs(float(x)) > 1 + 1e-12:
        raise XOutOfRange(f"x={x} outside [-1, 1]")
    return qsp_products(seq.phases, np.array([float(x)]))[0]


def qsp_response(phases, x):
    """Top-left entry P(x) of the QSP-Wx unitary on a grid."""
    return qsp_products(phases, x)[:, 0, 0]


def extract_pq(seq):
    """Recover P and Q of a QSP-Wx sequence by Chebyshev interpolation.

    Returns:
        ``(P, Q)`` in the Chebyshev basis with parities ``d mod 2`` and
        ``(d - 1) mod 2``. For ``d = 0`` the returned Q is the zero polynomial.
    """
    if seq.convention != QSP_WX:
        raise ConventionMismatch("extract_pq needs a qsp-wx sequence")
    d = seq.degree
    par = "even" if d % 2 == 0 else "odd"
    P = interpolate(lambda x: qsp_response(seq.phases, x), d, par)
    if d == 0:
        return P, Polynomial([0.0], "chebyshev", "even")

    def q_vals(x):
        U = qsp_products(seq.phases, x)
        return U[:, 0, 1] / (1j * np.sqrt(1 - x * x))

    Q = interpolate(q_vals, d - 1, "odd" if par == "even" else "even")
    return P, Q


def mqsp_unitary(s, phases, xA, xB):
    """Two-variable QSP with signals interleaved by the binary word ``s``.

    ``s[k] = 1`` applies ``W(xA)`` before ``S(phi_{k+1})``; ``0`` applies ``W(xB)``.

    Raises:
        XOutOfRange: If either signal lies outside [-1, 1].
    """
    phases = np.asarray(phases, dtype=float)
    s = [int(b) for b in s]
    if len(s) != phases.size - 1:
        raise QSPForgeError("need len(s) == len(phases) - 1")
    for v in (xA, xB):
        if abs(v) > 1 + 1e-12:
            raise XOutOfRange(f"signal {v} outside [-1, 1]")
    WA, WB = signal_w(np.clip(xA, -1, 1)), signal_w(np.clip(xB, -1, 1))
    U = np.diag([np.exp(1j * phases[0]), np.exp(-1j * phases[0])])
    for bit, phi in zip(s, phases[1:]):
        U = U @ (WA if bit else WB) @ np.diag([np.exp(1j * phi), np.exp(-1j * phi)])
    return U


def perturb_phases(seq, epsilon):
    """Coherent over-rotation: every stored angle becomes ``(1 + epsilon) * angle``."""
    f = 1.0 + epsilon
    if seq.convention == QSP_WX:
        return replace(seq, phases=seq.phases * f)
    return replace(seq, thetas=seq.thetas * f, phis=seq.phis * f, lam=seq.lam * f)


# ---------------------------------------------------------------- GQSP

def gqsp_rotation(theta, phi, lam=0.0):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([
        [np.exp(1j * (lam + phi)) * c, np.exp(1j * phi) * s],
        [np.exp(1j * lam) * s, -c],
    ], dtype=complex)


def gqsp_polynomials(seq):
    """Coefficient vectors (in powers of z) of P and Q for a GQSP sequence.

    The first column of the GQSP unitary at signal eigenvalue ``z`` is
    ``(P(z), Q(z))``.
    """
    if seq.convention != GQSP:
        raise ConventionMismatch("gqsp_polynomials needs a gqsp sequence")
    d = seq.degree
    R0 = gqsp_rotation(seq.thetas[0], seq.phis[0], seq.lam)
    p = np.zeros(d + 1, dtype=complex)
    q = np.zeros(d + 1, dtype=complex)
    p[0], q[0] = R0[0, 0], R0[1, 0]
    for k in range(1, d + 1):
        p = np.roll(p, 1)  # multiply the signal branch by z
        R = gqsp_rotation(seq.thetas[k], seq.phis[k])
        p, q = R[0, 0] * p + R[0, 1] * q, R[1, 0] * p + R[1, 1] * q
    return p, q


def gqsp_unitary(seq, U):
    """Full GQSP circuit unitary for signal ``U`` (ancilla most significant).

    Raises:
        NotUnitary: If ``U`` is not unitary within 1e-10.
    """
    if seq.convention != GQSP:
        raise ConventionMismatch("gqsp_unitary needs a gqsp sequence")
    U = np.atleast_2d(np.asarray(U, dtype=complex))
    if not is_unitary(U, 1e-10):
        raise NotUnitary("signal operator is not unitary")
    N = U.shape[0]
    out = np.kron(gqsp_rotation(seq.thetas[0], seq.phis[0], seq.lam), np.eye(N))
    top, bot = out[:N], out[N:]
    for k in range(1, seq.degree + 1):
        R = gqsp_rotation(seq.thetas[k], seq.phis[k])
        top = U @ top  # signal fires on ancilla 0 only
        top, bot = R[0, 0] * top + R[0, 1] * bot, R[1, 0] * top + R[1, 1] * bot
    return np.vstack([top, bot])


def un_qsp_evaluate(R_list, V0, U, ancilla_qubits):
    """Multi-qubit-ancilla QSP product ``R_L C(U) ... R_1 C(U) V0``.

    ``C(U)`` applies ``U`` when the ancilla register is all zeros. Each
    ``R_l`` and ``V0`` act on the ancilla register only.

    Raises:
        NotUnitary: If ``U``, ``V0`` or any ``R_l`` is not unitary.
    """
    U = np.atleast_2d(np.asarray(U, dtype=complex))
    if not is_unitary(U, 1e-10):
        raise NotUnitary("signal operator is not unitary")
    D = 2 ** ancilla_qubits
    V0 = np.asarray(V0, dtype=complex)
    for R in list(R_list) + [V0]:
        if np.asarray(R).shape != (D, D) or not is_unitary(R, 1e-10):
            raise NotUnitary("ancilla rotations must be 2^n-dimensional unitaries")
    N = U.shape[0]
    I = np.eye(N)
    C = np.eye(D * N, dtype=complex)
    C[:N, :N] = U
    out = np.kron(V0, I)
    for R in R_list:
        out = np.kron(R, I) @ C @ out
    return out


# ---------------------------------------------------------------- block-encodings

def _reflection(be):
    """Diagonal of ``2 Pi - I`` where Pi projects onto the payload rows."""
    D, N = be.dim, be.system_dim
    diag = -np.ones(D)
    r = be.row_block * N
    diag[r:r + N] = 1.0
    return diag


def check_reflection_ready(be):
    """Validate that ``be`` can drive reflection-based QSP.

    Raises:
        NotHermitianPayload: If the encoded block is not Hermitian.
        ConventionMismatch: If the unitary is not Hermitian or the payload is
            off the block diagonal.
    """
    A = extract_block(be)
    if not is_hermitian(A, 1e-9):
        raise NotHermitianPayload("payload block is not Hermitian")
    if be.row_block != be.col_block or not is_hermitian(be.unitary, 1e-9):
        raise ConventionMismatch(
            "reflection-based QSP needs a Hermitian unitary with the payload on the "
            "diagonal; wrap the encoding with assembly.hermitize first")


def walk_operator(be):
    """Qubitization walk ``W = (2 Pi - I) U`` for a Hermitian block-encoding."""
    check_reflection_ready(be)
    return _reflection(be)[:, None] * be.unitary


def apply_qsp_to_block_encoding(be, seq):
    """Apply a phase sequence to a block-encoding.

    For ``qsp-wx`` the circuit is
    ``e^{i phi_0 Z_Pi} prod_k (Z_Pi U) e^{i phi_k Z_Pi}`` with ``Z_Pi = 2 Pi - I``;
    its payload block is ``P(A/alpha)``. The encoding must be Hermitian as a
    unitary (true for Hermitian dilations and Pauli LCUs).

    For ``gqsp`` the whole unitary is the signal, and the result encodes
    ``P(U)`` on one extra ancilla.

    Raises:
        NotHermitianPayload: If a qsp-wx payload is not Hermitian.
        ConventionMismatch: If the encoding cannot drive the chosen convention.
    """
    if seq.convention == GQSP:
        if be.ancilla_count:
            raise ConventionMismatch(
                "gqsp acts on the full unitary; pass an encoding without ancillas "
                "or use the walk-based transforms")
        G = gqsp_unitary(seq, be.unitary)
        return _make(G, 1.0, be.dim, provenance=f"gqsp(d={seq.degree})<-{be.provenance}")
    check_reflection_ready(be)
    refl = _reflection(be)
    U = be.unitary
    phases = seq.phases

    def zphase(phi):
        return np.exp(1j * phi * refl)

    out = zphase(phases[0])[:, None] * np.eye(be.dim, dtype=complex)
    for phi in phases[1:]:
        out = (out * refl[None, :]) @ U
        out = out * zphase(phi)[None, :]
    return _make(out, 1.0, be.system_dim, be.row_block, be.col_block,
                 provenance=f"qsp-wx(d={seq.degree})<-{be.provenance}")
