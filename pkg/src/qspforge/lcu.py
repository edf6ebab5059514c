"""Linear combination of unitaries and sparse-access block-encodings."""

from dataclasses import dataclass
from itertools import product

import numpy as np

from .circuit import CircuitIR, Gate, gate_count
from .dilation import _make
from .errors import (
    AllZero,
    DimensionNotPowerOfTwo,
    EntryOutOfRange,
    LengthMismatch,
    QSPForgeError,
    TooManyTerms,
)
from .linalg import _check_hermitian, pauli_matrix

DROP_TOL = 1e-12

__all__ = [
    "PauliTerm",
    "PauliHamiltonian",
    "pauli_decompose",
    "prepare_angles",
    "build_prepare",
    "build_select",
    "assemble_lcu",
    "sparse_block_encoding",
    "gate_count",
]


@dataclass(frozen=True)
class PauliTerm:
    coefficient: float
    string: str

    def __post_init__(self):
        s = self.string.upper()
        if any(c not in "IXYZ" for c in s):
            raise QSPForgeError(f"invalid Pauli string {self.string!r}")
        object.__setattr__(self, "string", s)
        object.__setattr__(self, "coefficient", float(self.coefficient))


class PauliHamiltonian:
    """Real-weighted sum of Pauli strings on ``qubit_count`` qubits.

    Duplicate strings are merged and zero coefficients dropped on
    construction, so ``terms`` is always canonical.
    """

    def __init__(self, terms, qubit_count=None):
        merged = {}
        order = []
        for t in terms:
            if not isinstance(t, PauliTerm):
                t = PauliTerm(*t)
            if t.string not in merged:
                order.append(t.string)
                merged[t.string] = 0.0
            merged[t.string] += t.coefficient
        lengths = {len(s) for s in order}
        if qubit_count is None:
            if len(lengths) != 1:
                raise LengthMismatch("cannot infer qubit count from Pauli strings")
            qubit_count = lengths.pop()
        elif lengths - {qubit_count}:
            raise LengthMismatch(f"Pauli strings do not all have length {qubit_count}")
        self.qubit_count = int(qubit_count)
        self.terms = tuple(PauliTerm(merged[s], s) for s in order if merged[s] != 0.0)

    @property
    def lam(self):
        """1-norm of the coefficients."""
        return float(sum(abs(t.coefficient) for t in self.terms))

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __repr__(self):
        body = " + ".join(f"{t.coefficient:g}*{t.string}" for t in self.terms)
        return f"PauliHamiltonian({self.qubit_count}q: {body})"

    def sorted_terms(self):
        """Terms by descending magnitude, ties broken by string."""
        return sorted(self.terms, key=lambda t: (-abs(t.coefficient), t.string))

    def to_matrix(self):
        dim = 2 ** self.qubit_count
        M = np.zeros((dim, dim), dtype=complex)
        for t in self.terms:
            M += t.coefficient * pauli_matrix(t.string)
        return M

    def as_multiset(self):
        return sorted((t.string, t.coefficient) for t in self.terms)


def pauli_decompose(M, n):
    """Expand Hermitian ``M`` over all ``4**n`` Pauli strings.

    Raises:
        DimensionNotPowerOfTwo: If ``M`` is not ``2**n`` square.
        NotHermitian: If ``M`` is not Hermitian.
    """
    M = np.asarray(M, dtype=complex)
    if M.shape != (2 ** n, 2 ** n):
        raise DimensionNotPowerOfTwo(f"matrix shape {M.shape} is not {2 ** n}x{2 ** n}")
    M = _check_hermitian(M)
    terms = []
    for letters in product("IXYZ", repeat=n):
        s = "".join(letters)
        c = np.sum(pauli_matrix(s).T * M).real / 2 ** n
        if abs(c) > DROP_TOL:
            terms.append(PauliTerm(c, s))
    return PauliHamiltonian(terms, n)


def _ancillas_for(count):
    return int(np.ceil(np.log2(count))) if count > 1 else 0


def prepare_angles(coeffs):
    """Ry angles of the binary-tree state preparation, breadth first.

    Node ``j`` at depth ``l`` splits its weight ``p`` between its children as
    ``cos(theta/2)**2 = p_left / p``. Empty subtrees get angle 0.

    Args:
        coeffs: Weights (absolute values are used), padded with zeros to a
            power of two.

    Returns:
        List of ``2**m - 1`` angles ordered root first, then each level left
        to right.

    Raises:
        AllZero: If every coefficient is zero.
    """
    w = np.abs(np.asarray(coeffs, dtype=float))
    if not np.any(w > 0):
        raise AllZero("all coefficients are zero")
    m = _ancillas_for(w.size)
    leaves = np.zeros(2 ** m)
    leaves[:w.size] = w
    angles = []
    for level in range(m):
        nodes = leaves.reshape(2 ** level, -1)
        half = nodes.shape[1] // 2
        for row in nodes:
            p = row.sum()
            if p <= 0:
                angles.append(0.0)
                continue
            ratio = min(max(row[:half].sum() / p, 0.0), 1.0)
            angles.append(2.0 * np.arccos(np.sqrt(ratio)))
    return angles


def build_prepare(angles, zero_tol=1e-14):
    """Circuit for the state preparation described by :func:`prepare_angles`.

    Zero angles emit no gate.

    Returns:
        Tuple ``(matrix, ir)``.
    """
    angles = list(angles)
    m = int(round(np.log2(len(angles) + 1)))
    if 2 ** m - 1 != len(angles):
        raise QSPForgeError("angle count must be 2**m - 1")
    ir = CircuitIR(m)
    k = 0
    for level in range(m):
        for j in range(2 ** level):
            theta = angles[k]
            k += 1
            if abs(theta) <= zero_tol:
                continue
            bits = tuple(int(b) for b in format(j, f"0{level}b")) if level else ()
            ir.add(Gate("ry", (level,), tuple(range(level)), bits, param=theta))
    if m == 0:
        return np.eye(1, dtype=complex), ir
    return ir.to_matrix(), ir


def build_select(H, ancilla_count=None):
    """Multiplexed Pauli application ``sum_k |k><k| x sign_k P_k``.

    Terms are taken in the order given by ``H.sorted_terms()``; unused
    ancilla values act as identity.

    Returns:
        Tuple ``(matrix, ir)`` with ancillas on wires ``0..m-1``.

    Raises:
        TooManyTerms: If ``ancilla_count`` is too small for the term count.
    """
    terms = H.sorted_terms()
    m = _ancillas_for(len(terms)) if ancilla_count is None else ancilla_count
    if len(terms) > 2 ** m:
        raise TooManyTerms(f"{len(terms)} terms need more than {m} ancillas")
    n = H.qubit_count
    ir = CircuitIR(m + n)
    for k, t in enumerate(terms):
        bits = tuple(int(b) for b in format(k, f"0{m}b")) if m else ()
        ir.add(Gate("mcpauli", tuple(range(m, m + n)), tuple(range(m)), bits,
                    pauli=t.string, phase=float(np.sign(t.coefficient))))
    return ir.to_matrix(), ir


def assemble_lcu(H):
    """Block-encode ``H / lambda`` as ``U_P^dagger U_S U_P``.

    The returned encoding's ``meta`` carries the prepare, select and full
    circuits plus the ordered terms.
    """
    terms = H.sorted_terms()
    if not terms:
        raise AllZero("Hamiltonian has no terms")
    m = _ancillas_for(len(terms))
    n = H.qubit_count
    angles = prepare_angles([t.coefficient for t in terms]) if m else []
    P, prep_ir = build_prepare(angles)
    S, sel_ir = build_select(H, m)
    Pf = np.kron(P, np.eye(2 ** n))
    U = Pf.conj().T @ S @ Pf
    full = CircuitIR(m + n)
    full.extend(prep_ir.gates)
    full.extend(sel_ir.gates)
    full.extend(prep_ir.inverse().gates)
    return _make(U, H.lam, 2 ** n, provenance="lcu", terms=terms, angles=angles,
                 prepare_ir=prep_ir, select_ir=sel_ir, circuit=full)


def _flag_rotation(a):
    s = np.sqrt(max(0.0, 1.0 - abs(a) ** 2))
    return np.array([[a, -s], [s, np.conj(a)]], dtype=complex)


def sparse_block_encoding(entry_oracle, n, structure):
    """Block-encode a banded matrix from entry and offset oracles.

    Registers, most significant first: one flag qubit, ``m`` offset-label
    qubits, ``n`` system qubits. The template is ``H^m U_a U_b H^m`` where
    ``U_b|l>|j> = |l>|(j + o_l) mod 2^n>`` and ``U_a`` rotates the flag by the
    entry ``A[i, i - o_l]``. The block on flag 0 and label 0 is ``A / 2^m``
    restricted to the given diagonals.

    Args:
        entry_oracle: Callable ``(row, col) -> complex`` with modulus <= 1.
        n: System qubit count.
        structure: Iterable of distinct diagonal offsets ``o_l``.

    Raises:
        EntryOutOfRange: If an oracle entry exceeds 1 in modulus.
    """
    offsets = [int(o) for o in structure]
    N = 2 ** n
    if not offsets:
        raise QSPForgeError("structure needs at least one offset")
    if len({o % N for o in offsets}) != len(offsets):
        raise QSPForgeError("offsets must be distinct modulo 2**n")
    L = len(offsets)
    m = _ancillas_for(L)
    Lp = 2 ** m
    padded = offsets + [0] * (Lp - L)

    Ub = np.zeros((Lp * N, Lp * N), dtype=complex)
    for l, o in enumerate(padded):
        for y in range(N):
            Ub[l * N + (y + o) % N, l * N + y] = 1.0

    Ua = np.zeros((2 * Lp * N, 2 * Lp * N), dtype=complex)
    half = Lp * N
    for l, o in enumerate(padded):
        for i in range(N):
            a = complex(entry_oracle(i, (i - o) % N)) if l < L else 0.0
            if abs(a) > 1 + 1e-12:
                raise EntryOutOfRange(f"|A[{i},{(i - o) % N}]| = {abs(a):.6g} > 1")
            R = _flag_rotation(a)
            k = l * N + i
            Ua[np.ix_([k, half + k], [k, half + k])] = R

    ir = CircuitIR(1 + m + n)
    label = tuple(range(1, 1 + m))
    ir.extend(Gate("h", (w,)) for w in label)
    ir.add(Gate("unitary", tuple(range(1, 1 + m + n)), matrix=Ub))
    ir.add(Gate("unitary", tuple(range(1 + m + n)), matrix=Ua))
    ir.extend(Gate("h", (w,)) for w in label)
    U = ir.to_matrix()
    return _make(U, float(Lp), N, provenance="sparse", offsets=offsets, circuit=ir)
