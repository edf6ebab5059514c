import numpy as np
import pytest

from conftest import random_hermitian, random_state
from qspforge.circuit import CircuitIR
from qspforge.dilation import extract_block
from qspforge.errors import AllZero, EntryOutOfRange, NotHermitian, TooManyTerms
from qspforge.estimate import apply_encoding, postselect
from qspforge.io import load_h2_fixture
from qspforge.lcu import (
    PauliHamiltonian,
    PauliTerm,
    assemble_lcu,
    build_prepare,
    build_select,
    gate_count,
    pauli_decompose,
    prepare_angles,
    sparse_block_encoding,
)

P = {
    "I": np.eye(2),
    "X": np.array([[0, 1], [1, 0]]),
    "Y": np.array([[0, -1j], [1j, 0]]),
    "Z": np.diag([1, -1]),
}


def dense(string):
    out = np.eye(1)
    for c in string:
        out = np.kron(out, P[c])
    return out


def ising3_by_hand(J=1.0, g=0.25):
    return J * (dense("ZZI") + dense("IZZ")) + g * (dense("XII") + dense("IXI") + dense("IIX"))


ISING3 = PauliHamiltonian([(1.0, "ZZI"), (1.0, "IZZ"), (0.25, "XII"),
                           (0.25, "IXI"), (0.25, "IIX")])


def test_pauli_hamiltonian_canonical():
    H = PauliHamiltonian([(1.0, "ZZ"), (0.5, "ZZ"), (0.0, "XX"), (-2.0, "XI")])
    assert H.as_multiset() == [("XI", -2.0), ("ZZ", 1.5)]
    assert H.lam == pytest.approx(3.5)


def test_pauli_decompose_examples(rng):
    H = pauli_decompose(np.diag([1.0, -1.0]), 1)
    assert H.as_multiset() == [("Z", 1.0)]
    H = pauli_decompose(ising3_by_hand(), 3)
    assert [(s, round(c, 12)) for s, c in H.as_multiset()] == sorted(
        [("ZZI", 1.0), ("IZZ", 1.0), ("XII", 0.25), ("IXI", 0.25), ("IIX", 0.25)])
    M = random_hermitian(rng, 4)
    assert np.max(np.abs(pauli_decompose(M, 2).to_matrix() - M)) <= 1e-10
    with pytest.raises(NotHermitian):
        pauli_decompose(np.array([[0, 1], [0, 0]]), 1)


def test_prepare_angles_ising3_tree():
    angles = prepare_angles([1, 1, 0.25, 0.25, 0.25])
    expect = [0.613, 0.927, 0.0, np.pi / 2, np.pi / 2, 0.0, 0.0]
    assert np.max(np.abs(np.array(angles) - expect)) <= 5e-3
    # Exact values from the tree weights.
    assert angles[0] == pytest.approx(2 * np.arccos(np.sqrt(2.5 / 2.75)))
    assert angles[1] == pytest.approx(2 * np.arccos(np.sqrt(2 / 2.5)))


def test_prepare_angles_trivial_and_errors():
    assert prepare_angles([1.0]) == []
    assert prepare_angles([1.0, 0.0, 0.0, 0.0]) == [0.0, 0.0, 0.0]
    with pytest.raises(AllZero):
        prepare_angles([0.0, 0.0])


def test_prepare_two_terms_amplitudes():
    M, ir = build_prepare(prepare_angles([1, 1]))
    assert np.allclose(ir.apply(np.array([1.0, 0.0])), [1 / np.sqrt(2)] * 2)
    assert np.allclose(M[:, 0], [1 / np.sqrt(2)] * 2)


def test_prepare_ising3_amplitudes_and_gate_count():
    coeffs = [t.coefficient for t in ISING3.sorted_terms()]
    M, ir = build_prepare(prepare_angles(coeffs))
    expect = np.zeros(8)
    expect[:5] = np.sqrt(np.abs(coeffs) / 2.75)
    assert np.max(np.abs(M[:, 0] - expect)) <= 1e-10
    assert np.max(np.abs(ir.to_matrix() - M)) <= 1e-10
    assert gate_count(ir)["ry"] == 4


def test_select_single_term_and_ising3():
    M, ir = build_select(PauliHamiltonian([(1.0, "X")]))
    assert np.allclose(M, P["X"])
    M, ir = build_select(ISING3)
    assert gate_count(ir)["mcpauli"] == 5
    assert np.linalg.norm(M @ M.conj().T - np.eye(64)) <= 1e-10
    # Block k applies term k of the sorted order.
    for k, t in enumerate(ISING3.sorted_terms()):
        assert np.allclose(M[8 * k:8 * k + 8, 8 * k:8 * k + 8], np.sign(t.coefficient) * dense(t.string))
    assert np.allclose(M[40:, 40:], np.eye(24))


def test_select_too_many_terms():
    with pytest.raises(TooManyTerms):
        build_select(ISING3, ancilla_count=2)


def test_gate_count_empty():
    counts = gate_count(CircuitIR(2))
    assert all(counts[k] == 0 for k in ("ry", "h", "x", "mcpauli", "unitary"))


def test_assemble_lcu_examples():
    be = assemble_lcu(PauliHamiltonian([(1.0, "Z")]))
    assert be.alpha == 1.0 and np.allclose(extract_block(be), P["Z"])
    be = assemble_lcu(ISING3)
    assert be.alpha == pytest.approx(2.75) and be.ancilla_count == 3
    assert np.max(np.abs(extract_block(be) - ising3_by_hand() / 2.75)) <= 1e-9


def test_assemble_lcu_h2():
    H = load_h2_fixture()
    be = assemble_lcu(H)
    assert np.max(np.abs(be.alpha * extract_block(be) - H.to_matrix())) <= 1e-8


def test_assemble_lcu_random_hamiltonians(rng):
    for n in (1, 2, 4, 6):
        strings = {"".join(rng.choice(list("IXYZ"), n)) for _ in range(min(4 ** n, 20))}
        H = PauliHamiltonian([(rng.normal(), s) for s in sorted(strings)], n)
        be = assemble_lcu(H)
        assert np.max(np.abs(be.alpha * extract_block(be) - H.to_matrix())) <= 1e-8


def test_lcu_postselection_probability():
    be = assemble_lcu(ISING3)
    psi = np.zeros(8)
    psi[0b010] = 1
    state, prob = postselect(apply_encoding(be, psi), range(3), "000")
    expect = np.linalg.norm(ising3_by_hand() @ psi) ** 2 / 2.75 ** 2
    assert abs(prob - expect) <= 1e-9


def test_lcu_postselection_probability_random_state(rng):
    be = assemble_lcu(ISING3)
    psi = random_state(rng, 3)
    _, prob = postselect(apply_encoding(be, psi), range(3), "000")
    assert abs(prob - np.linalg.norm(ising3_by_hand() @ psi) ** 2 / 2.75 ** 2) <= 1e-8


def test_sparse_identity():
    be = sparse_block_encoding(lambda i, j: 1.0 if i == j else 0.0, 2, [0])
    assert np.allclose(extract_block(be), np.eye(4))


def test_sparse_tridiagonal():
    n, N = 2, 4
    A = np.zeros((N, N))
    for i in range(N):
        for o in (-1, 0, 1):
            A[i, (i - o) % N] = 0.5
    be = sparse_block_encoding(lambda i, j: A[i, j], n, [-1, 0, 1])
    assert be.alpha == 4.0
    assert np.max(np.abs(extract_block(be) - A / 4)) <= 1e-9
    U = be.unitary
    assert np.linalg.norm(U @ U.conj().T - np.eye(U.shape[0])) <= 1e-9


def test_sparse_single_entry():
    be = sparse_block_encoding(lambda i, j: 1.0 if (i, j) == (2, 1) else 0.0, 2, [1])
    blk = extract_block(be)
    assert np.count_nonzero(np.abs(blk) > 1e-12) == 1 and abs(blk[2, 1] - 1) < 1e-12


def test_sparse_entry_out_of_range():
    with pytest.raises(EntryOutOfRange):
        sparse_block_encoding(lambda i, j: 2.0, 1, [0])


def test_pauli_term_validation():
    with pytest.raises(ValueError):
        PauliTerm(1.0, "XQ")
