import numpy as np
import pytest

from conftest import random_hermitian, random_unitary
from qspforge.dilation import _make, extract_block, hermitian_dilation
from qspforge.errors import ConventionMismatch, NotHermitianPayload, NotUnitary, XOutOfRange
from qspforge.qsp import (
    PhaseSequence,
    apply_qsp_to_block_encoding,
    extract_pq,
    gqsp_polynomials,
    gqsp_rotation,
    gqsp_unitary,
    mqsp_unitary,
    perturb_phases,
    qsp_response,
    qsp_unitary,
    un_qsp_evaluate,
)

X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)
GRID = np.linspace(-1, 1, 201)


def W(x):
    s = np.sqrt(1 - x * x)
    return np.array([[x, 1j * s], [1j * s, x]])


def S(phi):
    return np.diag([np.exp(1j * phi), np.exp(-1j * phi)])


def product(phases, x):
    U = S(phases[0])
    for phi in phases[1:]:
        U = U @ W(x) @ S(phi)
    return U


def cheb_T(d, x):
    return np.cos(d * np.arccos(x))


def test_qsp_unitary_examples():
    assert np.allclose(qsp_unitary(PhaseSequence.qsp([0.0]), 0.3), np.eye(2))
    assert np.allclose(qsp_unitary(PhaseSequence.qsp([0.0, 0.0]), 0.3), W(0.3))
    x = np.linspace(-1, 1, 50)
    seq = PhaseSequence.qsp(np.zeros(8))
    vals = [qsp_unitary(seq, v)[0, 0] for v in x]
    assert np.max(np.abs(np.array(vals) - cheb_T(7, x))) <= 1e-10
    with pytest.raises(XOutOfRange):
        qsp_unitary(seq, 1.5)


def test_qsp_unitary_matches_explicit_product(rng):
    for _ in range(200):
        ph = rng.uniform(-np.pi, np.pi, rng.integers(1, 12))
        x = rng.uniform(-1, 1)
        U = qsp_unitary(PhaseSequence.qsp(ph), x)
        assert np.allclose(U, product(ph, x), atol=1e-12)
        assert np.linalg.norm(U @ U.conj().T - np.eye(2)) <= 1e-12


def test_extract_pq_examples():
    P, Q = extract_pq(PhaseSequence.qsp([0.0, 0.0]))
    assert np.allclose(P.coefficients, [0, 1]) and np.allclose(Q.coefficients, [1])
    P, _ = extract_pq(PhaseSequence.qsp([0.0, 0.0, 0.0]))
    assert np.allclose(P.to_monomial().coefficients, [-1, 0, 2])


def test_extract_pq_constraints(rng):
    for d in (1, 2, 10, 25):
        ph = rng.uniform(-np.pi, np.pi, d + 1)
        P, Q = extract_pq(PhaseSequence.qsp(ph))
        assert P.degree <= d and Q.degree <= d - 1
        assert P.parity == ("even", "odd")[d % 2]
        assert Q.is_zero or Q.parity == ("odd", "even")[d % 2]
        resid = np.abs(P(GRID)) ** 2 + (1 - GRID ** 2) * np.abs(Q(GRID)) ** 2 - 1
        assert np.max(np.abs(resid)) <= 1e-9
        assert np.max(np.abs(P(GRID) - qsp_response(ph, GRID))) <= 1e-9


def test_lower_right_is_conjugate_polynomial(rng):
    ph = rng.uniform(-np.pi, np.pi, 6)
    P, _ = extract_pq(PhaseSequence.qsp(ph))
    Pc = np.conj(P.coefficients)
    for x in (-0.7, 0.1, 0.9):
        U = product(ph, x)
        assert np.isclose(U[1, 1], np.polynomial.chebyshev.chebval(x, Pc))


def test_gqsp_examples(rng):
    seq = PhaseSequence.gqsp([0.0], [0.0])
    U = random_unitary(rng, 3)
    assert np.allclose(gqsp_unitary(seq, U)[:3, :3], np.eye(3))
    # P(z) = z: theta_0 = 0 keeps the signal branch, theta_1 = 0 leaves it in place.
    seq = PhaseSequence.gqsp([0.0, 0.0], [0.0, 0.0])
    p, _ = gqsp_polynomials(seq)
    assert np.allclose(p, [0, 1])
    assert np.allclose(gqsp_unitary(seq, U)[:3, :3], U)


def test_gqsp_unitarity_on_circle(rng):
    seq = PhaseSequence.gqsp(rng.uniform(-np.pi, np.pi, 6), rng.uniform(-np.pi, np.pi, 6),
                             rng.uniform(-np.pi, np.pi))
    p, q = gqsp_polynomials(seq)
    for x in np.linspace(-np.pi, np.pi, 101):
        z = np.exp(1j * x)
        G = gqsp_unitary(seq, np.array([[z]]))
        assert abs(G[0, 0] - np.polyval(p[::-1], z)) <= 1e-12
        assert abs(G[1, 0] - np.polyval(q[::-1], z)) <= 1e-12
        assert abs(abs(G[0, 0]) ** 2 + abs(G[1, 0]) ** 2 - 1) <= 1e-9


def test_gqsp_explicit_layers(rng):
    th, ph = rng.uniform(-1, 1, 3), rng.uniform(-1, 1, 3)
    U = random_unitary(rng, 2)
    A = np.block([[U, np.zeros((2, 2))], [np.zeros((2, 2)), np.eye(2)]])
    out = np.kron(gqsp_rotation(th[0], ph[0], 0.4), np.eye(2))
    for k in (1, 2):
        out = np.kron(gqsp_rotation(th[k], ph[k]), np.eye(2)) @ A @ out
    assert np.allclose(gqsp_unitary(PhaseSequence.gqsp(th, ph, 0.4), U), out)
    with pytest.raises(NotUnitary):
        gqsp_unitary(PhaseSequence.gqsp(th, ph), 2 * U)


def test_apply_qsp_identity_and_t2():
    be = hermitian_dilation(0.6 * Z, 1.0)
    out = apply_qsp_to_block_encoding(be, PhaseSequence.qsp([0.0, 0.0]))
    assert np.allclose(extract_block(out), 0.6 * Z)
    out = apply_qsp_to_block_encoding(hermitian_dilation(Z, 1.0), PhaseSequence.qsp([0, 0, 0]))
    assert np.allclose(extract_block(out), np.eye(2))


def test_apply_qsp_t4_on_half_x():
    out = apply_qsp_to_block_encoding(hermitian_dilation(X / 2, 1.0),
                                      PhaseSequence.qsp(np.zeros(5)))
    w = np.linalg.eigvalsh(extract_block(out))
    assert np.allclose(w, [cheb_T(4, 0.5)] * 2)


def test_apply_qsp_eigenvalue_map(rng):
    H = random_hermitian(rng, 8)
    alpha = 1.2 * np.linalg.norm(H, 2)
    be = hermitian_dilation(H, alpha)
    ph = rng.uniform(-np.pi, np.pi, 8)
    P, _ = extract_pq(PhaseSequence.qsp(ph))
    blk = extract_block(apply_qsp_to_block_encoding(be, PhaseSequence.qsp(ph)))
    w, V = np.linalg.eigh(H / alpha)
    expect = (V * P(w)) @ V.conj().T
    assert np.max(np.abs(blk - expect)) <= 1e-8
    assert np.max(np.abs(blk @ H - H @ blk)) <= 1e-8


def test_apply_qsp_errors(rng):
    A = np.array([[0, 0.5], [0, 0]])
    be = _make(np.eye(4), 1.0, 2)
    be = be.with_unitary(np.block([[A, np.eye(2) * 0], [np.eye(2) * 0, A]]))
    with pytest.raises(NotHermitianPayload):
        apply_qsp_to_block_encoding(be, PhaseSequence.qsp([0, 0]))
    with pytest.raises(ConventionMismatch):
        apply_qsp_to_block_encoding(hermitian_dilation(Z, 1.0), PhaseSequence.gqsp([0], [0]))


def test_un_qsp_matches_gqsp(rng):
    th, ph = rng.uniform(-1, 1, 4), rng.uniform(-1, 1, 4)
    U = random_unitary(rng, 2)
    seq = PhaseSequence.gqsp(th, ph, 0.3)
    R = [gqsp_rotation(th[k], ph[k]) for k in range(1, 4)]
    out = un_qsp_evaluate(R, gqsp_rotation(th[0], ph[0], 0.3), U, 1)
    assert np.max(np.abs(out - gqsp_unitary(seq, U))) <= 1e-10
    V0 = random_unitary(rng, 2)
    assert np.allclose(un_qsp_evaluate([], V0, U, 1), np.kron(V0, np.eye(2)))


def test_un_qsp_degree_bound(rng):
    R = [random_unitary(rng, 4) for _ in range(3)]
    V0 = random_unitary(rng, 4)
    xs = np.linspace(-np.pi, np.pi, 17, endpoint=False)
    vals = np.array([un_qsp_evaluate(R, V0, np.array([[np.exp(1j * x)]]), 2) for x in xs])
    spec = np.fft.fft(vals, axis=0) / xs.size  # Fourier modes of each entry in x
    freqs = np.fft.fftfreq(xs.size, 1 / xs.size)
    bad = (freqs < 0) | (freqs > 3)
    assert np.max(np.abs(spec[bad])) <= 1e-12


def test_mqsp_examples(rng):
    ph = rng.uniform(-1, 1, 4)
    assert np.allclose(mqsp_unitary("111", ph, 0.3, -0.8), product(ph, 0.3), atol=1e-12)
    assert np.allclose(mqsp_unitary("000", ph, 0.3, -0.8), product(ph, -0.8), atol=1e-12)
    assert np.allclose(mqsp_unitary("", [0.7], 0.1, 0.2), S(0.7))
    x = 0.37
    assert np.isclose(mqsp_unitary("10", [0, 0, 0], x, x)[0, 0], cheb_T(2, x))
    with pytest.raises(XOutOfRange):
        mqsp_unitary("1", [0, 0], 1.2, 0)


def test_perturb_phases(rng):
    seq = PhaseSequence.qsp([np.pi / 4, np.pi / 4])
    assert np.allclose(perturb_phases(seq, 0.0).phases, seq.phases)
    assert np.allclose(perturb_phases(seq, 0.01).phases, [1.01 * np.pi / 4] * 2)
    assert perturb_phases(seq, 0.01).phases[0] == pytest.approx(0.7932, abs=1e-4)
    ph = rng.uniform(-np.pi, np.pi, 21)
    P0, _ = extract_pq(PhaseSequence.qsp(ph))
    P1, _ = extract_pq(perturb_phases(PhaseSequence.qsp(ph), 0.01))
    dev = np.max(np.abs(P1(GRID) - P0(GRID)))
    assert 0 < dev < 2


def test_phase_sequence_dict_round_trip():
    seq = PhaseSequence.gqsp([0.1, 0.2], [0.3, 0.4], 0.5)
    back = PhaseSequence.from_dict(seq.to_dict())
    assert np.allclose(back.thetas, seq.thetas) and back.lam == 0.5
