import numpy as np
import pytest
from numpy.polynomial import chebyshev as C
from scipy.linalg import expm

from qspforge.dilation import extract_block, hermitian_dilation
from qspforge.errors import BadEps, InfeasibleDegree
from qspforge.lcu import PauliHamiltonian, assemble_lcu
from qspforge.transforms import (
    _step_error,
    _step_fit,
    chebyshev_fit,
    critical_degree,
    error_budget,
    exp_coefficients,
    hamiltonian_simulation,
    jacobi_anger_coefficients,
    lambert_w,
    qite_transform,
    step_degree,
    step_polynomial,
    step_steepness,
    truncation_degree,
    truncation_error,
)

Z = np.diag([1.0, -1.0])
ISING3 = PauliHamiltonian([(1.0, "ZZI"), (1.0, "IZZ"), (0.25, "XII"),
                           (0.25, "IXI"), (0.25, "IIX")])


def gauss_chebyshev(f, K, nodes=128):
    theta = np.pi * (np.arange(nodes) + 0.5) / nodes
    fx = f(np.cos(theta))
    c = np.array([2.0 / nodes * np.sum(fx * np.cos(k * theta)) for k in range(K + 1)])
    c[0] /= 2
    return c


def test_lambert_w_inverts():
    for z in (0.0, 0.1, 1.0, 7.5, 300.0):
        w = lambert_w(z)
        assert w * np.exp(w) == pytest.approx(z, abs=1e-10)


@pytest.mark.parametrize("tau", [0.5, 1.0, 2.0, 5.0])
@pytest.mark.parametrize("eps", [1e-3, 1e-6])
def test_truncation_degree_meets_eps(tau, eps):
    K = truncation_degree(tau, eps)
    assert K >= tau
    err = truncation_error(exp_coefficients(tau, K), lambda x: np.exp(-1j * tau * x))
    assert err <= eps


def test_truncation_degree_can_undershoot_tight_eps():
    # The closed form is asymptotic; simulation raises K on measured error.
    K = truncation_degree(5.0, 1e-10)
    f = lambda x: np.exp(-5j * x)
    assert truncation_error(exp_coefficients(5.0, K), f) > 1e-10
    out = hamiltonian_simulation(hermitian_dilation(Z, 1.0), 5.0, eps=2e-10)
    assert out.meta["degree"] > K
    assert truncation_error(exp_coefficients(5.0, out.meta["degree"]), f) <= 1e-10


def test_truncation_degree_small_for_loose_eps():
    assert truncation_degree(1.0, 0.999) <= 2


def test_truncation_degree_rejects_bad_eps():
    for eps in (0.0, 1.0, -1e-3):
        with pytest.raises(BadEps):
            truncation_degree(1.0, eps)


def test_jacobi_anger_vs_quadrature():
    cos_p, sin_p = jacobi_anger_coefficients(1.0, 10)
    c = gauss_chebyshev(lambda x: np.cos(x), 10)
    s = gauss_chebyshev(lambda x: np.sin(x), 10)
    np.testing.assert_allclose(np.pad(cos_p.coefficients, (0, 11 - cos_p.coefficients.size)),
                               c, atol=1e-12)
    np.testing.assert_allclose(np.pad(sin_p.coefficients, (0, 11 - sin_p.coefficients.size)),
                               s, atol=1e-12)


def test_jacobi_anger_pointwise():
    cos_p, sin_p = jacobi_anger_coefficients(2.0, 20)
    assert cos_p(1.0) == pytest.approx(np.cos(2.0), abs=1e-10)
    assert sin_p(1.0) == pytest.approx(np.sin(2.0), abs=1e-10)


def test_jacobi_anger_zero_time():
    cos_p, sin_p = jacobi_anger_coefficients(0.0, 6)
    assert cos_p(0.3) == pytest.approx(1.0)
    assert sin_p.is_zero


def test_cos_sin_consistency():
    t, K = 3.0, 9
    cos_p, sin_p = jacobi_anger_coefficients(t, K)
    x = np.linspace(-1, 1, 2001)
    ec = np.max(np.abs(cos_p(x) - np.cos(t * x)))
    es = np.max(np.abs(sin_p(x) - np.sin(t * x)))
    resid = np.abs(cos_p(x) ** 2 + sin_p(x) ** 2 - 1)
    assert np.max(resid) <= 2 * (ec + es)


def test_exp_coefficients_match_cos_sin():
    cos_p, sin_p = jacobi_anger_coefficients(1.7, 12)
    x = np.linspace(-1, 1, 101)
    np.testing.assert_allclose(C.chebval(x, exp_coefficients(1.7, 12)),
                               cos_p(x) - 1j * sin_p(x), atol=1e-14)


def test_chebyshev_fit_constant():
    poly, report = chebyshev_fit(lambda x: np.full_like(x, 0.4), 0)
    assert poly.degree == 0
    assert report.max_error < 1e-15


def test_chebyshev_fit_exp_report():
    poly, report = chebyshev_fit(lambda x: np.exp(-x), 10)
    x = np.linspace(-1, 1, 1001)
    oracle = np.max(np.abs(poly(x) - np.exp(-x)))
    assert report.max_error == pytest.approx(oracle, abs=1e-12)
    assert report.max_error < 1e-9


def test_chebyshev_fit_domain():
    poly, report = chebyshev_fit(np.sin, 12, domain=(0.0, 3.0))
    u = np.linspace(-1, 1, 7)
    np.testing.assert_allclose(poly(u), np.sin(1.5 * u + 1.5), atol=1e-8)


@pytest.mark.parametrize("route", ["gqsp", "lcu-cos-sin"])
def test_simulation_single_qubit(route):
    be = hermitian_dilation(Z, 1.0)
    out = hamiltonian_simulation(be, 1.3, eps=1e-6, route=route)
    s = out.meta["subnormalization"]
    assert out.alpha == pytest.approx(1 / s)
    np.testing.assert_allclose(extract_block(out), s * np.diag(np.exp([-1.3j, 1.3j])),
                               atol=1e-6)


def test_simulation_ising_matches_expm():
    be = assemble_lcu(ISING3)
    out = hamiltonian_simulation(be, 0.7, eps=1e-6)
    s = out.meta["subnormalization"]
    err = np.linalg.norm(extract_block(out) - s * expm(-0.7j * ISING3.to_matrix()), 2)
    assert err <= 1e-6


def test_simulation_group_property():
    be = assemble_lcu(ISING3)
    eps = 1e-6
    parts = [hamiltonian_simulation(be, t, eps=eps) for t in (0.4, 0.5, 0.9)]
    U1, U2, U12 = (extract_block(p) / p.meta["subnormalization"] for p in parts)
    bound = sum(eps / p.meta["subnormalization"] for p in parts)
    assert np.linalg.norm(U1 @ U2 - U12, 2) <= bound


def test_simulation_explicit_degree():
    be = hermitian_dilation(Z, 1.0)
    out = hamiltonian_simulation(be, 2.0, degree=4)
    assert out.meta["degree"] == 4
    exact = np.diag(np.exp([-2j, 2j])) * out.meta["subnormalization"]
    assert np.linalg.norm(extract_block(out) - exact) > 1e-6


def test_simulation_bad_eps():
    with pytest.raises(BadEps):
        hamiltonian_simulation(hermitian_dilation(Z, 1.0), 1.0, eps=2.0)


def test_qite_zero_time_is_identity_like():
    be = hermitian_dilation(Z / 2, 1.0)
    out, _ = qite_transform(be, 0.0, 1.0, 4)
    block = extract_block(out)
    np.testing.assert_allclose(block, block[0, 0] * np.eye(2), atol=1e-9)


def test_qite_single_qubit_ground_state():
    be = hermitian_dilation(Z, 1.0)
    out, bound = qite_transform(be, 5.0, 1.0, 30, state=np.array([1.0, 1.0]) / np.sqrt(2))
    phi = extract_block(out) @ (np.array([1.0, 1.0]) / np.sqrt(2))
    phi /= np.linalg.norm(phi)
    assert abs(phi[1]) ** 2 >= 0.999
    assert out.meta["success_probability"] >= bound
    assert bound == pytest.approx(0.5 / np.e ** 2)


def test_qite_payload_psd():
    rng = np.random.default_rng(3)
    A = rng.standard_normal((4, 4))
    H = (A + A.T) / 2
    H /= np.linalg.norm(H, 2)
    out, _ = qite_transform(hermitian_dilation(H, 1.0), 2.0, 1.0, 16)
    poly = out.meta["polynomial"]
    assert np.min(poly(np.linspace(-1, 1, 4001)).real) >= 0
    block = extract_block(out)
    assert np.min(np.linalg.eigvalsh((block + block.conj().T) / 2)) >= -1e-8


def test_step_plateaus_and_edge():
    a0, w = 0.85, 0.05
    poly, report = step_polynomial(a0, w, 160)
    eps = report.max_error
    assert eps < 1e-2
    assert abs(poly(0.72)) <= eps
    assert poly(0.99) >= 1 - eps
    edge = poly(np.linspace(a0 - w / 2, a0 + w / 2, 101))
    assert np.all(np.diff(edge) >= -1e-12)


def test_step_infeasible_degree():
    with pytest.raises(InfeasibleDegree):
        step_polynomial(0.85, 0.01, 10, eps=1e-3)


def _min_feasible_degree(a0, w, eps):
    hi = 8
    while True:
        try:
            step_polynomial(a0, w, hi, eps=eps)
            break
        except InfeasibleDegree:
            hi *= 2
    lo = hi // 2
    while hi - lo > 2:
        mid = (lo + hi) // 4 * 2
        try:
            step_polynomial(a0, w, mid, eps=eps)
            hi = mid
        except InfeasibleDegree:
            lo = mid
    return hi


def test_step_degree_scales_inverse_width():
    d = [_min_feasible_degree(0.85, w, 1e-2) for w in (0.2, 0.1, 0.05)]
    assert d[0] < d[1] < d[2]
    for small, big in zip(d, d[1:]):
        assert 1.4 <= big / small <= 2.6


def test_step_degree_rule_meets_eps():
    a0, w = 0.8, 0.04
    d = step_degree(a0, w, 1e-3)
    assert _step_error(_step_fit(a0, w, d, step_steepness(w, 1e-3)), a0, w) <= 1e-3


def test_error_budget():
    assert error_budget(1e-3, 10) == 1e-3 / 10
    assert error_budget(2.5e-2, 1) == 2.5e-2


def test_critical_degree_jacobi_anger():
    target = lambda x: np.exp(-1j * x)

    def eps_f(d):
        return truncation_error(exp_coefficients(1.0, d), target)

    dc = critical_degree(1e-6, eps_f)
    assert dc >= 1
    assert eps_f(dc) / dc >= 1e-6
    assert eps_f(dc + 1) / (dc + 1) < 1e-6


def test_critical_degree_none_feasible():
    assert critical_degree(1.0, lambda d: 0.5) == 0
