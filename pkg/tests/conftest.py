import numpy as np
import pytest

ACCEPTANCE = {}


def random_matrix(rng, n, m=None):
    m = n if m is None else m
    return rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))


def random_unitary(rng, n):
    q, r = np.linalg.qr(random_matrix(rng, n))
    return q * (np.diag(r) / abs(np.diag(r)))


def random_contraction(rng, n, norm=0.9):
    A = random_matrix(rng, n)
    return A * norm / np.linalg.norm(A, 2)


def random_hermitian(rng, n):
    A = random_matrix(rng, n)
    return (A + A.conj().T) / 2


def random_state(rng, n):
    v = random_matrix(rng, 2 ** n, 1).ravel()
    return v / np.linalg.norm(v)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: int(k[2:])):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"{key} {'PASS' if ok else 'FAIL'}  {detail}")
