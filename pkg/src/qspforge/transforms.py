"""Function approximation and the transforms built on it.

Polynomials of a Hermitian payload ``x = A/alpha`` are applied in two ways:

* ``gqsp``: GQSP on the qubitization walk ``W = (2 Pi - I) U``. The Laurent
  polynomial ``sum_k c_k (z^k + z^-k) / 2`` has payload block
  ``sum_k c_k T_k(x)``; it is shifted by ``z^K`` to a degree ``2 K``
  polynomial and the shift is undone with ``W^-K``. Any parity works.
* ``qsp``: real-mode QSP-Wx phases for a definite-parity real target, with
  the sequence and its negation averaged by :func:`linear_combine` so the
  block is exactly the real target.
"""

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import chebyshev as C
from scipy.optimize import minimize_scalar
from scipy.special import erf, erfcinv, jv

from .angles import find_angles
from .assembly import hermitize, linear_combine
from .dilation import _make, extract_block
from .errors import (
    BadEps,
    ConventionMismatch,
    InfeasibleDegree,
    NotHermitianPayload,
    PolynomialOverflow,
    QSPForgeError,
)
from .linalg import is_hermitian
from .polynomial import Polynomial, interpolate, values_at_nodes
from .qsp import (
    PhaseSequence,
    apply_qsp_to_block_encoding,
    check_reflection_ready,
    gqsp_unitary,
    walk_operator,
)

REPORT_GRID = 1001
STEP_LOW = 1 / np.sqrt(2)


@dataclass(frozen=True)
class ApproximationReport:
    degree: int
    max_error: float
    grid_size: int
    domain: tuple


# ---------------------------------------------------------------- approximation

def lambert_w(z, tol=1e-12, max_iter=100):
    """Principal branch of Lambert W for ``z >= 0`` by Newton iteration."""
    if z < 0:
        raise QSPForgeError("lambert_w is only implemented for z >= 0")
    w = np.log1p(z)
    for _ in range(max_iter):
        ew = np.exp(w)
        step = (w * ew - z) / (ew * (w + 1))
        w -= step
        if abs(step) <= tol * max(1.0, abs(w)):
            break
    return float(w)


def truncation_degree(tau, eps):
    """Jacobi-Anger truncation degree ``ceil(tau exp(W(log(1/eps) / tau)))``.

    Raises:
        BadEps: Unless ``0 < eps < 1``.
    """
    if not 0 < eps < 1:
        raise BadEps(f"eps={eps} outside (0, 1)")
    tau = abs(float(tau))
    if tau == 0:
        raise QSPForgeError("tau must be nonzero")
    r = tau * np.exp(lambert_w(np.log(1 / eps) / tau))
    return int(np.ceil(r - 1e-12))


def jacobi_anger_coefficients(t, K):
    """Chebyshev series of ``cos(t x)`` and ``sin(t x)`` truncated at degree ``K``.

    Returns:
        Tuple ``(cos_poly, sin_poly)`` of Chebyshev :class:`Polynomial`.
        Trailing zero coefficients are dropped, so ``t = 0`` gives the
        constant 1 and the zero polynomial.
    """
    k = np.arange(K + 1)
    J = jv(k, t)
    c = np.where(k % 2 == 0, 2 * J * (-1.0) ** (k // 2), 0.0)
    s = np.where(k % 2 == 1, 2 * J * (-1.0) ** ((k - 1) // 2), 0.0)
    c[0] = J[0]
    return (Polynomial(c, "chebyshev", "even").trimmed(),
            Polynomial(s, "chebyshev", "odd").trimmed())


def exp_coefficients(tau, K):
    """Chebyshev coefficients of ``e^{-i tau x}`` truncated at degree ``K``."""
    k = np.arange(K + 1)
    c = 2 * (-1j) ** k * jv(k, tau)
    c[0] /= 2
    return c


def truncation_error(coeffs, f, grid_size=4001):
    """Sup error of the Chebyshev series ``coeffs`` against ``f`` on [-1, 1]."""
    x = np.linspace(-1, 1, grid_size)
    return float(np.max(np.abs(C.chebval(x, coeffs) - f(x))))


def _report(poly, f, domain, grid_size=REPORT_GRID):
    a, b = domain
    x = np.linspace(a, b, grid_size)
    u = (2 * x - a - b) / (b - a)
    err = float(np.max(np.abs(poly(u) - f(x))))
    return ApproximationReport(poly.degree, err, grid_size, (float(a), float(b)))


def chebyshev_fit(f, degree, domain=(-1.0, 1.0), parity=None):
    """Chebyshev interpolant of ``f`` and its sup error on a 1001-point grid.

    The polynomial is in the variable ``u`` that maps ``domain`` onto
    [-1, 1] affinely; for the default domain ``u = x``.
    """
    a, b = map(float, domain)
    if not b > a:
        raise QSPForgeError("domain must have positive length")

    def g(u):
        return np.asarray(f((b - a) / 2 * u + (a + b) / 2), dtype=complex)

    poly = interpolate(g, int(degree), parity)
    if not np.any(np.abs(poly.coefficients.imag) > 0):
        poly = Polynomial(poly.coefficients.real, "chebyshev", poly.parity)
    return poly, _report(poly, f, (a, b))


# ---------------------------------------------------------------- block-encoding transforms

def _reflection_ready(be):
    """Return ``be`` or its Hermitian wrapper, whichever can drive reflections."""
    try:
        check_reflection_ready(be)
        return be
    except ConventionMismatch:
        if be.row_block != be.col_block:
            raise
        if not is_hermitian(extract_block(be), 1e-9):
            raise NotHermitianPayload("payload block is not Hermitian") from None
        return hermitize(be)


def _grid_max(coeffs, n=4001):
    return Polynomial(coeffs, "chebyshev").sup_norm(n)


def walk_transform(be, coeffs, tol=1e-10):
    """Block-encode ``sum_k c_k T_k(A/alpha)`` by GQSP on the walk operator.

    Args:
        be: Block-encoding with a Hermitian payload on a diagonal block.
        coeffs: Chebyshev coefficients (complex allowed) whose series is at
            most 1 in modulus on [-1, 1].
        tol: Angle-finding tolerance.

    Returns:
        Block-encoding with ``alpha = 1`` and one more ancilla than the
        (possibly hermitized) input.
    """
    coeffs = np.atleast_1d(np.asarray(coeffs, dtype=complex))
    be0 = _reflection_ready(be)
    K = coeffs.size - 1
    p = np.zeros(2 * K + 1, dtype=complex)
    p[K] = coeffs[0]
    p[K + 1:] += coeffs[1:] / 2
    p[:K] += coeffs[1:][::-1] / 2
    seq = find_angles(Polynomial(p, "monomial"), convention="gqsp", tol=tol)
    W = walk_operator(be0)
    G = gqsp_unitary(seq, W)
    back = np.linalg.matrix_power(W.conj().T, K)
    U = G @ np.kron(np.eye(2), back)
    return _make(U, 1.0, be0.system_dim, be0.row_block, be0.col_block,
                 provenance=f"walk-gqsp(K={K})<-{be0.provenance}", sequence=seq,
                 coefficients=coeffs)


def qsp_real_transform(be, poly, tol=1e-10, seed=0):
    """Block-encode a real definite-parity polynomial of ``A/alpha`` with QSP-Wx.

    Returns:
        Block-encoding whose block equals ``poly(A/alpha)``.
    """
    be0 = _reflection_ready(be)
    seq = find_angles(poly, mode="real", tol=tol, seed=seed)
    plus = apply_qsp_to_block_encoding(be0, seq)
    minus = apply_qsp_to_block_encoding(be0, PhaseSequence.qsp(-seq.phases))
    s, _ = linear_combine(plus, minus)
    return _make(s.unitary, 1.0, s.system_dim, s.row_block, s.col_block,
                 provenance=f"qsp-real(d={seq.degree})<-{be0.provenance}", sequence=seq)


def _sim_degree(tau, eps):
    if tau == 0:
        return 0
    K = truncation_degree(tau, eps)
    target = lambda x: np.exp(-1j * tau * x)
    while truncation_error(exp_coefficients(tau, K), target) > eps:
        K += 1
    return K


def hamiltonian_simulation(be, t, eps=1e-6, route="gqsp", degree=None):
    """Block-encode ``s e^{-i H t}`` for ``H = alpha * payload``.

    With ``degree=None`` the truncation degree starts at
    :func:`truncation_degree` for ``eps / 2`` and is raised until the measured
    truncation error is at most ``eps / 2``. An explicit ``degree`` skips that
    and carries whatever truncation error it implies.

    Args:
        be: Block-encoding of ``H / alpha`` (Hermitian payload).
        t: Evolution time.
        eps: Target operator-norm error of the scaled block.
        route: ``"gqsp"`` (walk-based GQSP) or ``"lcu-cos-sin"`` (cos and sin
            pieces by QSP-Wx, joined by :func:`linear_combine`).
        degree: Optional fixed Chebyshev degree ``K``.

    Returns:
        Block-encoding whose block approximates ``s e^{-i H t}``. Its
        ``alpha`` is ``1 / s`` and ``meta`` holds ``subnormalization``,
        ``degree`` and ``route``.

    Raises:
        BadEps: Unless ``0 < eps < 1``.
        NoConvergence: If angle finding fails.
    """
    if not 0 < eps < 1:
        raise BadEps(f"eps={eps} outside (0, 1)")
    tau = float(be.alpha * t)
    K = _sim_degree(tau, eps / 2) if degree is None else int(degree)
    margin = 1e-3  # keeps |P| < 1 so the outer-function completion applies
    tol = min(eps / 8, 1e-9)
    if route == "gqsp":
        c = exp_coefficients(tau, K)
        s = (1 - margin) / max(_grid_max(c), 1.0)
        out = walk_transform(be, c * s, tol)
    elif route == "lcu-cos-sin":
        cos_p, sin_p = jacobi_anger_coefficients(tau, K)
        peak = max(cos_p.sup_norm(4001), sin_p.sup_norm(4001), 1.0)
        s_half = (1 - margin) / peak
        bc = qsp_real_transform(be, cos_p.scaled(s_half), tol)
        if sin_p.is_zero:
            sin_p = Polynomial([0.0, 0.0], "chebyshev", "odd")
        bs = qsp_real_transform(be, sin_p.scaled(s_half), tol)
        # -i on the sine branch turns the average into (cos - i sin) / 2.
        bs = _make(-1j * bs.unitary, 1.0, bs.system_dim, bs.row_block, bs.col_block)
        joined, _ = linear_combine(bc, bs)
        s = s_half / 2
        out = _make(joined.unitary, 1.0, joined.system_dim, joined.row_block,
                    joined.col_block)
    else:
        raise QSPForgeError(f"unknown route {route!r}")
    return _make(out.unitary, 1 / s, out.system_dim, out.row_block, out.col_block,
                 provenance=f"exp(-iHt) {route}<-{be.provenance}", subnormalization=s,
                 degree=K, route=route, tau=tau, time=float(t))


def softplus(u, kappa):
    """Smooth ``max(u, 0)`` with sharpness ``kappa``."""
    return np.logaddexp(0.0, kappa * u) / kappa


def qite_target(tau, lam, sharpness=4.0):
    """``exp(-tau * softplus(x + lam))``: ``e^{-tau (x + lam)}`` above ``-lam``, near 1 below.

    The saturation keeps the function at most 1 on all of [-1, 1] so that it
    is admissible without rescaling by its value at ``x = -1``.
    """
    if tau == 0:
        return lambda x: np.ones_like(np.asarray(x, dtype=float))
    kappa = sharpness * tau
    return lambda x: np.exp(-tau * softplus(np.asarray(x, dtype=float) + lam, kappa))


def qite_transform(be, tau, lam, degree, state=None, sharpness=4.0, overflow_tol=1e-2):
    """Imaginary-time filter ``~ e^{-tau (A/alpha + lam)}`` on a block-encoding.

    Args:
        be: Block-encoding with Hermitian payload ``A/alpha``.
        tau: Imaginary time, ``tau >= 0``.
        lam: Stabilization shift in (0, 1]; ``-lam`` should lower-bound the
            ground energy of the payload.
        degree: Chebyshev degree of the fit.
        state: Optional system state vector. When given, the post-selection
            probability ``||block @ state||^2`` is stored in
            ``meta["success_probability"]``.
        sharpness: Softplus sharpness relative to ``tau``.
        overflow_tol: Largest tolerated excess of the fit over 1 before it is
            rescaled; beyond it the fit is rejected.

    Returns:
        Tuple ``(be_out, bound)`` where ``bound = gamma^2 / e^2`` with
        ``gamma`` the overlap of ``state`` with the payload's ground state,
        or ``None`` without a state. ``be_out.meta`` carries the fitted
        polynomial, its report and the applied ``scale``.

    Raises:
        PolynomialOverflow: If the fit exceeds 1 by more than ``overflow_tol``.
    """
    if tau < 0:
        raise QSPForgeError("tau must be nonnegative")
    if not 0 < lam <= 1:
        raise QSPForgeError(f"lam={lam} outside (0, 1]")
    f = qite_target(tau, lam, sharpness)
    poly, report = chebyshev_fit(f, degree)
    peak = poly.sup_norm(4001)
    if peak > 1 + overflow_tol:
        raise PolynomialOverflow(f"fit reaches {peak:.4f} on [-1, 1]; raise the degree")
    scale = (1 - 1e-6) / max(peak, 1.0)
    out = walk_transform(be, poly.coefficients * scale)
    meta = dict(polynomial=poly, report=report, scale=scale, tau=tau, lam=lam)
    bound = None
    if state is not None:
        psi = np.asarray(state, dtype=complex).ravel()
        psi = psi / np.linalg.norm(psi)
        block = extract_block(out)
        meta["success_probability"] = float(np.linalg.norm(block @ psi) ** 2)
        _, vecs = np.linalg.eigh(extract_block(be))
        gamma = abs(np.vdot(vecs[:, 0], psi))
        bound = float(gamma ** 2 / np.e ** 2)
    out = _make(out.unitary, out.alpha, out.system_dim, out.row_block, out.col_block,
                provenance=f"qite(tau={tau:g})<-{be.provenance}", **meta)
    return out, bound


# ---------------------------------------------------------------- step polynomials

def _even_step(a0, k):
    def g(x):
        x = np.asarray(x, dtype=float)
        return 1 + (erf(k * (x - a0)) - erf(k * (x + a0))) / 2
    return g


def _step_error(poly, a0, w, n=None):
    n = n or max(2001, 8 * poly.degree)
    lo = np.linspace(STEP_LOW, max(a0 - w / 2, STEP_LOW), n)
    hi = np.linspace(min(a0 + w / 2, 1.0), 1.0, n)
    return float(max(np.max(np.abs(poly(lo))), np.max(np.abs(1 - poly(hi)))))


def _step_fit(a0, w, d, k, refine=True):
    g = _even_step(a0, k)
    poly = interpolate(g, d, "even")
    poly = Polynomial(poly.coefficients.real, "chebyshev", "even")
    if refine:
        peak = poly.sup_norm(max(4001, 8 * d))
    else:
        peak = float(np.max(np.abs(values_at_nodes(poly.coefficients, 8 * d + 8))))
    return poly.scaled((1 - 1e-9) / max(peak, 1.0))


def step_polynomial(a0, w, d, eps=None):
    """Even polynomial stepping from 0 to 1 around ``a0`` with edge width ``w``.

    A scaled error-function step is interpolated at degree ``d``; its
    steepness is chosen to minimize the plateau error on
    ``[1/sqrt(2), a0 - w/2]`` and ``[a0 + w/2, 1]``.

    Args:
        a0: Edge center in ``(1/sqrt(2), 1)``.
        w: Edge width.
        d: Polynomial degree (rounded down to even).
        eps: Optional required plateau error.

    Returns:
        Tuple ``(poly, report)``; ``report.max_error`` is the achieved plateau
        error.

    Raises:
        InfeasibleDegree: If ``eps`` is given and not reached at degree ``d``.
    """
    if not STEP_LOW < a0 < 1:
        raise QSPForgeError(f"a0={a0} outside (1/sqrt(2), 1)")
    if w <= 0 or d < 1:
        raise QSPForgeError("need w > 0 and d >= 1")
    d = int(d) - int(d) % 2
    d = max(d, 2)

    def objective(logk):
        return _step_error(_step_fit(a0, w, d, np.exp(logk)), a0, w, n=1001)

    # Useful steepness lies between "edge spans w" and "degree resolves edge".
    lo, hi = np.log(1.0 / w), np.log(4.0 * d + 4.0 / w)
    res = minimize_scalar(objective, bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-3})
    poly = _step_fit(a0, w, d, np.exp(res.x))
    err = _step_error(poly, a0, w)
    report = ApproximationReport(poly.degree, err, max(2001, 8 * d) * 2, (STEP_LOW, 1.0))
    if eps is not None and err > eps:
        raise InfeasibleDegree(
            f"degree {d} reaches plateau error {err:.3e} > eps {eps:g}", err)
    return poly, report


def step_steepness(w, eps):
    """Error-function steepness whose tails fall below ``eps / 2`` at ``w / 2``."""
    return 2.0 * float(erfcinv(eps)) / w


def step_degree(a0, w, eps, d_max=1 << 16):
    """Even degree for a step with plateau error ``eps`` and edge width ``w``.

    The steepness is fixed by :func:`step_steepness` and the degree starts
    from the rule ``d ~ 0.9 k sqrt(ln(1/eps))``, growing by 10% until the
    measured plateau error meets ``eps``. The result is smooth in ``w``.
    """
    if not 0 < eps < 1:
        raise BadEps(f"eps={eps} must lie in (0, 1)")
    k = step_steepness(w, eps)
    d = 2 * int(np.ceil(0.45 * k * np.sqrt(np.log(1.0 / eps))))
    while _step_error(_step_fit(a0, w, d, k), a0, w) > eps:
        d = 2 * int(np.ceil(0.55 * d))
        if d > d_max:
            raise InfeasibleDegree(f"no degree up to {d_max} reaches eps {eps:g}")
    return d


# ---------------------------------------------------------------- error budget

def error_budget(eps_f, d):
    """Per-query block-encoding budget ``eps_f / d``."""
    if eps_f <= 0 or d < 1:
        raise QSPForgeError("need eps_f > 0 and d >= 1")
    return eps_f / d


def critical_degree(eps_b, eps_f_of_d, d_max=10000):
    """Largest ``d`` with ``eps_f(d) / d >= eps_b``, scanning upward from 1.

    Returns 0 when even ``d = 1`` violates the inequality.
    """
    best = 0
    for d in range(1, d_max + 1):
        if eps_f_of_d(d) / d >= eps_b:
            best = d
        else:
            break
    return best
