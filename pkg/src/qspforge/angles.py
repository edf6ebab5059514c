"""Phase-factor finding for QSP-Wx and GQSP sequences.

QSP-Wx, ``mode="full"``: the target P must be the exact top-left entry, so
``|P(+-1)| = 1``. A complementary Q is obtained by factoring
``(1 - |P|^2) / (1 - x^2)`` in the variable ``y = x^2`` (this keeps Q's
parity). The 2x2 unitary is expanded in ``w = e^{i theta}`` and layers are
peeled from its Laurent coefficients. Both steps run in mpmath at roughly
``2 d + 30`` digits because root-finding in double precision loses too much
for random-phase targets beyond degree 20. A least-squares polish follows
when the double-precision residual is still above ``tol``.

QSP-Wx, ``mode="real"``: only ``Re P`` is matched. Phases are kept symmetric
and fitted by least squares from ``(pi/4, 0, ..., 0, pi/4)``.

GQSP: Q is completed from ``1 - |P|^2`` on the unit circle (outer function by
FFT, or root selection as a fallback) and the layers are stripped one
coefficient at a time.
"""

import mpmath as mp
import numpy as np
from scipy.optimize import least_squares

from .errors import NoConvergence, NotAdmissible, QSPForgeError
from .polynomial import Polynomial, chebyshev_nodes
from .qsp import GQSP, QSP_WX, PhaseSequence, gqsp_polynomials, qsp_products

ADMISSIBLE_SLACK = 1e-9


def _grid(d, grid_size):
    n = grid_size or max(4 * d, 256)
    return chebyshev_nodes(n)


def find_angles(target, convention=QSP_WX, grid_size=None, tol=1e-6, mode="full",
                seed=0, max_iter=500):
    """Phase factors reproducing ``target``.

    Args:
        target: :class:`Polynomial`. For ``qsp-wx`` it is a polynomial in x
            (either basis); for ``gqsp`` a ``monomial`` polynomial in z.
        convention: ``"qsp-wx"`` or ``"gqsp"``.
        grid_size: Number of check points (default ``max(4 d, 256)``).
        tol: Required max-norm residual on the check grid.
        mode: ``"full"`` matches P itself; ``"real"`` (qsp-wx only) matches
            ``Re P`` to a real target with ``|target| < 1``.
        seed: Seed for randomized restarts in the optimization stage.
        max_iter: Iteration budget for each least-squares run.

    Returns:
        :class:`PhaseSequence` with residual at most ``tol``.

    Raises:
        NotAdmissible: If the target violates the norm or parity constraints.
        NoConvergence: If the residual stays above ``tol``.
    """
    conv = convention.lower()
    if conv in ("qsp", "wx"):
        conv = QSP_WX
    if conv == GQSP:
        return _find_gqsp(target, grid_size, tol)
    if conv != QSP_WX:
        raise QSPForgeError(f"unknown convention {convention!r}")
    P = target.to_chebyshev().trimmed(1e-14)
    if P.parity == "none":
        raise NotAdmissible("qsp-wx targets need definite parity")
    d = P.degree
    x = _grid(d, grid_size)
    vals = P(x)
    if np.max(np.abs(vals)) > 1 + ADMISSIBLE_SLACK:
        raise NotAdmissible("target exceeds 1 in modulus on [-1, 1]")
    rng = np.random.default_rng(seed)
    if mode == "real":
        if np.any(np.abs(P.coefficients.imag) > 1e-14):
            raise NotAdmissible("real mode needs a real target")
        return _find_real(P.coefficients.real, d, x, tol, rng, max_iter)
    if mode != "full":
        raise QSPForgeError(f"unknown mode {mode!r}")
    ends = np.abs(P(np.array([-1.0, 1.0])))
    if np.max(np.abs(ends - 1)) > 1e-8:
        raise NotAdmissible(
            "full mode needs |P(+-1)| = 1; use mode='real' for real targets")
    return _find_full(P, d, x, tol, rng, max_iter)


# ---------------------------------------------------------------- QSP-Wx full

def _work_dps(d):
    return max(50, 2 * d + 30)


def _cheb_to_monomial(c):
    """Exact Chebyshev-to-monomial conversion at the working precision."""
    n = len(c)
    T = [[mp.mpf(1)], [mp.mpf(0), mp.mpf(1)]]
    for k in range(2, n):
        a = [mp.mpf(0)] + [2 * v for v in T[k - 1]]
        b = T[k - 2] + [mp.mpf(0)] * (len(a) - len(T[k - 2]))
        T.append([u - v for u, v in zip(a, b)])
    out = [mp.mpc(0)] * n
    for k in range(n):
        for j, v in enumerate(T[k][: n]):
            out[j] += c[k] * v
    return out


def _pmul(a, b):
    out = [mp.mpc(0)] * (len(a) + len(b) - 1)
    for i, u in enumerate(a):
        if u != 0:
            for j, v in enumerate(b):
                out[i + j] += u * v
    return out


def _mp_roots(c, max_newton=80):
    """Roots of the polynomial with coefficients ``c`` (lowest first).

    Double-precision companion roots are refined by Newton steps at the
    working precision. Repeated roots converge only linearly, which is fine
    because callers merge them in pairs.
    """
    cd = np.array([complex(v) for v in c[::-1]])
    rev = c[::-1]
    dcoef = [k * v for k, v in zip(range(len(c) - 1, 0, -1), rev[:-1])]
    eps = mp.mpf(10) ** (-mp.mp.dps + 5)
    out = []
    for r0 in np.roots(cd):
        r = mp.mpc(complex(r0))
        for _ in range(max_newton):
            dp = mp.polyval(dcoef, r)
            if dp == 0:
                break
            step = mp.polyval(rev, r) / dp
            r -= step
            if abs(step) <= eps * max(1, abs(r)):
                break
        out.append(r)
    return out


def _complete_q_mp(pc, d):
    """Monomial coefficients of Q (length d) at the working precision."""
    pm = _cheb_to_monomial(pc)
    F = [-v for v in _pmul(pm, [mp.conj(v) for v in pm])]
    F[0] += 1
    G = [mp.re(F[2 * j]) for j in range(d + 1)]  # 1 - |P(x)|^2 = G(x^2)
    H = [mp.mpf(0)] * d  # G = (1 - y) H
    r = G[:]
    for k in range(d, 0, -1):
        H[k - 1] = -r[k]
        r[k - 1] -= H[k - 1]
    p = (d - 1) % 2
    s = H[p:]
    m = (len(s) - 1) // 2
    Q = [mp.mpc(0)] * d
    if s[-1] <= 0:
        return Q
    q = [mp.mpc(1)]
    if m:
        roots = _mp_roots(s)
        # Conjugate roots pair up and real roots are double, so keep the
        # upper half-plane root of each pair. Rounding in P can split a real
        # double root into two nearby reals; those are merged by their mean.
        tiny = mp.mpf(10) ** (-mp.mp.dps // 4)
        upper = [z for z in roots if mp.im(z) > tiny]
        real = sorted((mp.re(z) for z in roots if abs(mp.im(z)) <= tiny))
        merged = [(real[i] + real[i + 1]) / 2 for i in range(0, len(real) - 1, 2)]
        if len(real) % 2:
            merged.append(real[-1])
        for e in (upper + merged)[:m]:
            q = _pmul(q, [-e, 1])
    c = mp.sqrt(s[-1])
    for j, v in enumerate(q):
        Q[p + 2 * j] = c * v
    return Q


def complete_q_wx(P):
    """Complementary Q with ``|P|^2 + (1 - x^2)|Q|^2 = 1`` and parity ``d - 1``.

    Q is built from the roots of ``(1 - |P|^2) / (1 - x^2)`` in ``y = x^2``,
    one root from each conjugate pair, at extended precision.

    Returns:
        Monomial :class:`Polynomial` of degree at most ``d - 1``.
    """
    d = P.degree
    if d == 0:
        return Polynomial([0.0], "monomial")
    pc = P.to_chebyshev().coefficients[: d + 1]
    with mp.workdps(_work_dps(d)):
        Q = _complete_q_mp([mp.mpc(complex(v)) for v in pc], d)
        return Polynomial([complex(v) for v in Q], "monomial")


def _laurent(pc, Q, d):
    """Laurent coefficients ``C_{-d..d}`` of the 2x2 unitary in ``w = e^{i theta}``."""
    size = 2 * d + 3  # one spare slot on each side for the sine factor
    mid = d + 1

    def from_monomial(coefs):
        out = [mp.mpc(0)] * size
        for j, v in enumerate(coefs):
            if v != 0:
                scale = v / mp.mpf(2) ** j
                for i in range(j + 1):
                    out[mid + j - 2 * i] += scale * mp.binomial(j, i)
        # times (w - 1/w) / 2, i.e. i sin(theta)
        res = [mp.mpc(0)] * size
        for i, v in enumerate(out):
            if v != 0:
                res[i + 1] += v / 2
                res[i - 1] -= v / 2
        return res

    Pl = [mp.mpc(0)] * size
    Pc = [mp.mpc(0)] * size
    for k, v in enumerate(pc):
        if k == 0:
            Pl[mid] += v
            Pc[mid] += mp.conj(v)
        else:
            for i in (mid + k, mid - k):
                Pl[i] += v / 2
                Pc[i] += mp.conj(v) / 2
    Ql = from_monomial(Q)
    Qc = from_monomial([mp.conj(v) for v in Q])
    return [[[Pl[i], Ql[i]], [Qc[i], Pc[i]]] for i in range(1, size - 1)]


def peel_wx(Cs):
    """Peel QSP-Wx layers from Laurent coefficients ``C_{-d..d}``.

    Each coefficient is a nested 2x2 list of mpmath numbers. The top
    coefficient of ``U S(-phi)`` must map the first column onto the second;
    its phase fixes ``phi``, after which one signal factor is divided out.
    """
    d = (len(Cs) - 1) // 2
    phis = []
    for m in range(d, 0, -1):
        top = Cs[-1]
        z = top[0][0] * mp.conj(top[0][1]) + top[1][0] * mp.conj(top[1][1])
        phi = mp.arg(z) / 2 if z != 0 else mp.mpf(0)
        phis.append(phi)
        e0, e1 = mp.expj(-phi), mp.expj(phi)
        G = [[[c[r][0] * e0, c[r][1] * e1] for r in (0, 1)] for c in Cs]
        new = []
        for j in range(-(m - 1), m):
            A, B = G[j + m + 1], G[j + m - 1]
            rows = []
            for r in (0, 1):
                a, b = (A[r][0] + A[r][1]) / 2, (B[r][0] - B[r][1]) / 2
                rows.append([a + b, a - b])
            new.append(rows)
        Cs = new
    phis.append(mp.arg(Cs[0][0][0]))
    return np.array([float(v) for v in phis[::-1]])


def _response_and_jacobian(phases, x):
    """P(x) on the grid and dP/dphi_k, using prefix and suffix products."""
    d = phases.size - 1
    n = x.size
    s = np.sqrt(1 - x * x)
    Wm = np.zeros((n, 2, 2), dtype=complex)
    Wm[:, 0, 0] = Wm[:, 1, 1] = x
    Wm[:, 0, 1] = Wm[:, 1, 0] = 1j * s
    e = np.exp(1j * phases)
    pre = np.empty((d + 1, n, 2, 2), dtype=complex)
    cur = np.zeros((n, 2, 2), dtype=complex)
    cur[:, 0, 0], cur[:, 1, 1] = e[0], np.conj(e[0])
    pre[0] = cur
    for k in range(1, d + 1):
        cur = cur @ Wm
        cur[:, :, 0] *= e[k]
        cur[:, :, 1] *= np.conj(e[k])
        pre[k] = cur
    suf = np.empty((d + 1, n, 2, 2), dtype=complex)
    cur = np.broadcast_to(np.eye(2, dtype=complex), (n, 2, 2)).copy()
    suf[d] = cur
    for k in range(d, 0, -1):
        Sk = np.zeros((n, 2, 2), dtype=complex)
        Sk[:, 0, 0], Sk[:, 1, 1] = e[k], np.conj(e[k])
        cur = Wm @ Sk @ cur
        suf[k - 1] = cur
    P = pre[d][:, 0, 0]
    J = 1j * (pre[:, :, 0, 0] * suf[:, :, 0, 0] - pre[:, :, 0, 1] * suf[:, :, 1, 0])
    return P, J.T


def _polish(phases, target_vals, x, max_iter, real=False, symmetric=False):
    d = phases.size - 1
    h = d // 2 + 1

    def expand(v):
        return np.concatenate([v, v[: (d + 1) // 2][::-1]]) if symmetric else v

    def fold(J):
        if not symmetric:
            return J
        out = J[:, :h].copy()
        out[:, : (d + 1) // 2] += J[:, h:][:, ::-1]
        return out

    def resid(v):
        r = qsp_products(expand(v), x)[:, 0, 0] - target_vals
        return r.real if real else np.concatenate([r.real, r.imag])

    def jac(v):
        _, J = _response_and_jacobian(expand(v), x)
        J = fold(J)
        return J.real if real else np.vstack([J.real, J.imag])

    v0 = phases[:h] if symmetric else phases
    sol = least_squares(resid, v0, jac=jac, method="lm",
                        xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=max_iter)
    return expand(sol.x)


def _residual(phases, target_vals, x, real=False):
    Pv = qsp_products(phases, x)[:, 0, 0]
    if real:
        Pv = Pv.real
    return float(np.max(np.abs(Pv - target_vals)))


def _find_full(P, d, x, tol, rng, max_iter):
    target_vals = P(x)
    if d == 0:
        phases = np.array([np.angle(P.coefficients[0])])
        if _residual(phases, target_vals, x) <= tol:
            return PhaseSequence.qsp(phases)
        raise NoConvergence("constant target must be unimodular")
    pc = P.coefficients[: d + 1]
    with mp.workdps(_work_dps(d)):
        pc = [mp.mpc(complex(v)) for v in pc]
        phases = peel_wx(_laurent(pc, _complete_q_mp(pc, d), d))
    err = _residual(phases, target_vals, x)
    if err > tol:
        phases = _polish(phases, target_vals, x, max_iter)
        err = _residual(phases, target_vals, x)
    if err > tol:
        raise NoConvergence(f"residual {err:.3e} exceeds tol {tol:g}")
    return PhaseSequence.qsp(phases)


# ---------------------------------------------------------------- QSP-Wx real part

def _find_real(coeffs, d, x, tol, rng, max_iter, restarts=8):
    f = Polynomial(coeffs, "chebyshev")
    if np.any(np.abs(f(np.array([-1.0, 1.0]))) >= 1):
        raise NotAdmissible("real mode needs |target(+-1)| < 1")
    half = int(np.ceil((d + 1) / 2))
    xs = np.cos(np.pi * (2 * np.arange(1, half + 1) - 1) / (4 * half))
    fit_x = np.concatenate([xs, np.cos(np.pi * (np.arange(4 * half) + 0.5) / (8 * half))])
    fvals = f(fit_x).real
    check = f(x).real
    start = np.zeros(d + 1)
    start[0] = start[-1] = np.pi / 4
    best_err = np.inf
    for attempt in range(restarts):
        init = start if attempt == 0 else start + rng.normal(scale=0.1, size=d + 1)
        init = (init + init[::-1]) / 2
        phases = _polish(init, fvals, fit_x, max_iter, real=True, symmetric=True)
        err = _residual(phases, check, x, real=True)
        if err < best_err:
            best_err = err
        if err <= tol:
            return PhaseSequence.qsp(phases)
    raise NoConvergence(f"real-part fit residual {best_err:.3e} exceeds tol {tol:g}")


# ---------------------------------------------------------------- GQSP

def _outer_q(p, n):
    """Outer-function completion by FFT; None when it is not accurate."""
    d = p.size - 1
    Pv = np.fft.ifft(p, n) * n  # P(z_j) at z_j = exp(2 pi i j / n)
    gap = 1 - np.abs(Pv) ** 2
    if np.min(gap) <= 1e-8:
        return None
    gk = np.fft.fft(0.5 * np.log(gap)) / n
    h = np.zeros(n, dtype=complex)
    h[0] = gk[0]
    h[1:n // 2] = 2 * gk[1:n // 2]
    q = (np.fft.fft(np.exp(np.fft.ifft(h) * n)) / n)[: d + 1]
    # The outer function has all roots outside the disk and a tiny leading
    # coefficient, which makes layer stripping ill-conditioned. Its reversed
    # conjugate has the same modulus on the circle and roots inside.
    q = np.conj(q[::-1])
    err = np.abs(np.abs(Pv) ** 2 + np.abs(np.fft.ifft(q, n) * n) ** 2 - 1)
    return q if np.max(err) < 1e-13 else None


def _roots_q_mp(p):
    """Root-selection completion at the working precision (mpmath lists)."""
    d = len(p) - 1
    # z^d (1 - P(z) conj(P)(1/z)), lowest power first
    L = [-v for v in _pmul(p, [mp.conj(v) for v in p[::-1]])]
    L[d] += 1
    big = max(abs(v) for v in L)
    if big < mp.mpf(10) ** (-mp.mp.dps // 2):
        return [mp.mpc(0)] * (d + 1)
    nz = [k for k, v in enumerate(L) if abs(v) > big * mp.mpf(10) ** (-mp.mp.dps + 10)]
    lo, hi = nz[0], nz[-1]
    roots = _mp_roots(L[lo:hi + 1]) if hi > lo else []
    # Roots pair as r <-> 1/conj(r); zeros at the origin pair with roots at
    # infinity (the trimmed ends). Keep the member inside the unit disk and
    # merge nearby pairs on the circle.
    tiny = mp.mpf(10) ** (-mp.mp.dps // 4)
    inside = [r for r in roots if abs(r) < 1 - tiny]
    circle = sorted((r for r in roots if abs(abs(r) - 1) <= tiny), key=mp.arg)
    kept = inside + [mp.mpc(0)] * lo
    kept += [(circle[i] + circle[i + 1]) / 2 for i in range(0, len(circle) - 1, 2)]
    q = [mp.mpc(1)]
    for r in kept:
        q = _pmul(q, [-r, 1])
    q = (q + [mp.mpc(0)] * (d + 1))[: d + 1]
    # |q|^2 on the circle must match L's constant-term scale: compare at z = 1.
    zs = [mp.expj(2 * mp.pi * k / 7) for k in range(7)]
    want = [1 - abs(mp.polyval(p[::-1], z)) ** 2 for z in zs]
    have = [abs(mp.polyval(q[::-1], z)) ** 2 for z in zs]
    k = max(range(7), key=lambda j: have[j])
    scale = mp.sqrt(max(want[k], 0) / have[k]) if have[k] > 0 else 0
    return [scale * v for v in q]


def complete_q_gqsp(p, n_fft=None):
    """Coefficients of Q with ``|P|^2 + |Q|^2 = 1`` on the unit circle.

    Uses the outer function computed by FFT when ``1 - |P|^2`` stays away
    from zero, and root selection at extended precision otherwise.
    """
    p = np.asarray(p, dtype=complex)
    d = p.size - 1
    n = n_fft or max(1 << 14, 1 << int(np.ceil(np.log2(32 * (d + 1)))))
    q = _outer_q(p, n)
    if q is not None:
        return q
    with mp.workdps(_work_dps(d)):
        q = _roots_q_mp([mp.mpc(complex(v)) for v in p])
        return np.array([complex(v) for v in q])


def _strip_mp(p, q, tiny):
    d = len(p) - 1
    thetas, phis = [], []
    for _ in range(d):
        pd, qd = p[-1], q[-1]
        if abs(pd) > tiny or abs(qd) > tiny:
            theta = mp.atan2(abs(qd), abs(pd))
            phi = mp.arg(pd) - mp.arg(qd) if abs(qd) > tiny else mp.mpf(0)
        else:
            p0, q0 = p[0], q[0]
            theta = mp.atan2(abs(p0), abs(q0))
            phi = mp.arg(p0) - mp.arg(-q0) if abs(p0) > tiny and abs(q0) > tiny else mp.mpf(0)
        c, s = mp.cos(theta), mp.sin(theta)
        e = mp.expj(-phi)
        a = [e * c * u + s * v for u, v in zip(p, q)]
        b = [e * s * u - c * v for u, v in zip(p, q)]
        p, q = a[1:], b[:-1]
        thetas.append(theta)
        phis.append(phi)
    p0, q0 = p[0], q[0]
    lam = mp.arg(q0) if abs(q0) > tiny else mp.mpf(0)
    thetas.append(mp.atan2(abs(q0), abs(p0)))
    phis.append(mp.arg(p0) - lam)
    return thetas[::-1], phis[::-1], lam


def gqsp_strip(p, q, tiny=1e-12):
    """Recover ``(thetas, phis, lam)`` from complementary coefficient vectors.

    Each step fixes the outermost rotation from the leading coefficients of
    P and Q, then divides it and one signal factor out.
    """
    with mp.workdps(_work_dps(len(p))):
        th, ph, lam = _strip_mp([mp.mpc(complex(v)) for v in p],
                                [mp.mpc(complex(v)) for v in q], tiny)
    return (np.array([float(v) for v in th]), np.array([float(v) for v in ph]),
            float(lam))


def _find_gqsp(target, grid_size, tol):
    if target.basis != "monomial":
        raise NotAdmissible("gqsp targets are monomial polynomials in z")
    p = np.array(target.trimmed(1e-15).coefficients, dtype=complex)
    d = p.size - 1
    n = grid_size or max(4 * d + 4, 256)
    z = np.exp(2j * np.pi * np.arange(n) / n)
    Pz = np.polyval(p[::-1], z)
    if np.max(np.abs(Pz)) > 1 + ADMISSIBLE_SLACK:
        raise NotAdmissible("target exceeds 1 in modulus on the unit circle")
    seq, err = None, np.inf
    q = _outer_q(p, max(1 << 14, 1 << int(np.ceil(np.log2(32 * (d + 1))))))
    if q is not None:
        seq = PhaseSequence.gqsp(*gqsp_strip(p, q))
        err = _gqsp_err(seq, z, Pz)
    if err > 1e-12:
        with mp.workdps(_work_dps(d)):
            pm = [mp.mpc(complex(v)) for v in p]
            th, ph, lam = _strip_mp(pm, _roots_q_mp(pm), mp.mpf(10) ** (-mp.mp.dps // 3))
            alt = PhaseSequence.gqsp([float(v) for v in th], [float(v) for v in ph],
                                     float(lam))
        alt_err = _gqsp_err(alt, z, Pz)
        if alt_err < err:
            seq, err = alt, alt_err
    if err > tol:
        raise NoConvergence(f"gqsp residual {err:.3e} exceeds tol {tol:g}")
    return seq


def _gqsp_err(seq, z, Pz):
    pp, _ = gqsp_polynomials(seq)
    return float(np.max(np.abs(np.polyval(pp[::-1], z) - Pz)))
