"""Polynomial container in the monomial or Chebyshev basis."""

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import chebyshev as C
from numpy.polynomial import polynomial as M
from scipy.fft import dct
from scipy.optimize import minimize_scalar

from .errors import QSPForgeError

PARITY_TOL = 1e-12


def _detect_parity(coeffs, tol=PARITY_TOL):
    c = np.abs(np.asarray(coeffs))
    scale = max(c.max(initial=0.0), 1.0)
    even = c[0::2].max(initial=0.0) > tol * scale
    odd = c[1::2].max(initial=0.0) > tol * scale
    if even and odd:
        return "none"
    return "odd" if odd else "even"


@dataclass(frozen=True)
class Polynomial:
    """Coefficients in ``basis`` ("monomial" or "chebyshev"), lowest degree first."""

    coefficients: np.ndarray
    basis: str = "chebyshev"
    parity: str = None

    def __post_init__(self):
        if self.basis not in ("monomial", "chebyshev"):
            raise QSPForgeError(f"unknown basis {self.basis!r}")
        c = np.atleast_1d(np.asarray(self.coefficients, dtype=complex)).copy()
        if c.ndim != 1 or c.size == 0:
            raise QSPForgeError("coefficients must be a non-empty vector")
        if not np.all(np.isfinite(c)):
            raise QSPForgeError("coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)
        detected = _detect_parity(c)
        if self.parity is None:
            object.__setattr__(self, "parity", detected)
        elif self.parity not in ("even", "odd", "none"):
            raise QSPForgeError(f"unknown parity {self.parity!r}")
        elif self.parity != "none" and np.any(c) and detected != self.parity:
            raise QSPForgeError(f"coefficients are not {self.parity}")

    @property
    def is_zero(self):
        return not np.any(self.coefficients)

    @property
    def degree(self):
        nz = np.flatnonzero(np.abs(self.coefficients) > 0)
        return int(nz[-1]) if nz.size else 0

    @property
    def is_real(self):
        return not np.any(self.coefficients.imag)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        c = self.coefficients
        if self.is_real:
            c = c.real
        if self.basis == "chebyshev":
            return C.chebval(x, c)
        return M.polyval(x, c)

    def to_chebyshev(self):
        if self.basis == "chebyshev":
            return self
        return Polynomial(C.poly2cheb(self.coefficients), "chebyshev", self.parity)

    def to_monomial(self):
        if self.basis == "monomial":
            return self
        return Polynomial(C.cheb2poly(self.coefficients), "monomial", self.parity)

    def project_parity(self, parity):
        """Zero the coefficients of the other parity."""
        c = np.array(self.coefficients)
        if parity == "even":
            c[1::2] = 0
        elif parity == "odd":
            c[0::2] = 0
        return Polynomial(c, self.basis, parity)

    def trimmed(self, tol=0.0):
        c = np.array(self.coefficients)
        nz = np.flatnonzero(np.abs(c) > tol)
        c = c[: nz[-1] + 1] if nz.size else c[:1] * 0
        return Polynomial(c, self.basis, self.parity)

    def scaled(self, s):
        return Polynomial(self.coefficients * s, self.basis, self.parity)

    def sup_norm(self, grid_size=2001, domain=(-1.0, 1.0)):
        """Max modulus on ``domain``: grid search, then local refinement."""
        a, b = domain
        x = np.linspace(a, b, grid_size)
        v = np.abs(self(x))
        h = (b - a) / (grid_size - 1)
        best = float(v.max())
        for i in np.argsort(v)[-5:]:
            lo, hi = max(a, x[i] - h), min(b, x[i] + h)
            if hi <= lo:
                continue
            res = minimize_scalar(lambda t: -abs(self(t)), bounds=(lo, hi),
                                  method="bounded", options={"xatol": 1e-14})
            best = max(best, -float(res.fun))
        return best

    def to_dict(self):
        c = self.coefficients
        d = {"basis": self.basis, "parity": self.parity, "real": c.real.tolist()}
        if not self.is_real:
            d["imag"] = c.imag.tolist()
        return d

    @classmethod
    def from_dict(cls, d):
        try:
            c = np.asarray(d["real"], dtype=complex)
            if "imag" in d:
                c = c + 1j * np.asarray(d["imag"], dtype=float)
            return cls(c, d.get("basis", "chebyshev"), d.get("parity"))
        except (KeyError, TypeError, ValueError) as exc:
            raise QSPForgeError(f"malformed polynomial record: {exc}") from exc


def chebyshev_nodes(n):
    """First-kind Chebyshev nodes, descending from near 1 to near -1."""
    k = np.arange(n)
    return np.cos(np.pi * (k + 0.5) / n)


def values_at_nodes(coeffs, m):
    """Chebyshev series values at the ``m`` first-kind nodes, via a DCT."""
    c = np.zeros(m, dtype=complex)
    k = min(m, len(coeffs))
    c[:k] = coeffs[:k]
    return (dct(c.real, type=3) + 1j * dct(c.imag, type=3) + c[0]) / 2


def interpolate(f_values_at, degree, parity=None):
    """Chebyshev interpolant of degree ``degree`` from a vectorized callable.

    Coefficients come from a type-II DCT of the values at first-kind nodes,
    so large degrees stay cheap.

    Args:
        f_values_at: Callable evaluated at ``degree + 1`` first-kind nodes.
        degree: Target degree.
        parity: Optional "even"/"odd" projection applied afterwards.
    """
    x = chebyshev_nodes(degree + 1)
    y = np.broadcast_to(np.asarray(f_values_at(x), dtype=complex), x.shape)
    c = (dct(y.real, type=2) + 1j * dct(y.imag, type=2)) / (degree + 1)
    c[0] /= 2
    p = Polynomial(c, "chebyshev", None)
    if parity in ("even", "odd"):
        p = p.project_parity(parity)
    return p
