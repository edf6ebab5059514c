"""Spin-chain Hamiltonians with open boundaries."""

from .errors import QSPForgeError
from .lcu import PauliHamiltonian, PauliTerm


def _string(n, ops):
    s = ["I"] * n
    for w, p in ops:
        s[w] = p
    return "".join(s)


def ising_chain(n, J=1.0, g=0.25, sign_convention="example"):
    """Transverse-field Ising chain.

    ``"example"`` gives ``J sum Z_i Z_{i+1} + g sum X_i``; ``"general"``
    gives ``-J sum Z_i Z_{i+1} + g sum X_i``.
    """
    if n < 1:
        raise QSPForgeError("n must be at least 1")
    if sign_convention not in ("example", "general"):
        raise QSPForgeError(f"unknown sign convention {sign_convention!r}")
    zz = J if sign_convention == "example" else -J
    terms = [PauliTerm(zz, _string(n, [(i, "Z"), (i + 1, "Z")])) for i in range(n - 1)]
    terms += [PauliTerm(g, _string(n, [(i, "X")])) for i in range(n)]
    return PauliHamiltonian(terms, n)


def heisenberg(n, Jx=1.0, Jy=1.0, Jz=1.0, g=0.0):
    """``-sum (Jx XX + Jy YY + Jz ZZ)`` on neighbours plus ``g sum Z_i``."""
    if n < 1:
        raise QSPForgeError("n must be at least 1")
    terms = []
    for i in range(n - 1):
        for p, J in (("X", Jx), ("Y", Jy), ("Z", Jz)):
            terms.append(PauliTerm(-J, _string(n, [(i, p), (i + 1, p)])))
    terms += [PauliTerm(g, _string(n, [(i, "Z")])) for i in range(n)]
    return PauliHamiltonian(terms, n)
