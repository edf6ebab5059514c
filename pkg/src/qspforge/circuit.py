"""Minimal gate-level circuit representation and dense evaluation.

Wires are numbered from 0 (most significant). Controlled gates fire when
every control wire holds the matching value in ``control_values``.
"""

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import QSPForgeError
from .linalg import H as HADAMARD, PAULI, X as PAULI_X

GATE_KINDS = ("ry", "h", "x", "mcpauli", "unitary")


def ry(theta):
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


@dataclass(frozen=True)
class Gate:
    kind: str
    wires: tuple
    controls: tuple = ()
    control_values: tuple = ()
    param: float = 0.0
    pauli: str = ""
    phase: complex = 1.0
    matrix: np.ndarray = field(default=None, compare=False, repr=False)

    def target_matrix(self):
        if self.kind == "ry":
            return ry(self.param)
        if self.kind == "h":
            return HADAMARD
        if self.kind == "x":
            return PAULI_X
        if self.kind == "unitary":
            return np.asarray(self.matrix, dtype=complex)
        raise QSPForgeError(f"gate kind {self.kind!r} has no single target matrix")


@dataclass
class CircuitIR:
    qubit_count: int
    gates: list = field(default_factory=list)

    def add(self, gate):
        used = tuple(gate.wires) + tuple(gate.controls)
        if any(w < 0 or w >= self.qubit_count for w in used):
            raise QSPForgeError(f"gate {gate.kind} uses a wire outside 0..{self.qubit_count - 1}")
        if len(set(used)) != len(used):
            raise QSPForgeError("gate wires and controls overlap")
        if gate.kind not in GATE_KINDS:
            raise QSPForgeError(f"unknown gate kind {gate.kind!r}")
        self.gates.append(gate)
        return self

    def extend(self, gates):
        for g in gates:
            self.add(g)
        return self

    def inverse(self):
        inv = CircuitIR(self.qubit_count)
        for g in reversed(self.gates):
            if g.kind == "ry":
                inv.add(Gate("ry", g.wires, g.controls, g.control_values, -g.param))
            elif g.kind == "unitary":
                inv.add(Gate("unitary", g.wires, g.controls, g.control_values,
                             matrix=np.conj(g.matrix).T))
            elif g.kind == "mcpauli":
                inv.add(Gate("mcpauli", g.wires, g.controls, g.control_values,
                             pauli=g.pauli, phase=np.conj(g.phase)))
            else:
                inv.add(g)
        return inv

    def to_matrix(self):
        dim = 2 ** self.qubit_count
        psi = np.eye(dim, dtype=complex).reshape((2,) * self.qubit_count + (dim,))
        for g in self.gates:
            psi = apply_gate(psi, g)
        return psi.reshape(dim, dim)

    def apply(self, vec):
        """Apply the circuit to a state vector (or a stack of column vectors)."""
        vec = np.asarray(vec, dtype=complex)
        cols = vec.reshape(2 ** self.qubit_count, -1)
        psi = cols.reshape((2,) * self.qubit_count + (cols.shape[1],))
        for g in self.gates:
            psi = apply_gate(psi, g)
        return psi.reshape(vec.shape)


def _apply_targets(psi, u, targets, controls, values):
    psi = np.array(psi, copy=True)
    idx = [slice(None)] * psi.ndim
    for c, v in zip(controls, values):
        idx[c] = v
    idx = tuple(idx)
    sub = psi[idx]
    axes = [t - sum(c < t for c in controls) for t in targets]
    k = len(targets)
    ut = u.reshape((2,) * (2 * k))
    out = np.tensordot(ut, sub, axes=(list(range(k, 2 * k)), axes))
    psi[idx] = np.moveaxis(out, list(range(k)), axes)
    return psi


def apply_gate(psi, g):
    """Apply one gate to a tensor of shape ``(2,)*n + (batch,)``."""
    if g.kind == "mcpauli":
        mats = [PAULI[p] for p in g.pauli]
        u = np.array([[g.phase]], dtype=complex)
        for m in mats:
            u = np.kron(u, m)
        return _apply_targets(psi, u, list(g.wires), g.controls, g.control_values)
    return _apply_targets(psi, g.target_matrix(), list(g.wires), g.controls, g.control_values)


def gate_count(ir):
    """Gate totals per kind plus a histogram of control arity per kind.

    Returns:
        Dict mapping each kind to its count, and ``"arity"`` to a dict
        ``{kind: {n_controls: count}}``.
    """
    counts = {k: 0 for k in GATE_KINDS}
    arity = {k: Counter() for k in GATE_KINDS}
    for g in ir.gates:
        counts[g.kind] += 1
        arity[g.kind][len(g.controls)] += 1
    counts["arity"] = {k: dict(sorted(v.items())) for k, v in arity.items()}
    return counts
