"""Statevector utilities and overlap estimation.

Wire 0 is the most significant qubit throughout, matching the circuit and
block-encoding layouts.
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .circuit import CircuitIR, Gate
from .errors import DimensionMismatch, LengthMismatch, QSPForgeError, ZeroProbability
from .linalg import PAULI, QuantumState
from .transforms import STEP_LOW, _step_fit, step_degree, step_steepness

SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)


def _as_state(state):
    if isinstance(state, QuantumState):
        return state
    return QuantumState.from_vector(state)


def apply_encoding(be, state):
    """Run ``be.unitary`` on ``|0...0>`` ancillas times ``state``.

    Returns:
        :class:`QuantumState` on ancillas plus system, ancillas first.
    """
    state = _as_state(state)
    if not be.simulable or be.system_dim != state.amplitudes.size:
        raise DimensionMismatch("state does not match the encoded system")
    vec = np.zeros(be.dim, dtype=complex)
    vec[be.col_block * be.system_dim:(be.col_block + 1) * be.system_dim] = state.amplitudes
    out = be.unitary @ vec
    return QuantumState(be.ancilla_count + state.qubit_count, out / np.linalg.norm(out))


def postselect(state, ancilla_wires, pattern):
    """Project ``ancilla_wires`` onto ``pattern`` and renormalize.

    Args:
        state: :class:`QuantumState` or amplitude vector.
        ancilla_wires: Wire indices, paired in order with ``pattern``.
        pattern: Bitstring such as ``"000"``.

    Returns:
        Tuple ``(state, probability)``; the state lives on the remaining
        wires in their original order.

    Raises:
        ZeroProbability: If the outcome has probability zero.
    """
    state = _as_state(state)
    wires = list(ancilla_wires)
    n = state.qubit_count
    if len(wires) != len(pattern):
        raise LengthMismatch("pattern length differs from the wire count")
    if len(set(wires)) != len(wires) or any(w < 0 or w >= n for w in wires):
        raise QSPForgeError(f"invalid ancilla wires {wires}")
    psi = state.amplitudes.reshape((2,) * n)
    idx = [slice(None)] * n
    for w, b in zip(wires, pattern):
        idx[w] = int(b)
    kept = np.array(psi[tuple(idx)]).reshape(-1)
    prob = float(np.vdot(kept, kept).real)
    if prob <= 1e-300:
        raise ZeroProbability(f"outcome {pattern} has zero probability")
    return QuantumState(n - len(wires), kept / np.sqrt(prob)), prob


def _apply_pauli(psi, string):
    n = len(string)
    t = psi.reshape((2,) * n)
    for w, p in enumerate(string):
        if p != "I":
            t = np.moveaxis(np.tensordot(PAULI[p], t, axes=(1, w)), 0, w)
    return t.reshape(-1)


def pauli_expectation(state, term):
    """``c <psi|P|psi>`` for a :class:`PauliTerm` ``c P``."""
    state = _as_state(state)
    if len(term.string) != state.qubit_count:
        raise LengthMismatch(
            f"string {term.string} does not act on {state.qubit_count} qubits")
    psi = state.amplitudes
    return term.coefficient * float(np.vdot(psi, _apply_pauli(psi, term.string)).real)


def energy(state, H):
    """Expectation of a :class:`PauliHamiltonian`."""
    return float(sum(pauli_expectation(state, t) for t in H.terms))


def _z_on(state, wire):
    p = state.probabilities().reshape((2,) * state.qubit_count)
    p = np.moveaxis(p, wire, 0).reshape(2, -1).sum(axis=1)
    return float(p[0] - p[1])


def magnetization(state):
    """Sum of single-qubit ``<Z>`` over all wires."""
    state = _as_state(state)
    return float(sum(_z_on(state, w) for w in range(state.qubit_count)))


def occupation(state, wire):
    """``<(I - Z) / 2>`` on ``wire`` (0-based)."""
    state = _as_state(state)
    if not 0 <= wire < state.qubit_count:
        raise QSPForgeError(f"wire {wire} outside 0..{state.qubit_count - 1}")
    return (1.0 - _z_on(state, wire)) / 2


def swap_test_circuit(n):
    """Hadamard, controlled swaps of the two ``n``-qubit registers, Hadamard."""
    ir = CircuitIR(2 * n + 1)
    ir.add(Gate("h", (0,)))
    for k in range(n):
        ir.add(Gate("unitary", (1 + k, 1 + n + k), (0,), (1,), matrix=SWAP))
    ir.add(Gate("h", (0,)))
    return ir


def swap_test_probability(psi1, psi2):
    """Probability of reading 0 on the control of the swap test."""
    psi1, psi2 = _as_state(psi1), _as_state(psi2)
    n = psi1.qubit_count
    if psi2.qubit_count != n:
        raise DimensionMismatch("states act on different qubit counts")
    vec = np.kron([1.0, 0.0], np.kron(psi1.amplitudes, psi2.amplitudes))
    out = swap_test_circuit(n).apply(vec)
    half = out[: out.size // 2]
    return float(np.vdot(half, half).real)


# ---------------------------------------------------------------- bisection

@dataclass
class BisectionResult:
    """Outcome of :func:`bisection_overlap`.

    Attributes:
        estimate: Midpoint of the final bracket, an estimate of ``a``.
        interval: Final bracket ``(lo, hi)``.
        overlap: ``2 estimate**2 - 1``, the implied ``|<psi1|psi2>|**2``.
        failed: True if any round's vote was ambiguous (``a`` sat on a step edge).
        queries: Degree-weighted query count (ideal mode: one per round).
        degree: Step-polynomial degree (0 in ideal mode).
        history: Per round ``(a0, above, vote_fraction)``.
    """

    estimate: float
    interval: tuple
    overlap: float
    failed: bool
    queries: int
    degree: int
    history: list = field(default_factory=list)


@lru_cache(maxsize=4096)
def _round_step(a0, w, d, eps):
    # Bracket midpoints lie on a dyadic grid, so trials share these fits.
    return _step_fit(a0, w, d, step_steepness(w, eps), refine=False)


@lru_cache(maxsize=64)
def _round_degree(a0, w, eps):
    return step_degree(a0, w, eps)


def bisection_overlap(psi1, psi2, precision_bits, mode="ideal", shots=99, seed=None,
                      width_factor=1.0, step_eps=1e-2, ambiguous=0.25):
    """Bisect ``a = sqrt(1/2 + |<psi1|psi2>|^2 / 2)`` on ``[1/sqrt(2), 1]``.

    Each round asks whether ``a`` exceeds the bracket midpoint ``a0``. The
    ideal mode answers with an exact step function. The sampled mode
    evaluates a step polynomial of edge width
    ``w = width_factor (1 - 1/sqrt(2)) 2**-n`` at ``a``, draws ``shots``
    outcomes with success probability ``P(a)**2`` and takes the majority.

    Args:
        psi1, psi2: States of equal size.
        precision_bits: Number of rounds ``n``.
        mode: ``"ideal"`` or ``"sampled"``.
        shots: Odd shot count per round (sampled mode).
        seed: Seed for the sampled mode's generator.
        width_factor: Edge width relative to the final bracket width.
        step_eps: Plateau error of the step polynomial.
        ambiguous: A round is ambiguous when its vote fraction lies within
            this distance of 1/2.

    Returns:
        :class:`BisectionResult`.
    """
    n = int(precision_bits)
    if n < 1:
        raise QSPForgeError("precision_bits must be at least 1")
    if mode not in ("ideal", "sampled"):
        raise QSPForgeError(f"unknown mode {mode!r}")
    a = float(np.sqrt(np.clip(swap_test_probability(psi1, psi2), 0.5, 1.0)))
    lo, hi = float(STEP_LOW), 1.0
    history = []
    failed = False
    if mode == "ideal":
        degree, queries = 0, n
    else:
        if shots < 1 or shots % 2 == 0:
            raise QSPForgeError("shots must be a positive odd number")
        rng = np.random.default_rng(seed)
        w = width_factor * (1.0 - STEP_LOW) * 2.0 ** -n
        degree = _round_degree((lo + hi) / 2, w, step_eps)
        queries = n * shots * degree
    for _ in range(n):
        a0 = (lo + hi) / 2
        if mode == "ideal":
            above, frac = a >= a0, float(a >= a0)
        else:
            p = min(max(_round_step(a0, w, degree, step_eps)(a), 0.0), 1.0) ** 2
            frac = rng.binomial(shots, p) / shots
            above = frac > 0.5
            failed |= abs(frac - 0.5) < ambiguous
        history.append((a0, bool(above), frac))
        if above:
            lo = a0
        else:
            hi = a0
    est = (lo + hi) / 2
    return BisectionResult(est, (lo, hi), 2 * est ** 2 - 1, bool(failed), int(queries),
                           int(degree), history)
