"""Arithmetic on block-encodings: sums, products and spectral shifts."""

import numpy as np

from .dilation import _make, chain_dilation
from .errors import BadBlockStructure, BetaOutOfRange, DimensionMismatch
from .linalg import H as HADAMARD, dagger


def _rx(theta):
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def _combined_alpha(beA, beB):
    # Equal subnormalizations give the textbook (A + B) / (2 alpha) payload;
    # otherwise the payload is the average of the two normalized blocks.
    if np.isclose(beA.alpha, beB.alpha, rtol=1e-12, atol=0):
        return 2 * beA.alpha
    return 2.0


def linear_combine(beA, beB):
    """Sum and difference of two block-encodings via Hadamard conjugation.

    Builds ``(H x I) diag(U_A, I) diag(I, U_B) (H x I)`` with the new ancilla
    as the most significant qubit. The upper-left copy of the payload block
    holds ``(A/a_A + B/a_B) / 2`` and the upper-right copy holds the
    difference.

    Returns:
        Tuple ``(sum_be, diff_be)`` sharing one unitary.

    Raises:
        DimensionMismatch: If the unitaries, payload sizes or locators differ.
    """
    UA, UB = beA.unitary, beB.unitary
    if UA.shape != UB.shape or beA.system_dim != beB.system_dim:
        raise DimensionMismatch("block-encodings have different dimensions")
    if (beA.row_block, beA.col_block) != (beB.row_block, beB.col_block):
        raise DimensionMismatch("block-encodings use different block locators")
    D, N = UA.shape[0], beA.system_dim
    if D % N:
        raise BadBlockStructure("unitary size is not a multiple of the payload size")
    Hd = np.kron(HADAMARD, np.eye(D))
    ctrl = np.zeros((2 * D, 2 * D), dtype=complex)
    ctrl[:D, :D] = UA
    ctrl[D:, D:] = UB
    U = Hd @ ctrl @ Hd
    alpha = _combined_alpha(beA, beB)
    r, c = beA.row_block, beA.col_block
    tag = f"({beA.provenance}, {beB.provenance})"
    sum_be = _make(U, alpha, N, r, c, provenance="sum" + tag)
    diff_be = _make(U, alpha, N, r, c + D // N, provenance="diff" + tag)
    return sum_be, diff_be


def hermitize(be):
    """Hermitian unitary whose payload is the Hermitian part of ``be``'s payload.

    Uses ``(H x I)(|0><1| x U + |1><0| x U^dagger)(H x I)``, which block-encodes
    ``(U + U^dagger) / 2`` on the new ancilla's zero state.

    Raises:
        BadBlockStructure: If the payload is not on the block diagonal.
    """
    if be.row_block != be.col_block:
        raise BadBlockStructure("payload must sit on a diagonal block")
    U = be.unitary
    D = U.shape[0]
    M = np.zeros((2 * D, 2 * D), dtype=complex)
    M[:D, D:] = U
    M[D:, :D] = dagger(U)
    Hd = np.kron(HADAMARD, np.eye(D))
    W = Hd @ M @ Hd
    W = (W + dagger(W)) / 2
    return _make(W, be.alpha, be.system_dim, be.row_block, be.col_block,
                 provenance=f"hermitize({be.provenance})")


def _check_top_left(bes):
    N = bes[0].system_dim
    for be in bes:
        if be.system_dim != N:
            raise DimensionMismatch("payload dimensions differ")
        if be.row_block or be.col_block:
            raise BadBlockStructure("payload must sit in the top-left block")


def multiply(beA, beB):
    """Block-encoding of ``A B`` from two chain-lifted (k = 2) dilations.

    Raises:
        DimensionMismatch: If the payload or dilation sizes differ.
    """
    return multiply_many([beA, beB], 2)


def multiply_many(bes, p=None):
    """Block-encoding of the product ``A_1 A_2 ... A_p``.

    Every factor is lifted to a chain dilation with ``k = p``; the product of
    the lifted unitaries carries the product of payloads in its top-left
    block. The ancilla overhead is ``ceil(log2(p + 1))`` for 2N inputs.

    Raises:
        DimensionMismatch: If ``p`` disagrees with ``len(bes)``, ``p < 2``, or
            the factors have different sizes.
    """
    bes = list(bes)
    if p is None:
        p = len(bes)
    if p != len(bes) or p < 2:
        raise DimensionMismatch(f"expected p = len(bes) >= 2, got p={p}, {len(bes)} factors")
    _check_top_left(bes)
    if len({be.dim for be in bes}) != 1:
        raise DimensionMismatch("factors must be dilations of equal size")
    lifted = [chain_dilation(be, p) for be in bes]
    V = lifted[0].unitary
    for L in lifted[1:]:
        V = V @ L.unitary
    alpha = float(np.prod([be.alpha for be in bes]))
    tag = ",".join(be.provenance for be in bes)
    return _make(V, alpha, bes[0].system_dim, provenance=f"product[{tag}]", p=p)


def shift_rescale(beH, beta):
    """Block-encoding of ``(I + beta H/alpha) / 2`` with two extra ancillas.

    The ``beta`` scaling comes from ``R_x(2 arccos beta)`` on a fresh ancilla
    tensored with ``U_H``; an identity block-encoding is then added to it with
    :func:`linear_combine`. The result has ``alpha = 1``.

    Raises:
        BetaOutOfRange: Unless ``0 < beta <= 1``.
    """
    if not 0 < beta <= 1:
        raise BetaOutOfRange(f"beta={beta} outside (0, 1]")
    U = beH.unitary
    scaled = np.kron(_rx(2 * np.arccos(beta)), U)
    N = beH.system_dim
    be_scaled = _make(scaled, 1.0, N, beH.row_block, beH.col_block, provenance="rx-scaled")
    be_id = _make(np.eye(scaled.shape[0]), 1.0, N, beH.row_block, beH.col_block,
                  provenance="identity")
    summed, _ = linear_combine(be_id, be_scaled)
    return _make(summed.unitary, 1.0, N, summed.row_block, summed.col_block,
                 provenance=f"shift_rescale(beta={beta:g}, rx ancilla)<-{beH.provenance}",
                 beta=beta)
