"""Command-line front end.

Exit codes: 0 on success, 1 on domain errors (bad input files, infeasible
requests, failed angle finding), 2 on usage errors.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import io
from .angles import find_angles
from .dilation import extract_block, hermitian_dilation, minimal_dilation
from .errors import QSPForgeError
from .estimate import (
    apply_encoding,
    bisection_overlap,
    energy,
    magnetization,
    occupation,
    postselect,
)
from .lcu import assemble_lcu, gate_count, sparse_block_encoding
from .linalg import QuantumState, matrix_exponential, spectral_norm
from .transforms import (
    critical_degree,
    error_budget,
    hamiltonian_simulation,
    jacobi_anger_coefficients,
    qite_transform,
)


def _default_seed():
    try:
        return int(os.environ.get("QSPFORGE_SEED", "0"))
    except ValueError:
        return 0


def _fmt(x):
    """Shortest scientific form, e.g. ``1e-4`` or ``2.5e-3``."""
    if x == 0:
        return "0"
    mant, exp = f"{x:.12e}".split("e")
    mant = mant.rstrip("0").rstrip(".")
    return f"{mant}e{int(exp)}"


# ---------------------------------------------------------------- encode

def _encode(H, method):
    M = H.to_matrix()
    if method == "lcu":
        return assemble_lcu(H)
    nrm = spectral_norm(M)
    if method == "hermitian":
        return hermitian_dilation(M, nrm)
    if method == "minimal":
        be = minimal_dilation(M / nrm)
        return be.with_unitary(be.unitary, alpha=nrm)
    N = M.shape[0]
    offsets = sorted({(i - j) % N for i, j in zip(*np.nonzero(np.abs(M) > 1e-12))})
    scale = float(np.max(np.abs(M)))
    be = sparse_block_encoding(lambda i, j: M[i, j] / scale, H.qubit_count, offsets)
    return be.with_unitary(be.unitary, alpha=be.alpha * scale)


def cmd_encode(args):
    H = io.load_hamiltonian(args.hamiltonian)
    be = _encode(H, args.method)
    err = np.max(np.abs(be.alpha * extract_block(be) - H.to_matrix()))
    print(f"method      {args.method}")
    print(f"qubits      {H.qubit_count}")
    print(f"terms       {len(H)}")
    print(f"alpha       {be.alpha:.12g}")
    print(f"ancillas    {be.ancilla_count}")
    print(f"dimension   {be.dim}")
    print(f"block error {err:.3e}")
    if args.report == "gates":
        if args.method != "lcu":
            print("gate report is only available for lcu", file=sys.stderr)
            return 1
        prep = gate_count(be.meta["prepare_ir"])
        sel = gate_count(be.meta["select_ir"])
        print("stage    kind     count")
        print(f"prepare  ry       {prep['ry']}")
        print(f"select   mcpauli  {sel['mcpauli']}")
        print(f"total    gates    {len(be.meta['circuit'].gates)}")
    return 0


# ---------------------------------------------------------------- angles

def cmd_angles(args):
    target = io.load_polynomial(args.target)
    seq = find_angles(target, args.convention, tol=args.tol, mode=args.mode, seed=args.seed)
    if args.output:
        io.save_phases(seq, args.output)
    else:
        print(json.dumps(seq.to_dict(), indent=1))
    return 0


# ---------------------------------------------------------------- evolve

def _observable(name, H):
    if name == "magnetization":
        return magnetization
    if name == "energy":
        return lambda s: energy(s, H)
    if name.startswith("occupation:"):
        wire = int(name.split(":", 1)[1])
        return lambda s: occupation(s, wire)
    raise QSPForgeError(f"unknown observable {name!r}")


def evolve_curve(H, t_values, degrees, initial, observable, route="gqsp", eps=1e-6):
    """Exact and polynomial-evolution observable curves.

    Returns:
        List of ``(label, values)`` columns: ``t``, ``exact``, ``d<K>``...
    """
    obs = _observable(observable, H)
    psi0 = QuantumState.basis(initial)
    if psi0.qubit_count != H.qubit_count:
        raise QSPForgeError("initial state size differs from the Hamiltonian")
    M = H.to_matrix()
    be = assemble_lcu(H)
    exact = [obs(QuantumState.from_vector(matrix_exponential(M, t) @ psi0.amplitudes,
                                          normalize=True)) for t in t_values]
    cols = [("t", list(t_values)), ("exact", exact)]
    for d in degrees:
        vals = []
        for t in t_values:
            out = hamiltonian_simulation(be, t, eps=eps, route=route, degree=d)
            full = apply_encoding(out, psi0)
            state, _ = postselect(full, range(out.ancilla_count), "0" * out.ancilla_count)
            vals.append(obs(state))
        cols.append((f"d{d}", vals))
    return cols


def cmd_evolve(args):
    H = io.load_hamiltonian(args.hamiltonian)
    degrees = [int(d) for d in args.degrees.split(",") if d.strip()]
    if not degrees or min(degrees) < 0:
        raise QSPForgeError("degrees must be a comma-separated list of nonnegative integers")
    t = np.linspace(0.0, args.t_max, args.steps + 1)
    cols = evolve_curve(H, t, degrees, args.initial, args.observable, args.route)
    if args.output:
        io.save_curve(cols, args.output)
    else:
        sys.stdout.write(io.format_curve(cols))
    return 0


# ---------------------------------------------------------------- qite

def cmd_qite(args):
    H = io.load_hamiltonian(args.hamiltonian)
    be = assemble_lcu(H)
    psi0 = QuantumState.basis(args.initial)
    out, bound = qite_transform(be, args.tau, args.lam, args.degree, state=psi0.amplitudes)
    full = apply_encoding(out, psi0)
    state, prob = postselect(full, range(out.ancilla_count), "0" * out.ancilla_count)
    w, v = np.linalg.eigh(H.to_matrix())
    fid = abs(np.vdot(v[:, 0], state.amplitudes)) ** 2
    print(f"ground energy        {w[0]:.10f}")
    print(f"initial energy       {energy(psi0, H):.10f}")
    print(f"filtered energy      {energy(state, H):.10f}")
    print(f"ground fidelity      {fid:.10f}")
    print(f"success probability  {prob:.10f}")
    print(f"reference bound      {bound:.10f}")
    return 0


# ---------------------------------------------------------------- overlap

def _overlap_pair(overlap, qubits, seed):
    rng = np.random.default_rng(seed)
    dim = 2 ** qubits
    v = rng.normal(size=(dim, 2)) + 1j * rng.normal(size=(dim, 2))
    q, _ = np.linalg.qr(v)
    c = np.sqrt(overlap)
    return (QuantumState.from_vector(q[:, 0]),
            QuantumState.from_vector(c * q[:, 0] + np.sqrt(1 - overlap) * q[:, 1],
                                     normalize=True))


def cmd_overlap(args):
    if not 0 <= args.overlap <= 1:
        raise QSPForgeError("overlap must lie in [0, 1]")
    psi1, psi2 = _overlap_pair(args.overlap, args.qubits, args.seed)
    res = bisection_overlap(psi1, psi2, args.bits, args.mode, args.shots, args.seed)
    a = np.sqrt(0.5 + 0.5 * args.overlap)
    print(f"true a         {a:.10f}")
    print(f"estimate a     {res.estimate:.10f}")
    print(f"interval       {res.interval[0]:.10f} {res.interval[1]:.10f}")
    print(f"overlap        {res.overlap:.10f}")
    print(f"failed         {str(res.failed).lower()}")
    print(f"step degree    {res.degree}")
    print(f"queries        {res.queries}")
    return 0


# ---------------------------------------------------------------- budget

def cmd_budget(args):
    if args.eps_b is not None:
        tau = args.tau

        def eps_f(d):
            cos_p, sin_p = jacobi_anger_coefficients(tau, d)
            x = np.linspace(-1, 1, 2001)
            return float(np.max(np.abs(cos_p(x) - 1j * sin_p(x) - np.exp(-1j * tau * x))))

        print(critical_degree(args.eps_b, eps_f, args.d_max))
        return 0
    if args.eps_f is None or args.degree is None:
        raise QSPForgeError("give --eps-f and --degree, or --eps-b")
    print(_fmt(error_budget(args.eps_f, args.degree)))
    return 0


# ---------------------------------------------------------------- parser

def build_parser():
    p = argparse.ArgumentParser(
        prog="qspforge",
        description="Block-encodings, quantum signal processing and polynomial "
                    "transforms on a dense statevector simulator.")
    sub = p.add_subparsers(dest="command", required=True)
    seed = _default_seed()

    e = sub.add_parser("encode", help="block-encode a Pauli Hamiltonian",
                       description="Block-encode a Pauli Hamiltonian by linear "
                                   "combination of unitaries, Hermitian dilation, "
                                   "minimal unitary dilation or sparse access.")
    e.add_argument("hamiltonian")
    e.add_argument("--method", choices=["lcu", "hermitian", "minimal", "sparse"], default="lcu")
    e.add_argument("--report", choices=["gates"])
    e.set_defaults(func=cmd_encode)

    a = sub.add_parser("angles", help="phase factors for a target polynomial",
                       description="Find QSP (Wx convention) or generalized QSP phase "
                                   "factors reproducing a polynomial stored as JSON.")
    a.add_argument("--target", required=True)
    a.add_argument("--convention", choices=["qsp", "gqsp"], default="qsp")
    a.add_argument("--mode", choices=["full", "real"], default="full")
    a.add_argument("--tol", type=float, default=1e-6)
    a.add_argument("--seed", type=int, default=seed)
    a.add_argument("-o", "--output")
    a.set_defaults(func=cmd_angles)

    v = sub.add_parser("evolve", help="Hamiltonian simulation curves",
                       description="Time evolution by Jacobi-Anger polynomials applied "
                                   "through generalized QSP on the qubitization walk "
                                   "of an LCU block-encoding. Writes t, exact and one "
                                   "column per degree.")
    v.add_argument("hamiltonian")
    v.add_argument("--t-max", type=float, default=5.0)
    v.add_argument("--steps", type=int, default=100)
    v.add_argument("--degrees", default="5,10,15")
    v.add_argument("--initial", required=True)
    v.add_argument("--observable", default="magnetization",
                   help="magnetization, energy or occupation:<wire>")
    v.add_argument("--route", choices=["gqsp", "lcu-cos-sin"], default="gqsp")
    v.add_argument("-o", "--output")
    v.set_defaults(func=cmd_evolve)

    q = sub.add_parser("qite", help="imaginary-time ground-state filter",
                       description="Chebyshev approximation of the imaginary-time "
                                   "propagator applied to an LCU block-encoding, "
                                   "followed by post-selection.")
    q.add_argument("hamiltonian")
    q.add_argument("--tau", type=float, default=5.0)
    q.add_argument("--lam", type=float, default=1.0)
    q.add_argument("--degree", type=int, default=30)
    q.add_argument("--initial", required=True)
    q.set_defaults(func=cmd_qite)

    o = sub.add_parser("overlap", help="swap-test overlap by step-polynomial bisection",
                       description="Estimate a = sqrt(1/2 + |<psi1|psi2>|^2 / 2) by "
                                   "bisection with step polynomials applied to the "
                                   "swap-test amplitude.")
    o.add_argument("--bits", type=int, default=6)
    o.add_argument("--shots", type=int, default=99)
    o.add_argument("--seed", type=int, default=seed)
    o.add_argument("--mode", choices=["ideal", "sampled"], default="sampled")
    o.add_argument("--overlap", type=float, default=0.3)
    o.add_argument("--qubits", type=int, default=2)
    o.set_defaults(func=cmd_overlap)

    b = sub.add_parser("budget", help="deterministic error budget",
                       description="Per-query block-encoding error eps_f / d, or the "
                                   "critical degree for a given per-query error using "
                                   "the Jacobi-Anger truncation error curve.")
    b.add_argument("--eps-f", type=float)
    b.add_argument("--degree", type=int)
    b.add_argument("--eps-b", type=float)
    b.add_argument("--tau", type=float, default=1.0)
    b.add_argument("--d-max", type=int, default=200)
    b.set_defaults(func=cmd_budget)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (QSPForgeError, ValueError) as exc:
        print(f"qspforge: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
