"""Imaginary-time filtering towards the ground state of a 2-qubit Hamiltonian."""

import numpy as np

from qspforge.estimate import apply_encoding, energy, postselect
from qspforge.lcu import PauliHamiltonian, assemble_lcu
from qspforge.linalg import QuantumState
from qspforge.transforms import qite_transform

H = PauliHamiltonian([(0.8, "ZZ"), (0.3, "XI"), (0.3, "IX"), (-0.2, "ZI")])
be = assemble_lcu(H)
w, v = np.linalg.eigh(H.to_matrix())
lam = min(1.0, -w[0] / be.alpha)
psi = QuantumState.from_vector(np.full(4, 0.5))

for tau in (1.0, 3.0, 5.0, 8.0):
    out, bound = qite_transform(be, tau, lam, 48, state=psi.amplitudes)
    full = apply_encoding(out, psi)
    state, prob = postselect(full, range(out.ancilla_count), "0" * out.ancilla_count)
    fid = abs(np.vdot(v[:, 0], state.amplitudes)) ** 2
    print(f"tau={tau:4.1f}  energy {energy(state, H):+.6f} (ground {w[0]:+.6f})  "
          f"fidelity {fid:.6f}  success {prob:.4f} >= {bound:.4f}")
