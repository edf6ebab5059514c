"""Energy and occupation of H2 (STO-3G, Jordan-Wigner) started from |0110>."""

import numpy as np

from qspforge.cli import evolve_curve
from qspforge.io import load_h2_fixture

H = load_h2_fixture()
print(f"{len(H.terms)} Pauli terms on {H.qubit_count} qubits, lambda = {H.lam:.4f}")
print(f"ground energy {np.linalg.eigvalsh(H.to_matrix())[0]:.6f} Ha")

t = np.linspace(0.0, 2.0, 21)
for obs in ("energy", "occupation:2"):
    cols = dict(evolve_curve(H, t, [15], "0110", obs))
    exact, approx = np.array(cols["exact"]), np.array(cols["d15"])
    print(f"{obs:>13}: exact range [{exact.min():.4f}, {exact.max():.4f}], "
          f"d=15 max deviation {np.max(np.abs(approx - exact)):.1e}")
