"""Swap-test overlap estimation by step-polynomial bisection.

Prints the per-round votes for one run, then the query constant
queries / ((1/eps) log2(1/eps)) for eps = 2^-n.
"""

import numpy as np

from qspforge.estimate import bisection_overlap

rng = np.random.default_rng(7)
q, _ = np.linalg.qr(rng.normal(size=(4, 2)) + 1j * rng.normal(size=(4, 2)))
overlap = 0.3
psi1 = q[:, 0]
psi2 = np.sqrt(overlap) * q[:, 0] + np.sqrt(1 - overlap) * q[:, 1]
a = np.sqrt(0.5 + 0.5 * overlap)

res = bisection_overlap(psi1, psi2, 6, mode="sampled", shots=99, seed=7)
for a0, above, frac in res.history:
    print(f"a0={a0:.5f}  vote {frac:.2f}  {'above' if above else 'below'}")
print(f"true a {a:.5f}, estimate {res.estimate:.5f}, overlap {res.overlap:.4f}, "
      f"failed {res.failed}, step degree {res.degree}")

for n in range(4, 9):
    r = bisection_overlap(psi1, psi2, n, mode="sampled", shots=99, seed=n)
    print(f"n={n}  queries {r.queries:9d}  constant {r.queries / (n * 2 ** n):.0f}")
