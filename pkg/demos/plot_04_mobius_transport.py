"""
Moving the critical point off the origin
========================================

A disk automorphism sending ``p`` to 0 turns the curvature bound at the
origin into one at ``p``. Composing the extremal function with the right
rotation attains it.
"""

import numpy as np

from nodal_atlas import ExtremalSpec, extremal_series
from nodal_atlas.mobius import MobiusMap, equality_theta, transported_bound, transported_curvatures

for n in (1, 2):
    w = extremal_series(ExtremalSpec(n), 128)
    for p in (0.25, 0.5, 0.3j, -0.2 + 0.3j):
        best = max(
            float(np.max(np.abs(transported_curvatures(w, MobiusMap(p, equality_theta(n, p, q, j))))))
            for q in range(2 * n) for j in (0, 1)
        )
        print(f"n={n} p={p!s:>12}: bound {transported_bound(n, p):.6f}, attained {best:.6f}")

# %%
# A generic rotation stays strictly below.
w = extremal_series(ExtremalSpec(1), 128)
print("theta=0.3:", np.round(transported_curvatures(w, MobiusMap(0.5, 0.3)), 4))
