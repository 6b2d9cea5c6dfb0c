"""
Curvature at a critical point and the functions that attain the bound
======================================================================

A harmonic ``u = Re w`` with a critical point of order ``n`` at the origin
has ``2n`` nodal branches leaving 0. Their curvatures there are bounded by
``4(n+1)/n * cos(n alpha0)``; the extremal functions below reach it.
"""

import numpy as np

from nodal_atlas import ExtremalFunction, ExtremalSpec, curvature_bound, verify_extremal_curvature
from nodal_atlas.cli import render_svg
from nodal_atlas.geometry import trace_nodal_set

# %%
# Every admissible direction phi0 gives an extremal function; the attaining
# branch is reported alongside all 2n branch curvatures.
for n in (1, 2, 3, 4):
    for k in range(n):
        rep = verify_extremal_curvature(ExtremalSpec(n, k))
        print(f"n={n} k={k}  bound={curvature_bound(n):.6f}  "
              f"kappa[q={rep.branch}]={rep.kappas[rep.branch]:+.6f}  all={np.round(rep.kappas, 4)}")

# %%
# Tracing uses the closed form, which stays accurate right up to the rim.
# The curves through 0 bend towards the singular boundary point e^{i phi0}.
spec = ExtremalSpec(2, 0)
curves = trace_nodal_set(ExtremalFunction(spec))
for c in curves:
    print(f"branch {c.branch_q}: {len(c.vertices)} vertices, ends at "
          f"{np.round(c.ends[0], 3)} and {np.round(c.ends[1], 3)}, phi0 = {spec.phi0:.4f}")

# %%
# The picture, as a deterministic SVG.
render_svg(curves, "extremal_n2.svg")
print("wrote extremal_n2.svg")
