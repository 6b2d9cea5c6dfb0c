"""
Approaching the bound with smooth boundary data
===============================================

The extremal functions come from distributions on the circle. Mollifying a
Dirac comb and adding a small step correction gives smooth boundary values
that change sign exactly ``2n`` times, and the curvature at 0 creeps up
towards the bound as the mollifier narrows.
"""

from nodal_atlas import boundary as bd
from nodal_atlas.extremal import comb_angles, comb_limit_coefficient, convergence_table, sharpness_member

eps0 = 0.25

# %%
# One member of the family.
m = sharpness_member(1, bd.MollifierSpec(eps0 / 8, eps0, 1e-3))
print("sign changes on the circle:", m.sign_changes)

# %%
# Shrinking eps: the gap to 8 decreases towards the comb's own limit, which
# itself tends to 8 only as the comb spacing eps0 goes to 0.
print(f"{'eps':>10} {'lambda':>8} {'kappa':>10} {'gap':>8}")
for eps, lam, kappa, gap in convergence_table(1, eps0, (8, 16, 32), 1e-4):
    print(f"{eps:10.6f} {lam:8.0e} {kappa:10.6f} {gap:8.4f}")

for e in (0.25, 0.1, 0.05):
    print(f"comb spacing {e}: limiting curvature {2 * comb_limit_coefficient(comb_angles(1, e)).real:.6f}")
