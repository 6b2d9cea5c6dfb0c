"""
Frequency, doubling and the size of the sign regions
====================================================

For random admissible functions we look at the frequency ``beta(r)``, the
radius ``r(N)`` below which the Taylor tail is dominated by the head, and
how the disk of that radius splits into ``{u > 0}`` and ``{u < 0}``.
"""

import numpy as np

from nodal_atlas import random_admissible
from nodal_atlas.spectral import area_ratio, doubling_index, frequency, growth_bound_check, tail_radius

rng = np.random.default_rng(1)

for n in (1, 2, 3):
    s = random_admissible(n, rng, K=200).series
    N = 2 * n
    r = tail_radius(s, N)
    betas = [frequency(s, x) for x in (0.05, 0.25, 0.5, 0.75, 0.95)]
    areas = area_ratio(s.truncate(64), r, 256)
    print(f"n={n}: growth ratio {growth_bound_check(s).worst_ratio:.3f}, r(N={N}) = {r:.4f}, "
          f"beta(r) = {frequency(s, r):.3f}, doubling(r/3) = {doubling_index(s, r / 3):.3f}")
    print("      beta on a few radii:", np.round(betas, 3))
    print(f"      areas +{areas.positive:.4f} / -{areas.negative:.4f}, smaller share {areas.min_fraction:.3f}")

# %%
# beta never drops below the vanishing order, so for n >= 2 the value at
# r(N) sits above 2 no matter how small r gets.
