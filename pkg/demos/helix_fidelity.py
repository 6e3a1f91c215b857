"""
Stability of the two helicities
===============================

The resonant helix is stationary; the opposite one decays, faster for
stronger DM coupling.
"""

import math

from helixdm import ChainParams, HelixSpec, TimeGrid, build_h, evolve, helix_state
from helixdm.dynamics import crossing_time

N, theta = 10, math.pi / 3
grid = TimeGrid(20.0, 0.1)

for lam in (0.0, 0.5, 1.0, 2.0, 5.0):
    params = ChainParams.from_numerators(N, 3, lam=lam, theta=theta)
    h = build_h(params)
    good = evolve(h, helix_state(HelixSpec(theta, params.q), N), grid)
    bad = evolve(h, helix_state(HelixSpec(theta, params.q, -1), N), grid)
    onset = crossing_time(grid.times, bad.fidelity, 0.9)
    print(f"lambda={lam:3.1f}  min F(phi)={good.fidelity.min():.12f}  "
          f"min F(phibar)={bad.fidelity.min():.4f}  onset={onset}")
