"""
Exceptional point of the complex field drive
============================================

The global drive acts on the tilted family as a single nilpotent Jordan
block, so the dynamics is a terminating power series and every initial
state is funneled into the top member of the family.
"""

import math

import numpy as np

from helixdm import ChainParams, HelixSpec, build_hi_global, build_hi_local, tilted_family
from helixdm.dynamics import jordan_propagate, project_subspace

N, kappa = 10, 0.3
params = ChainParams.from_numerators(N, 3, kappa=kappa, theta=math.pi / 3)
fam = tilted_family(HelixSpec(params.theta, params.q), N)

m = project_subspace(build_hi_global(params), fam)
print("subdiagonal / kappa:", np.round(np.abs(np.diag(m.entries, -1)) / kappa, 4))
print("max |M^(N+1)| =", m.nilpotency_residual())

local = project_subspace(build_hi_local(params), fam)
print("local drive = M/N:", np.abs(local.entries - m.entries / N).max())

# algebraic approach to the coalescing state: 1 - F ~ N / (kappa t)^2
a0 = np.zeros(N + 1)
a0[0] = 1
for kt in (10, 100, 1000, 10000):
    c = jordan_propagate(m, a0, kt / kappa)
    print(f"kappa t = {kt:5d}  1 - F = {1 - abs(c[-1])**2 / np.vdot(c, c).real:.2e}")
