"""
Zero-energy helix states of the XXZ chain with DM interaction
==============================================================

Builds the chain, checks that the phantom states and the helix product
state are annihilated by the Hamiltonian, and shows that the opposite
helicity is not.
"""

import math

import numpy as np

from helixdm import ChainParams, HelixSpec, build_h, helix_state, phantom_family
from helixdm.dynamics import helix_vectors
from helixdm.hilbert import apply

N = 10
params = ChainParams.from_numerators(N, 3, lam=1.0)   # q = p = 2 pi 3/10
h = build_h(params)
print(h)

# every member of the resonant family has zero energy
for n, v in enumerate(phantom_family(params.q, 1, N).members):
    print(f"n={n:2d}  |H psi_n| = {np.linalg.norm(apply(h, v)):.1e}")

# the opposite family does not
bad = phantom_family(params.q, -1, N)
print("opposite helicity, n=5:", np.linalg.norm(apply(h, bad[5])))

# helix product state and its on-site spin vectors
phi = helix_state(HelixSpec(math.pi / 3, params.q), N)
print("|H phi| =", np.linalg.norm(apply(h, phi)))
print(np.round(helix_vectors(phi), 4))
