"""Invariant suite run by ``helixdm validate``.

Each check returns ``(name, passed, detail)``; names carry the chain length.
Dense brute-force checks are limited to short chains.
"""
from __future__ import annotations

import itertools
import math

import numpy as np

from .dynamics import TimeGrid, evolve, jordan_propagate, project_subspace, propagate
from .hilbert import apply, commutator, expectation, inner, site_operator, total_sz
from .magnon import BandParams, band_halfwidth, band_samples, dispersion, single_magnon_block
from .model import ChainParams, build_h, build_h0, build_hdm, build_hi_global
from .states import (
    HelixSpec,
    helix_state,
    magnon_operator,
    phantom_family,
    product_state,
    tilted_family,
    tilted_raising,
)

DENSE_COMMUTATOR_MAX = 6
DENSE_SYMMETRY_MAX = 8


def default_params(n: int, lam: float = 1.0) -> ChainParams:
    """Chain of ``n`` sites with ``q = p`` the commensurate value closest to ``0.6 pi``."""
    return ChainParams.from_numerators(n, max(1, round(0.3 * n)), lam=lam)


def translation_permutation(n: int) -> np.ndarray:
    """Basis permutation for the shift site ``j -> j + 1`` (periodic)."""
    idx = np.arange(1 << n)
    top = (idx >> (n - 1)) & 1
    return ((idx << 1) & ((1 << n) - 1)) | top


def _check(results, name, ok, detail=""):
    results.append((name, bool(ok), detail))


def hilbert_checks(n: int, rng) -> list:
    res = []
    if n <= DENSE_COMMUTATOR_MAX:
        eps = {("sx", "sy"): "sz", ("sy", "sz"): "sx", ("sz", "sx"): "sy"}
        worst = 0.0
        for j, k in itertools.product(range(1, n + 1), repeat=2):
            for a, b in itertools.product(("sx", "sy", "sz"), repeat=2):
                c = commutator(site_operator(a, j, n), site_operator(b, k, n)).toarray()
                if j == k and (a, b) in eps:
                    c = c - 1j * site_operator(eps[(a, b)], j, n).toarray()
                elif j == k and (b, a) in eps:
                    c = c + 1j * site_operator(eps[(b, a)], j, n).toarray()
                worst = max(worst, np.abs(c).max())
        _check(res, f"hilbert.commutators[N={n}]", worst < 1e-14, f"max {worst:.2e}")
    worst = 0.0
    for j in range(1, n + 1):
        sx, sy = site_operator("sx", j, n), site_operator("sy", j, n)
        worst = max(worst, (sx + 1j * sy - site_operator("s_plus", j, n)).max_abs(),
                    (sx - 1j * sy - site_operator("s_minus", j, n)).max_abs())
    _check(res, f"hilbert.ladder_from_xy[N={n}]", worst < 1e-15, f"max {worst:.2e}")
    h = build_h(default_params(n))
    dim = 1 << n
    u = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    a, b = complex(*rng.standard_normal(2)), complex(*rng.standard_normal(2))
    lin = np.abs(apply(h, a * u + b * v) - a * apply(h, u) - b * apply(h, v)).max()
    _check(res, f"hilbert.apply_linear[N={n}]", lin < 1e-13 * max(1, np.abs(u).max()) * n, f"max {lin:.2e}")
    u, v = u / np.linalg.norm(u), v / np.linalg.norm(v)
    worst = max(abs(inner(u, apply(op, v)) - np.conj(inner(v, apply(op, u))))
                for op in (build_h0(default_params(n)), build_hdm(default_params(n))))
    _check(res, f"hilbert.hermitian_builders[N={n}]", worst < 1e-12, f"max {worst:.2e}")
    return res


def model_checks(n: int) -> list:
    res = []
    params = default_params(n)
    h = build_h(params)
    sz = total_sz(n)
    comm = commutator(h, sz).max_abs()
    _check(res, f"model.sz_conservation[N={n}]", comm < 1e-13, f"max {comm:.2e}")
    if n <= DENSE_SYMMETRY_MAX:
        perm = translation_permutation(n)
        t = np.zeros((1 << n, 1 << n))
        t[perm, np.arange(1 << n)] = 1.0
        rot = np.diag(np.exp(1j * params.q * np.diag(sz.toarray()).real))
        g = t @ rot
        hd = h.toarray()
        worst = np.abs(hd @ g - g @ hd).max()
        _check(res, f"model.translation_rotation_symmetry[N={n}]", worst < 1e-13, f"max {worst:.2e}")
    dm = build_hdm(params).csr
    idx = np.array([1 << j for j in range(n)])
    block = dm[idx][:, idx].toarray()
    ev = np.sort(np.linalg.eigvalsh(block))
    anti = np.abs(ev + ev[::-1]).max()
    _check(res, f"model.dm_spectrum_antisymmetric[N={n}]", anti < 1e-12, f"max {anti:.2e}")
    fam = phantom_family(params.q, 1, n)
    worst = max(np.linalg.norm(apply(h, v)) for v in fam.members)
    for th in np.linspace(0, math.pi, 7):
        for d in (1,):
            worst = max(worst, np.linalg.norm(apply(h, helix_state(HelixSpec(th, params.q, d), n))))
    _check(res, f"model.zero_energy_family[N={n}]", worst < 1e-12, f"max {worst:.2e}")
    return res


def states_checks(n: int) -> list:
    res = []
    params = default_params(n)
    if n <= DENSE_SYMMETRY_MAX:
        tau = magnon_operator(params.q, 1, n)
        dd = commutator(commutator(build_hdm(params), tau), tau).max_abs()
        _check(res, f"states.double_commutator[N={n}]", dd < 1e-13, f"max {dd:.2e}")
    fp, fm = phantom_family(params.q, 1, n), phantom_family(params.q, -1, n)
    same0 = np.abs(fp[0] - fm[0]).max()
    ovN = abs(abs(inner(fp[n], fm[n])) - 1)
    _check(res, f"states.shared_endpoints[N={n}]", same0 == 0 and ovN < 1e-12, f"|ovl|-1 {ovN:.2e}")
    spec = HelixSpec(params.theta, params.q)
    diff = (build_hi_global(params.with_(kappa=1.0)) - tilted_raising(spec, n)).max_abs()
    _check(res, f"states.tilted_raising_equals_field[N={n}]", diff < 1e-13, f"max {diff:.2e}")
    c, s = math.cos(params.theta / 2), math.sin(params.theta / 2)
    bar = product_state((c, -1j * np.exp(-1j * params.q * j) * s) for j in range(1, n + 1))
    d = np.abs(helix_state(HelixSpec(params.theta, params.q, -1), n) - bar).max()
    _check(res, f"states.helix_minus_q_product[N={n}]", d == 0, f"max {d:.2e}")
    fam = tilted_family(spec, n)
    op = tilted_raising(spec, n)
    worst = max(np.linalg.norm(apply(op, fam[k]) - math.sqrt((n - k) * (k + 1)) * fam[k + 1]) for k in range(n))
    _check(res, f"states.tilted_raising_relation[N={n}]", worst < 1e-12, f"max {worst:.2e}")
    return res


def dynamics_checks(n: int, rng) -> list:
    res = []
    params = default_params(n)
    h = build_h(params)
    psi0 = helix_state(HelixSpec(params.theta, params.q, -1), n)
    ts = evolve(h, psi0, TimeGrid(5.0, 0.5), keep_states=True)
    nrm = np.abs(np.linalg.norm(propagate(h, psi0, 5.0)) - 1)
    _check(res, f"dynamics.norm_preserved[N={n}]", nrm < 1e-9, f"{nrm:.2e}")
    e0 = expectation(h, psi0).real
    de = max(abs(expectation(h, v).real - e0) for v in ts.states)
    _check(res, f"dynamics.energy_conserved[N={n}]", de < 1e-8, f"max {de:.2e}")
    sz = total_sz(n)
    m0 = expectation(sz, psi0).real
    dm = max(abs(expectation(sz, v).real - m0) for v in ts.states)
    _check(res, f"dynamics.sz_conserved[N={n}]", dm < 1e-9, f"max {dm:.2e}")
    back = propagate(h * -1.0, propagate(h, psi0, 5.0), 5.0)
    tr = np.linalg.norm(back - psi0)
    _check(res, f"dynamics.time_reversal[N={n}]", tr < 1e-8, f"{tr:.2e}")
    spec = HelixSpec(params.theta, params.q)
    fam = tilted_family(spec, n)
    drive = build_hi_global(params.with_(kappa=0.3))
    m = project_subspace(drive, fam)
    a = rng.standard_normal(n + 1) + 1j * rng.standard_normal(n + 1)
    a /= np.linalg.norm(a)
    t = 1.5
    full = propagate(drive, fam.matrix() @ a, t, hermitian=False)
    sub = jordan_propagate(m, a, t)
    dev = np.abs(fam.matrix().conj().T @ full - sub).max()
    _check(res, f"dynamics.invariant_subspace[N={n}]", dev < 1e-8, f"max {dev:.2e}")
    nil = m.nilpotency_residual()
    _check(res, f"dynamics.nilpotent[N={n}]", nil < 1e-12, f"{nil:.2e}")
    return res


def magnon_checks(n: int) -> list:
    res = []
    q = default_params(n).q
    worst = 0.0
    for lam in (0.0, 1.0, 5.0):
        for p in (q, 2 * math.pi / 5):
            _, ev = single_magnon_block(n, q, p, lam)
            worst = max(worst, np.abs(ev - band_samples(n, BandParams(q, p, lam))).max())
    _check(res, f"magnon.single_magnon_equivalence[N={n}]", worst < 1e-12, f"max {worst:.2e}")
    return res


def band_width_check() -> list:
    from scipy.optimize import minimize_scalar

    res = []
    worst = 0.0
    for lam in (0.0, 1.0, 5.0):
        for p in (2 * math.pi / 5, 2 * math.pi * 3 / 10):
            bp = BandParams(2 * math.pi * 3 / 10, p, lam)
            k = np.linspace(0, 2 * math.pi, 2001)
            e = dispersion(k, bp)
            lo = minimize_scalar(lambda x: dispersion(x, bp), bracket=(k[e.argmin()] - 0.01, k[e.argmin()] + 0.01),
                                 options={"xtol": 1e-12}).fun
            hi = -minimize_scalar(lambda x: -dispersion(x, bp), bracket=(k[e.argmax()] - 0.01, k[e.argmax()] + 0.01),
                                  options={"xtol": 1e-12}).fun
            worst = max(worst, abs((hi - lo) - 2 * band_halfwidth(lam, p)))
    _check(res, "magnon.band_width_matches_dos_radicand", worst < 1e-9, f"max {worst:.2e}")
    return res


def run_invariants(sizes=(4, 6, 10), seed: int = 0) -> list:
    """Run every invariant for each chain length in ``sizes``."""
    rng = np.random.default_rng(seed)
    results = []
    for n in sizes:
        results += hilbert_checks(n, rng)
        results += model_checks(n)
        results += states_checks(n)
        results += dynamics_checks(n, rng)
        results += magnon_checks(n)
    results += band_width_check()
    return results
