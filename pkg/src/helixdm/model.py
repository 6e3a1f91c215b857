"""Hamiltonians of the periodic XXZ chain with Dzyaloshinskii-Moriya interaction.

All builders return :class:`~helixdm.hilbert.SparseOperator` and use
periodic boundaries (site ``N + 1`` is site ``1``).

DMI normalization: the ladder form is built as
``i (lambda / 2) sum_j (e^{-ip} s_j^+ s_{j+1}^- - e^{ip} s_j^- s_{j+1}^+)``.
With this prefactor a single magnon with wave vector ``k`` has energy
``cos k - cos q - lambda sin(k - p)``, the same ``lambda`` that enters the
boson dispersion in :mod:`helixdm.magnon`.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .hilbert import SparseOperator, add_scaled, check_sites, site_operator
from .states import HelixSpec, tilted_site_operator

COMMENSURATE_TOL = 1e-9


def commensurate_index(angle: float, n_sites: int) -> int | None:
    """Return ``n`` if ``angle == 2 pi n / n_sites`` (within tolerance), else ``None``."""
    x = angle * n_sites / (2 * math.pi)
    n = round(x)
    return n if abs(x - n) < COMMENSURATE_TOL else None


@dataclass(frozen=True)
class ChainParams:
    """Model parameters.

    ``q`` is the helix wave vector, ``p`` the DMI phase.  ``p`` must satisfy
    the single-value condition ``p = 2 pi n / N`` unless
    ``enforce_single_value`` is off (the one-magnon sector does not need it);
    an incommensurate ``q`` is accepted with a warning because translational
    symmetry is then lost.  ``drive_site`` defaults to site 5 (or the last
    site of shorter chains).
    """

    n_sites: int = 10
    q: float = 2 * math.pi * 3 / 10
    p: float | None = None
    lam: float = 1.0
    theta: float = math.pi / 3
    kappa: float = 0.0
    delta: float = 0.0
    drive_site: int | None = None
    enforce_single_value: bool = True

    def __post_init__(self):
        n = check_sites(self.n_sites)
        if n < 2:
            raise ValueError("a chain needs at least 2 sites")
        if self.p is None:
            object.__setattr__(self, "p", self.q)
        if self.enforce_single_value and commensurate_index(self.p, n) is None:
            raise ValueError(f"p={self.p!r} violates the single-value condition p = 2 pi n / {n}")
        if commensurate_index(self.q, n) is None:
            warnings.warn(
                f"q={self.q!r} is not of the form 2 pi n / {n}; the chain is not translation invariant",
                stacklevel=3,
            )
        if self.kappa < 0 or self.delta < 0:
            raise ValueError("kappa and delta must be non-negative")
        if self.drive_site is None:
            object.__setattr__(self, "drive_site", min(5, n))
        if not 1 <= self.drive_site <= n:
            raise ValueError(f"drive_site {self.drive_site} outside [1, {n}]")

    @classmethod
    def from_numerators(cls, n_sites: int, q_n: int, p_n: int | None = None, **kw) -> "ChainParams":
        """Build with ``q = 2 pi q_n / N`` and ``p = 2 pi p_n / N``."""
        q = 2 * math.pi * q_n / n_sites
        p = q if p_n is None else 2 * math.pi * p_n / n_sites
        return cls(n_sites=n_sites, q=q, p=p, **kw)

    def with_(self, **kw) -> "ChainParams":
        return replace(self, **kw)


def _next(j: int, n: int) -> int:
    return j % n + 1


def build_h0(params: ChainParams) -> SparseOperator:
    """XXZ part with anisotropy ``cos q``, including the ``-cos q / 4`` bond shift."""
    n = params.n_sites
    cq = math.cos(params.q)
    sp_ = [site_operator("s_plus", j, n) for j in range(1, n + 1)]
    sm_ = [site_operator("s_minus", j, n) for j in range(1, n + 1)]
    sz_ = [site_operator("sz", j, n) for j in range(1, n + 1)]
    eye = SparseOperator.identity(1 << n)
    terms = []
    for j in range(n):
        k = _next(j + 1, n) - 1
        # s^x s^x + s^y s^y = (s^+ s^- + s^- s^+) / 2
        terms += [(0.5, sp_[j] @ sm_[k]), (0.5, sm_[j] @ sp_[k])]
        terms += [(cq, sz_[j] @ sz_[k]), (-0.25 * cq, eye)]
    return add_scaled(terms)


def build_hdm(params: ChainParams, p: float | None = None) -> SparseOperator:
    """DMI term in ladder form; ``p`` overrides ``params.p`` (still checked for commensurability)."""
    n = params.n_sites
    p = params.p if p is None else p
    if params.enforce_single_value and commensurate_index(p, n) is None:
        raise ValueError(f"p={p!r} violates the single-value condition p = 2 pi n / {n}")
    if params.lam == 0:
        return SparseOperator.zeros(1 << n)
    half = 0.5j * params.lam
    fwd, bwd = half * np.exp(-1j * p), -half * np.exp(1j * p)
    terms = []
    for j in range(1, n + 1):
        k = _next(j, n)
        terms.append((fwd, site_operator("s_plus", j, n) @ site_operator("s_minus", k, n)))
        terms.append((bwd, site_operator("s_minus", j, n) @ site_operator("s_plus", k, n)))
    return add_scaled(terms)


def build_h(params: ChainParams) -> SparseOperator:
    """``H0 + H_DM(p)``."""
    return build_h0(params) + build_hdm(params)


def drive_field(params: ChainParams, j: int) -> tuple[complex, complex, complex]:
    """Complex field ``(B^x, B^y, B^z) / kappa`` at site ``j`` of the global drive.

    ``B^y`` carries an overall factor ``i`` on both terms,
    ``i (cos^2(theta/2) - e^{-2iqj} sin^2(theta/2))``; that is the only choice for
    which ``B . s`` equals the tilted raising operator at the site.
    """
    c2 = math.cos(params.theta / 2) ** 2
    s2 = math.sin(params.theta / 2) ** 2
    ph2 = np.exp(-2j * params.q * j)
    bx = c2 + ph2 * s2
    by = 1j * (c2 - ph2 * s2)
    bz = 1j * np.exp(-1j * params.q * j) * math.sin(params.theta)
    return complex(bx), complex(by), complex(bz)


def build_hi_global(params: ChainParams) -> SparseOperator:
    """Spatially modulated complex field ``sum_j B_j . s_j`` with strength ``kappa``."""
    n = params.n_sites
    terms = []
    for j in range(1, n + 1):
        bx, by, bz = drive_field(params, j)
        terms += [
            (params.kappa * bx, site_operator("sx", j, n)),
            (params.kappa * by, site_operator("sy", j, n)),
            (params.kappa * bz, site_operator("sz", j, n)),
        ]
    return add_scaled(terms)


def build_hi_local(params: ChainParams) -> SparseOperator:
    """Single-site drive ``kappa s~_l^+(q) + i delta s~_l^z(q)`` at ``params.drive_site``."""
    spec = HelixSpec(params.theta, params.q)
    n, l = params.n_sites, params.drive_site
    terms = [(params.kappa, tilted_site_operator("raise", l, spec, n))]
    if params.delta:
        terms.append((1j * params.delta, tilted_site_operator("z", l, spec, n)))
    return add_scaled(terms)


def build_hdrvn(params: ChainParams) -> SparseOperator:
    """Driven Hamiltonian ``H0 + H_DM(p) + H_I`` with the local drive."""
    return build_h(params) + build_hi_local(params)
