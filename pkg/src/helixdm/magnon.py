"""Magnon (Holstein-Primakoff boson) picture of the chain.

In the one-excitation sector the boson mapping is exact, so the spectrum of
the spin Hamiltonian restricted to a single flipped spin must coincide with
the band ``cos k - cos q - lambda sin(k - p)`` sampled at ``k = 2 pi m / N``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .hilbert import check_sites
from .model import ChainParams, build_h

EDGE_GUARD = 1e-6


@dataclass(frozen=True)
class BandParams:
    q: float
    p: float
    lam: float


@dataclass
class DosCurve:
    energies: np.ndarray
    dos: np.ndarray
    kind: str
    bin_edges: np.ndarray | None = None


def dispersion(k, params: BandParams):
    """Magnon energy ``cos k - cos q - lambda sin(k - p)``; vectorized over ``k``."""
    k = np.asarray(k, dtype=float)
    e = np.cos(k) - math.cos(params.q) - params.lam * np.sin(k - params.p)
    return e if e.ndim else float(e)


def dos_radicand(E, lam: float, p: float):
    return lam**2 + 1 + 2 * lam * math.sin(p) - np.asarray(E, dtype=float) ** 2


def band_halfwidth(lam: float, p: float) -> float:
    """Amplitude of ``cos k - lambda sin(k - p)`` written as a single sinusoid."""
    return math.sqrt(lam**2 + 1 + 2 * lam * math.sin(p))


def dos_analytic(E, params: BandParams, edge_guard: float = EDGE_GUARD):
    """Closed-form single-particle DOS ``1 / (2 pi sqrt(lambda^2 + 1 + 2 lambda sin p - E^2))``.

    ``E`` is measured from the band center ``-cos q``.  Energies whose
    radicand is at or below ``edge_guard`` (outside the band or at its
    edges) raise ``ValueError``.
    """
    r = dos_radicand(E, params.lam, params.p)
    if np.any(r <= edge_guard):
        raise ValueError("energy outside the band or within the edge guard")
    d = 1.0 / (2 * math.pi * np.sqrt(r))
    return d if np.ndim(d) else float(d)


def dos_cumulative(E, params: BandParams):
    """Fraction of states below ``E`` (band-center reference) from the closed-form DOS."""
    a = band_halfwidth(params.lam, params.p)
    x = np.clip(np.asarray(E, dtype=float) / a, -1.0, 1.0)
    return 0.5 + np.arcsin(x) / math.pi


def dos_histogram(params: BandParams, n_k: int = 100_000, n_bins: int = 100, span=None) -> DosCurve:
    """Histogram DOS of the band sampled at ``k = 2 pi m / n_k``.

    Energies are shifted by ``+cos q`` so the band is centered at zero, the
    reference used by :func:`dos_analytic`.  The result is states per unit
    energy per site (bin count / (n_k * bin width)) at bin midpoints.
    """
    if n_k < 1000:
        raise ValueError("n_k must be at least 1000")
    if n_bins < 1:
        raise ValueError("n_bins must be positive")
    k = 2 * math.pi * np.arange(n_k) / n_k
    e = dispersion(k, params) + math.cos(params.q)
    if span is None:
        a = band_halfwidth(params.lam, params.p)
        span = (-a, a)
    lo, hi = span
    if not hi > lo:
        raise ValueError("degenerate bin width")
    edges = np.linspace(lo, hi, n_bins + 1)
    counts, _ = np.histogram(np.clip(e, lo, hi), bins=edges)
    width = edges[1] - edges[0]
    mids = 0.5 * (edges[1:] + edges[:-1])
    return DosCurve(mids, counts / (n_k * width), "histogram", edges)


def dos_analytic_curve(params: BandParams, n_points: int = 400, edge_guard: float = EDGE_GUARD) -> DosCurve:
    """Closed-form DOS on a uniform grid, excluding points inside the edge guard."""
    a = band_halfwidth(params.lam, params.p)
    e = np.linspace(-a, a, n_points)
    e = e[dos_radicand(e, params.lam, params.p) > edge_guard]
    return DosCurve(e, dos_analytic(e, params, edge_guard), "analytic")


def single_magnon_basis(n_sites: int) -> np.ndarray:
    """Basis indices of the one-up-spin states, site 1 first."""
    return np.array([1 << j for j in range(check_sites(n_sites))])


def single_magnon_block(n_sites: int, q: float, p: float, lam: float):
    """One-flip block of ``H0 + H_DM(p)`` and its sorted eigenvalues.

    Any ``p`` is accepted: a uniform bond phase keeps the one-flip sector
    translation invariant.
    """
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        params = ChainParams(n_sites=n_sites, q=q, p=p, lam=lam, enforce_single_value=False)
    h = build_h(params).csr
    idx = single_magnon_basis(n_sites)
    block = h[idx][:, idx].toarray()
    vals = np.linalg.eigvalsh(0.5 * (block + block.conj().T))
    return block, np.sort(vals)


def band_samples(n_sites: int, params: BandParams) -> np.ndarray:
    """Sorted dispersion at the ``N`` allowed momenta ``2 pi m / N``."""
    k = 2 * math.pi * np.arange(n_sites) / n_sites
    return np.sort(dispersion(k, params))
