import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helixdm.magnon import (
    BandParams,
    band_halfwidth,
    band_samples,
    dispersion,
    dos_analytic,
    dos_analytic_curve,
    dos_cumulative,
    dos_histogram,
    single_magnon_block,
)

Q = 2 * math.pi * 3 / 10
P = 2 * math.pi / 5


def test_dispersion_values():
    assert dispersion(Q, BandParams(Q, Q, 1.0)) == pytest.approx(0, abs=1e-15)
    assert dispersion(-Q, BandParams(Q, Q, 1.3)) == pytest.approx(1.3 * math.sin(2 * Q), abs=1e-15)
    assert dispersion(0.0, BandParams(Q, Q, 1.0)) == pytest.approx(2.260074, abs=1e-6)
    assert dispersion(np.zeros(3), BandParams(Q, Q, 1.0)).shape == (3,)


def test_dos_closed_form_values():
    assert dos_analytic(0.0, BandParams(Q, P, 1.0)) == pytest.approx(0.0805694, abs=1e-7)
    assert dos_analytic(0.0, BandParams(Q, 1.234, 0.0)) == pytest.approx(1 / (2 * math.pi), abs=1e-15)


def test_dos_edge_guard():
    a = band_halfwidth(1.0, P)
    with pytest.raises(ValueError):
        dos_analytic(a, BandParams(Q, P, 1.0))
    with pytest.raises(ValueError):
        dos_analytic(a + 1, BandParams(Q, P, 1.0))
    curve = dos_analytic_curve(BandParams(Q, P, 1.0))
    assert curve.kind == "analytic" and np.all(curve.dos > 0)


def test_dos_zero_decreasing_in_lambda():
    d = [dos_analytic(0.0, BandParams(Q, P, lam)) for lam in np.linspace(1, 10, 50)]
    assert np.all(np.diff(d) < 0)


def test_histogram_integral_and_errors():
    h = dos_histogram(BandParams(Q, P, 1.0))
    assert abs((h.dos * np.diff(h.bin_edges)).sum() - 1) < 1e-3
    assert h.kind == "histogram" and np.all(h.dos >= 0)
    with pytest.raises(ValueError):
        dos_histogram(BandParams(Q, P, 1.0), n_k=999)
    with pytest.raises(ValueError):
        dos_histogram(BandParams(Q, P, 1.0), span=(1.0, 1.0))


@pytest.mark.parametrize("lam", [1.0, 5.0])
def test_histogram_matches_normalized_density(lam):
    # bin averages of the normalized density (twice the closed form) from its cumulative
    bp = BandParams(Q, P, lam)
    h = dos_histogram(bp, n_k=100_000)
    expected = np.diff(dos_cumulative(h.bin_edges, bp)) / np.diff(h.bin_edges)
    mask = np.ones_like(h.dos, bool)
    mask[[0, -1]] = False
    assert np.abs(h.dos[mask] / expected[mask] - 1).max() < 0.01


def test_histogram_is_twice_closed_form_at_center():
    bp = BandParams(Q, P, 1.0)
    h = dos_histogram(bp, n_k=1_000_000, n_bins=101)
    assert h.dos[50] / dos_analytic(h.energies[50], bp) == pytest.approx(2.0, rel=5e-3)


def test_histogram_two_peak_profile_large_lambda():
    h = dos_histogram(BandParams(Q, P, 5.0), n_k=100_000, n_bins=50)
    mid = h.dos[20:30]
    assert h.dos[0] > 3 * mid.max() and h.dos[-1] > 3 * mid.max()
    assert np.ptp(mid) / mid.mean() < 0.1


def test_histogram_convergence_with_bin_refinement():
    bp = BandParams(Q, P, 1.0)
    errs = []
    for nb in (20, 40, 80):
        h = dos_histogram(bp, n_k=10_000_000, n_bins=nb)
        # fixed window away from the edges so every resolution sees the same energies
        keep = np.abs(h.energies) <= 0.8 * band_halfwidth(bp.lam, bp.p)
        ref = 2 * dos_analytic(h.energies[keep], bp)
        errs.append(np.abs(h.dos[keep] - ref).max())
    ratios = np.array(errs[:-1]) / np.array(errs[1:])
    assert np.all((ratios >= 1) & (ratios <= 4))


@pytest.mark.parametrize("n", [4, 6, 10])
@pytest.mark.parametrize("lam", [0.0, 1.0, 5.0])
@pytest.mark.parametrize("p", [Q, P])
def test_single_magnon_equivalence(n, lam, p):
    _, ev = single_magnon_block(n, Q, p, lam)
    assert np.abs(ev - band_samples(n, BandParams(Q, p, lam))).max() < 1e-12


def test_single_magnon_zero_mode():
    _, ev = single_magnon_block(10, Q, Q, 1.0)
    assert np.min(np.abs(ev)) < 1e-12


def test_single_magnon_block_hermitian():
    block, _ = single_magnon_block(6, Q, P, 2.0)
    assert np.abs(block - block.conj().T).max() < 1e-15


@settings(max_examples=40, deadline=None)
@given(st.floats(0, 8), st.floats(-math.pi, math.pi), st.floats(-math.pi, math.pi))
def test_band_width_matches_radicand(lam, p, q):
    k = np.linspace(0, 2 * math.pi, 200_001)
    e = dispersion(k, BandParams(q, p, lam))
    assert abs(np.ptp(e) - 2 * band_halfwidth(lam, p)) < 1e-6 * max(1.0, lam)
