"""Spin-1/2 XXZ chain with Dzyaloshinskii-Moriya interaction: phantom helix states,
non-Hermitian driving and the magnon picture."""

__version__ = "0.1.0"

from .hilbert import SparseOperator, add_scaled, apply, inner, site_operator
from .model import ChainParams, build_h, build_h0, build_hdm, build_hdrvn, build_hi_global, build_hi_local
from .states import (
    HelixSpec,
    StateFamily,
    ferro_down,
    ferro_up,
    helix_state,
    phantom_family,
    phantom_state,
    tilted_family,
    tilted_site_operator,
    tilted_up_state,
)
from .dynamics import TimeGrid, TimeSeries, evolve, helix_vector, jordan_propagate, project_subspace
from .magnon import BandParams, dispersion, dos_analytic, dos_histogram, single_magnon_block
