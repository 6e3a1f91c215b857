import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import SM, SP, SX, SY, SZ, dense_site
from helixdm.hilbert import (
    MAX_SITES,
    SparseOperator,
    add_scaled,
    apply,
    basis_index,
    basis_state,
    commutator,
    expectation,
    inner,
    n_sites_of,
    normalize,
    site_operator,
    total_sz,
)

DENSE = {"sx": SX, "sy": SY, "sz": SZ, "s_plus": SP, "s_minus": SM}


@pytest.mark.parametrize("kind", sorted(DENSE))
@pytest.mark.parametrize("j", [1, 2, 4])
def test_site_operator_matches_kron_oracle(kind, j):
    assert np.array_equal(site_operator(kind, j, 4).toarray(), dense_site(DENSE[kind], j, 4))


def test_raising_on_down_sets_bit():
    v = apply(site_operator("s_plus", 3, 5), basis_state(0, 5))
    assert np.array_equal(v, basis_state(0b00100, 5))
    assert np.all(apply(site_operator("s_plus", 3, 5), basis_state(0b00100, 5)) == 0)


def test_basis_index_little_endian():
    assert basis_index([1, 0, 0]) == 1
    assert basis_index([0, 0, 1]) == 4


def test_site_and_size_errors():
    with pytest.raises(ValueError):
        site_operator("sx", 0, 4)
    with pytest.raises(ValueError):
        site_operator("sx", 5, 4)
    with pytest.raises(ValueError):
        site_operator("sw", 1, 4)
    with pytest.raises(ValueError):
        site_operator("sz", 1, MAX_SITES + 1)
    with pytest.raises(ValueError):
        n_sites_of(12)


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        apply(site_operator("sz", 1, 3), np.ones(4))
    with pytest.raises(ValueError):
        site_operator("sz", 1, 3) + site_operator("sz", 1, 2)


def test_canonical_storage_drops_tiny_and_sums_duplicates():
    op = SparseOperator.from_entries(4, [(0, 1, 1.0), (0, 1, 2.0), (2, 2, 1e-17), (3, 0, 1j)])
    assert op.entries() == [(0, 1, 3.0), (3, 0, 1j)]
    assert op.nnz == 2
    with pytest.raises(ValueError):
        op.csr.data[0] = 5.0


def test_cancelling_sum_leaves_no_fill():
    a = site_operator("sx", 1, 3)
    assert (a - a).nnz == 0
    assert add_scaled([(1, a), (-1, a)]).nnz == 0


def test_total_sz_diagonal():
    d = np.diag(total_sz(3).toarray()).real
    assert d[0] == -1.5 and d[7] == 1.5 and d[1] == -0.5


def test_spin_algebra_single_site():
    n = 3
    for j in range(1, n + 1):
        x, y, z = (site_operator(k, j, n) for k in ("sx", "sy", "sz"))
        assert (commutator(x, y) - z * 1j).max_abs() < 1e-15
        s2 = (x @ x + y @ y + z @ z).toarray()
        assert np.allclose(s2, 0.75 * np.eye(8))


def test_dagger_and_hermiticity():
    sp_op = site_operator("s_plus", 2, 3)
    assert (sp_op.dagger() - site_operator("s_minus", 2, 3)).max_abs() == 0
    assert site_operator("sx", 2, 3).antihermitian_max() == 0
    assert sp_op.antihermitian_max() > 0


def test_normalize_zero_vector():
    with pytest.raises(ValueError):
        normalize(np.zeros(4))


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_apply_matches_dense_product(n, seed):
    rng = np.random.default_rng(seed)
    dim = 1 << n
    m = sp.random(dim, dim, density=0.2, random_state=seed) + 1j * sp.random(dim, dim, density=0.2, random_state=seed + 1)
    op = SparseOperator(m)
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    assert np.allclose(apply(op, v), m.toarray() @ v, atol=1e-13)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 5), st.integers(0, 2**32 - 1))
def test_inner_conjugate_symmetric_and_expectation_real(n, seed):
    rng = np.random.default_rng(seed)
    dim = 1 << n
    u = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    assert abs(inner(u, v) - np.conj(inner(v, u))) < 1e-12
    h = site_operator("sx", 1, n) @ site_operator("sy", n, n) + site_operator("sz", 1, n)
    assert abs(expectation(h, u).imag) < 1e-12 * np.vdot(u, u).real
