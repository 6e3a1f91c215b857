"""Spin-1/2 chain Hilbert space: bitmask basis, site operators and sparse algebra.

Basis index convention is little-endian: site ``j`` (1-based) lives on bit
``j - 1`` and a set bit means spin up (``s^z = +1/2``).  Operators use the
spin normalization ``s = sigma / 2`` and ``s^+- = s^x +- i s^y``.
"""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp

MAX_SITES = 20
ZERO_TOL = 1e-15

SITE_KINDS = ("sx", "sy", "sz", "s_plus", "s_minus")


def check_sites(n_sites: int) -> int:
    n_sites = int(n_sites)
    if n_sites < 1:
        raise ValueError(f"n_sites must be >= 1, got {n_sites}")
    if n_sites > MAX_SITES:
        raise ValueError(f"n_sites={n_sites} exceeds the supported cap of {MAX_SITES}")
    return n_sites


def n_sites_of(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if n < 0 or 1 << n != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    return n


def basis_index(bits) -> int:
    """Basis index of a product state given as a sequence of 0/1 (site 1 first)."""
    return sum(int(b) << j for j, b in enumerate(bits))


class SparseOperator:
    """Immutable sparse complex operator on the ``2**n_sites`` product space.

    Entries are stored in canonical CSR form: duplicates summed, column
    indices sorted, and magnitudes below ``ZERO_TOL`` removed.
    """

    __slots__ = ("_m",)

    def __init__(self, matrix):
        m = sp.csr_matrix(matrix, dtype=complex, copy=True)
        n_sites_of(m.shape[0])
        if m.shape[0] != m.shape[1]:
            raise ValueError(f"operator must be square, got shape {m.shape}")
        m.sum_duplicates()
        m.data[np.abs(m.data) < ZERO_TOL] = 0.0
        m.eliminate_zeros()
        m.sort_indices()
        m.data.flags.writeable = False
        self._m = m

    @classmethod
    def from_entries(cls, dim: int, entries) -> "SparseOperator":
        entries = list(entries)
        if not entries:
            return cls.zeros(dim)
        rows, cols, vals = zip(*entries)
        if max(rows) >= dim or max(cols) >= dim or min(rows) < 0 or min(cols) < 0:
            raise ValueError("entry index out of range")
        return cls(sp.coo_matrix((np.asarray(vals, complex), (rows, cols)), shape=(dim, dim)))

    @classmethod
    def zeros(cls, dim: int) -> "SparseOperator":
        return cls(sp.csr_matrix((dim, dim), dtype=complex))

    @classmethod
    def identity(cls, dim: int) -> "SparseOperator":
        return cls(sp.identity(dim, dtype=complex, format="csr"))

    @property
    def dim(self) -> int:
        return self._m.shape[0]

    @property
    def n_sites(self) -> int:
        return n_sites_of(self.dim)

    @property
    def nnz(self) -> int:
        return self._m.nnz

    @property
    def csr(self) -> sp.csr_matrix:
        return self._m

    def entries(self) -> list[tuple[int, int, complex]]:
        """Nonzero entries as ``(row, col, value)`` sorted by ``(row, col)``."""
        m = self._m
        rows = np.repeat(np.arange(self.dim), np.diff(m.indptr))
        return [(int(r), int(c), complex(v)) for r, c, v in zip(rows, m.indices, m.data)]

    def toarray(self) -> np.ndarray:
        return self._m.toarray()

    def dagger(self) -> "SparseOperator":
        return SparseOperator(self._m.conj().T)

    def max_abs(self) -> float:
        return float(np.abs(self._m.data).max()) if self._m.nnz else 0.0

    def antihermitian_max(self) -> float:
        """Largest entry magnitude of ``(A - A^dagger) / 2``."""
        diff = (self._m - self._m.conj().T) * 0.5
        return float(np.abs(diff.data).max()) if diff.nnz else 0.0

    def __matmul__(self, other):
        if isinstance(other, SparseOperator):
            _match(self.dim, other.dim)
            return SparseOperator(self._m @ other._m)
        return apply(self, other)

    def __add__(self, other: "SparseOperator") -> "SparseOperator":
        return add_scaled([(1.0, self), (1.0, other)])

    def __sub__(self, other: "SparseOperator") -> "SparseOperator":
        return add_scaled([(1.0, self), (-1.0, other)])

    def __mul__(self, c) -> "SparseOperator":
        return SparseOperator(self._m * complex(c))

    __rmul__ = __mul__

    def __neg__(self) -> "SparseOperator":
        return self * -1.0

    def __repr__(self) -> str:
        return f"SparseOperator(dim={self.dim}, nnz={self.nnz})"


def _match(a: int, b: int) -> None:
    if a != b:
        raise ValueError(f"dimension mismatch: {a} vs {b}")


def site_operator(kind: str, j: int, n_sites: int) -> SparseOperator:
    """Spin-1/2 operator ``kind`` acting on site ``j`` (1-based) of an ``n_sites`` chain."""
    n_sites = check_sites(n_sites)
    if not 1 <= j <= n_sites:
        raise ValueError(f"site {j} outside [1, {n_sites}]")
    if kind not in SITE_KINDS:
        raise ValueError(f"unknown site operator kind {kind!r}; expected one of {SITE_KINDS}")
    dim = 1 << n_sites
    mask = 1 << (j - 1)
    idx = np.arange(dim)
    up = (idx & mask) != 0
    if kind == "sz":
        m = sp.diags(np.where(up, 0.5, -0.5).astype(complex), format="csr")
        return SparseOperator(m)
    down_idx, up_idx = idx[~up], idx[up]
    ones = np.ones(dim // 2, dtype=complex)
    # s^+ maps the down configuration onto the same configuration with bit j set
    raise_m = sp.csr_matrix((ones, (down_idx | mask, down_idx)), shape=(dim, dim))
    lower_m = sp.csr_matrix((ones, (up_idx ^ mask, up_idx)), shape=(dim, dim))
    if kind == "s_plus":
        return SparseOperator(raise_m)
    if kind == "s_minus":
        return SparseOperator(lower_m)
    if kind == "sx":
        return SparseOperator(0.5 * (raise_m + lower_m))
    return SparseOperator(-0.5j * (raise_m - lower_m))


def total_sz(n_sites: int) -> SparseOperator:
    n_sites = check_sites(n_sites)
    idx = np.arange(1 << n_sites)
    counts = sum((idx >> k) & 1 for k in range(n_sites)).astype(float)
    return SparseOperator(sp.diags((counts - n_sites / 2).astype(complex), format="csr"))


def add_scaled(terms) -> SparseOperator:
    """Linear combination ``sum_k c_k A_k`` of ``(coefficient, operator)`` pairs."""
    terms = list(terms)
    if not terms:
        raise ValueError("add_scaled needs at least one term")
    dim = terms[0][1].dim
    acc = sp.csr_matrix((dim, dim), dtype=complex)
    for c, op in terms:
        _match(dim, op.dim)
        acc = acc + complex(c) * op.csr
    return SparseOperator(acc)


def commutator(a: SparseOperator, b: SparseOperator) -> SparseOperator:
    return a @ b - b @ a


def apply(op: SparseOperator, v) -> np.ndarray:
    """Exact sparse matrix-vector product ``op |v>``; no normalization."""
    v = np.asarray(v)
    _match(op.dim, v.shape[0])
    return op.csr @ v.astype(complex, copy=False)


def inner(u, v) -> complex:
    """``<u|v>`` with the conjugate taken on ``u``."""
    u, v = np.asarray(u), np.asarray(v)
    _match(u.shape[0], v.shape[0])
    return complex(np.vdot(u, v))


def expectation(op: SparseOperator, v) -> complex:
    return inner(v, apply(op, v))


def basis_state(bits: int, n_sites: int) -> np.ndarray:
    n_sites = check_sites(n_sites)
    dim = 1 << n_sites
    if not 0 <= bits < dim:
        raise ValueError(f"bitmask {bits} outside [0, {dim})")
    v = np.zeros(dim, dtype=complex)
    v[bits] = 1.0
    return v


def norm(v) -> float:
    return float(np.linalg.norm(v))


def normalize(v) -> np.ndarray:
    nv = norm(v)
    if not np.isfinite(nv) or nv == 0.0:
        raise ValueError("cannot normalize a zero or non-finite vector")
    return np.asarray(v, dtype=complex) / nv
