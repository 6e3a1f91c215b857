"""Time evolution, observables and the invariant-subspace (Jordan block) picture.

Two propagation engines are available:

``dense``
    Full diagonalization (Hermitian) or a dense matrix exponential
    (non-Hermitian).  Default up to ``DENSE_MAX_SITES`` sites.
``krylov``
    ``scipy.sparse.linalg.expm_multiply`` per sample step, for larger chains.

Non-Hermitian runs rescale the state to unit norm at every sample and keep
the discarded growth in ``TimeSeries.log_norm``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la
import scipy.sparse.linalg as sla

from .hilbert import SparseOperator, n_sites_of, site_operator

DENSE_MAX_SITES = 12
FIDELITY_TOL = 1e-9
HERMITIAN_TOL = 1e-12
NORMALIZED_TOL = 1e-9
NILPOTENT_TOL = 1e-12


class EvolutionError(RuntimeError):
    """Propagation could not be carried out to the requested accuracy."""


@dataclass(frozen=True)
class TimeGrid:
    t_max: float
    dt: float = 0.1

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.t_max < 0:
            raise ValueError("t_max must be non-negative")
        if abs(self.samples * self.dt - self.t_max) > 1e-12 * max(1.0, self.t_max):
            raise ValueError(f"t_max={self.t_max} is not an integer multiple of dt={self.dt}")

    @property
    def samples(self) -> int:
        return int(round(self.t_max / self.dt))

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.samples + 1) * self.dt


@dataclass
class TimeSeries:
    """Observables sampled on a time grid.

    ``helix_vectors`` has shape ``(n_times, n_sites, 3)``; ``states`` is only
    filled when requested.
    """

    times: np.ndarray
    fidelity: np.ndarray
    helix_vectors: np.ndarray
    log_norm: np.ndarray
    states: np.ndarray | None = None

    @property
    def n_sites(self) -> int:
        return self.helix_vectors.shape[1]


@dataclass(frozen=True)
class SubspaceMatrix:
    entries: np.ndarray

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def power(self, k: int) -> np.ndarray:
        return np.linalg.matrix_power(self.entries, k)

    def nilpotency_residual(self) -> float:
        """Largest entry magnitude of ``M^dim``."""
        return float(np.abs(self.power(self.dim)).max())


def _dim_check(op: SparseOperator, v: np.ndarray) -> None:
    if op.dim != v.shape[0]:
        raise ValueError(f"dimension mismatch: operator {op.dim} vs state {v.shape[0]}")


def _pick_engine(method: str, n_sites: int) -> str:
    if method == "auto":
        return "dense" if n_sites <= DENSE_MAX_SITES else "krylov"
    if method not in ("dense", "krylov"):
        raise ValueError(f"unknown method {method!r}")
    return method


def helix_vector(psi, l: int) -> tuple[float, float, float]:
    """``(<s_l^x>, <s_l^y>, <s_l^z>)`` for a normalized state."""
    psi = np.asarray(psi, dtype=complex)
    n = n_sites_of(psi.shape[0])
    nrm = np.linalg.norm(psi)
    if abs(nrm - 1.0) > NORMALIZED_TOL:
        raise ValueError(f"helix_vector needs a normalized state (norm={nrm:.12g})")
    out = []
    for kind in ("sx", "sy", "sz"):
        val = np.vdot(psi, site_operator(kind, l, n).csr @ psi)
        if abs(val.imag) > 1e-12:
            raise ValueError(f"<{kind}> has imaginary part {val.imag:.3e}")
        out.append(float(val.real))
    return tuple(out)


def helix_vectors(psi) -> np.ndarray:
    """Helix vectors of every site, shape ``(N, 3)``, via bit arithmetic."""
    psi = np.asarray(psi, dtype=complex)
    n = n_sites_of(psi.shape[0])
    idx = np.arange(psi.shape[0])
    prob = np.abs(psi) ** 2
    out = np.empty((n, 3))
    for j in range(n):
        mask = 1 << j
        down = idx[(idx & mask) == 0]
        # <s^+> = sum over down configurations of conj(psi[up]) psi[down]
        sp_exp = np.vdot(psi[down | mask], psi[down])
        out[j, 0] = sp_exp.real
        out[j, 1] = sp_exp.imag
        out[j, 2] = prob[(idx & mask) != 0].sum() - 0.5 * prob.sum()
    return out


def fidelity(reference, psi) -> float:
    """``|<reference|psi>|^2`` for normalized arguments, clipped to ``[0, 1]``."""
    f = abs(np.vdot(reference, psi)) ** 2
    if f > 1 + FIDELITY_TOL:
        raise EvolutionError(f"fidelity {f!r} exceeds 1 beyond tolerance")
    return min(f, 1.0)


class _DenseHermitian:
    """Exact propagation in the eigenbasis of a dense Hermitian matrix.

    The accuracy check applies the eigendecomposition to the initial state:
    the residual ``|H psi0 - V w V^dagger psi0|`` bounds the propagation error
    per unit time.
    """

    def __init__(self, H: SparseOperator, psi0, tol: float):
        h = H.toarray()
        h = 0.5 * (h + h.conj().T)
        self.w, self.v = np.linalg.eigh(h)
        self.c0 = self.v.conj().T @ psi0
        resid = np.linalg.norm(h @ psi0 - self.v @ (self.w * self.c0)) / np.linalg.norm(psi0)
        if resid > tol:
            raise EvolutionError(f"eigendecomposition residual {resid:.3e} exceeds tolerance {tol:.1e}")

    def at(self, t):
        return self.v @ (np.exp(-1j * self.w * t) * self.c0)


class _Stepper:
    """Fixed-step propagator ``exp(-i H dt)`` with a half-step consistency check."""

    def __init__(self, H: SparseOperator, dt: float, engine: str, tol: float):
        self.engine = engine
        self.dt = dt
        if engine == "dense":
            h = H.toarray()
            self.u = la.expm(-1j * dt * h)
            half = la.expm(-0.5j * dt * h)
            err = np.abs(self.u - half @ half).max()
        else:
            self.a = (-1j * dt) * H.csr.tocsc()
            probe = np.random.default_rng(0).standard_normal(H.dim) + 0j
            probe /= np.linalg.norm(probe)
            one = sla.expm_multiply(self.a, probe)
            two = sla.expm_multiply(0.5 * self.a, sla.expm_multiply(0.5 * self.a, probe))
            err = np.linalg.norm(one - two) / max(1.0, np.linalg.norm(one))
        if err > tol * dt:
            raise EvolutionError(f"step dt={dt} fails the accuracy check ({err:.3e} > {tol * dt:.3e})")

    def step(self, v):
        if self.engine == "dense":
            return self.u @ v
        return sla.expm_multiply(self.a, v)


def evolve(
    H: SparseOperator,
    psi0,
    grid: TimeGrid,
    hermitian: bool = True,
    reference=None,
    method: str = "auto",
    keep_states: bool = False,
    tol: float = 1e-10,
) -> TimeSeries:
    """Propagate ``psi0`` under ``exp(-iHt)`` and sample observables on ``grid``.

    ``reference`` defaults to the normalized initial state; the fidelity is
    ``|<reference|Psi(t)>|^2`` with ``Psi(t)`` normalized.
    """
    psi0 = np.asarray(psi0, dtype=complex)
    _dim_check(H, psi0)
    n = n_sites_of(H.dim)
    if hermitian and H.antihermitian_max() > HERMITIAN_TOL:
        raise ValueError(f"hermitian=True but the anti-Hermitian part is {H.antihermitian_max():.3e}")
    engine = _pick_engine(method, n)
    ref = psi0 if reference is None else np.asarray(reference, dtype=complex)
    _dim_check(H, ref)
    ref = ref / np.linalg.norm(ref)

    times = grid.times
    nt = len(times)
    fid = np.empty(nt)
    hv = np.empty((nt, n, 3))
    log_norm = np.empty(nt)
    states = np.empty((nt, H.dim), dtype=complex) if keep_states else None

    def record(i, v, acc):
        nv = np.linalg.norm(v)
        u = v / nv
        fid[i] = fidelity(ref, u)
        hv[i] = helix_vectors(u)
        log_norm[i] = acc + math.log(nv)
        if keep_states:
            states[i] = u
        return u, nv

    if hermitian and engine == "dense":
        prop = _DenseHermitian(H, psi0, tol)
        for i, t in enumerate(times):
            record(i, prop.at(t), 0.0)
    else:
        stepper = _Stepper(H, grid.dt, engine, tol)
        v, acc = psi0, 0.0
        for i in range(nt):
            if i:
                v = stepper.step(v)
            u, nv = record(i, v, acc)
            if not hermitian:
                # renormalize only at sample points; growth goes into log_norm
                acc += math.log(nv)
                v = u
    return TimeSeries(times, fid, hv, log_norm, states)


def propagate(H: SparseOperator, psi0, t: float, hermitian: bool = True, method: str = "auto"):
    """Unnormalized ``exp(-iHt) psi0`` at a single time."""
    psi0 = np.asarray(psi0, dtype=complex)
    _dim_check(H, psi0)
    engine = _pick_engine(method, n_sites_of(H.dim))
    if hermitian and engine == "dense":
        return _DenseHermitian(H, psi0, 1e-10).at(t)
    if engine == "dense":
        return la.expm(-1j * t * H.toarray()) @ psi0
    return sla.expm_multiply((-1j * t) * H.csr.tocsc(), psi0)


def crossing_time(times, values, threshold: float) -> float | None:
    """First sampled time at which ``values`` drops below ``threshold``."""
    below = np.nonzero(np.asarray(values) < threshold)[0]
    return float(times[below[0]]) if below.size else None


def project_subspace(op: SparseOperator, family, chop: float = 1e-12) -> SubspaceMatrix:
    """Matrix ``<f_a| op |f_b>`` of ``op`` in an orthonormal family.

    Entries smaller than ``chop`` (relative to the largest entry, floor 1) are
    roundoff from the sparse products and are set to zero.
    """
    basis = family.matrix() if hasattr(family, "matrix") else np.asarray(family).T
    if basis.shape[0] != op.dim:
        raise ValueError(f"dimension mismatch: operator {op.dim} vs family {basis.shape[0]}")
    norms = np.linalg.norm(basis, axis=0)
    if np.abs(norms - 1).max() > NORMALIZED_TOL:
        raise ValueError("family members must be normalized")
    m = basis.conj().T @ (op.csr @ basis)
    scale = max(1.0, float(np.abs(m).max()))
    m[np.abs(m) < chop * scale] = 0.0
    return SubspaceMatrix(m)


def jordan_matrix(n_sites: int, kappa: float, entry=None) -> SubspaceMatrix:
    """Lower-bidiagonal matrix with ``M[n+1, n] = kappa * entry(N, n)`` (0-based ``n``).

    ``entry`` defaults to ``sqrt((N - n) (n + 1))``, the raising amplitude in an
    orthonormal tilted family.
    """
    if entry is None:
        entry = lambda N, n: math.sqrt((N - n) * (n + 1))
    m = np.zeros((n_sites + 1, n_sites + 1), dtype=complex)
    for n in range(n_sites):
        m[n + 1, n] = kappa * entry(n_sites, n)
    return SubspaceMatrix(m)


def jordan_propagate(M, coeffs, t: float) -> np.ndarray:
    """Evolve subspace coefficients with the terminating series ``sum_l (-iMt)^l / l!``."""
    m = M.entries if isinstance(M, SubspaceMatrix) else np.asarray(M, dtype=complex)
    d = m.shape[0]
    a = np.asarray(coeffs, dtype=complex)
    if a.shape != (d,):
        raise ValueError(f"coefficient vector must have length {d}")
    resid = float(np.abs(np.linalg.matrix_power(m, d)).max())
    if resid > NILPOTENT_TOL:
        raise ValueError(f"matrix is not nilpotent (max |M^{d}| = {resid:.3e})")
    term = a.copy()
    out = a.copy()
    for l in range(1, d):
        term = (-1j * t / l) * (m @ term)
        out = out + term
    return out
