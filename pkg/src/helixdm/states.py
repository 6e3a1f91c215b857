"""Closed-form states of the chain and the tilted spin operators.

Three state families of ``N + 1`` members each are provided:

* phantom states ``(tau_{+-q}^+)^n |down...down>`` (normalized),
* tilted states obtained by repeatedly applying the collective tilted raising
  operator to the helix state ``|phi(theta)>``.

Product states (helix states, the tilted "all up" state) are built directly
from their single-site factors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .hilbert import (
    SparseOperator,
    add_scaled,
    apply,
    check_sites,
    commutator,
    norm,
    site_operator,
)

ORTHO_TOL = 1e-10
NORM_TOL = 1e-12


@dataclass(frozen=True)
class HelixSpec:
    """Helix tilt ``theta`` in ``[0, pi]``, wave vector ``q`` and winding ``direction`` (+1 or -1)."""

    theta: float
    q: float
    direction: int = 1

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi + 1e-12:
            raise ValueError(f"theta={self.theta} outside [0, pi]")
        if self.direction not in (1, -1):
            raise ValueError("direction must be +1 or -1")

    @property
    def signed_q(self) -> float:
        return self.direction * self.q


@dataclass
class StateFamily:
    members: list
    label: str
    gram: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        m = np.array(self.members)
        self.gram = m.conj() @ m.T
        dev = np.abs(self.gram - np.eye(len(self.members))).max()
        if dev > ORTHO_TOL:
            raise ValueError(f"{self.label} family is not orthonormal (max deviation {dev:.3e})")

    def __len__(self):
        return len(self.members)

    def __getitem__(self, n):
        return self.members[n]

    def matrix(self) -> np.ndarray:
        """Members as the columns of a ``2**N x (N+1)`` array."""
        return np.array(self.members).T


def product_state(factors) -> np.ndarray:
    """Product state from per-site ``(down, up)`` amplitudes, site 1 first."""
    v = np.ones(1, dtype=complex)
    for down, up in factors:
        # later sites occupy higher bits
        v = np.kron(np.array([down, up], dtype=complex), v)
    return v


def ferro_down(n_sites: int) -> np.ndarray:
    n = check_sites(n_sites)
    v = np.zeros(1 << n, dtype=complex)
    v[0] = 1.0
    return v


def ferro_up(n_sites: int) -> np.ndarray:
    n = check_sites(n_sites)
    v = np.zeros(1 << n, dtype=complex)
    v[-1] = 1.0
    return v


def magnon_operator(q: float, sign: int, n_sites: int) -> SparseOperator:
    """Collective raising operator ``sum_j e^{i sign q j} s_j^+``."""
    return add_scaled(
        (np.exp(1j * sign * q * j), site_operator("s_plus", j, n_sites))
        for j in range(1, n_sites + 1)
    )


def magnon_raise(v, q: float, sign: int = 1) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    n = int(v.shape[0]).bit_length() - 1
    return apply(magnon_operator(q, sign, n), v)


def phantom_family(q: float, sign: int, n_sites: int) -> StateFamily:
    """All phantom states ``|psi_0> ... |psi_N>`` (``sign=-1`` gives the opposite helicity)."""
    tau = magnon_operator(q, sign, n_sites)
    v = ferro_down(n_sites)
    members = [v]
    for _ in range(n_sites):
        v = apply(tau, v)
        v = v / norm(v)
        members.append(v)
    return StateFamily(members, "phantom_q" if sign > 0 else "phantom_minus_q")


def phantom_state(n: int, q: float, sign: int, n_sites: int) -> np.ndarray:
    if not 0 <= n <= n_sites:
        raise ValueError(f"phantom index n={n} outside [0, {n_sites}]")
    tau = magnon_operator(q, sign, n_sites)
    v = ferro_down(n_sites)
    for _ in range(n):
        v = apply(tau, v)
        v = v / norm(v)
    return v


def phantom_coefficients(theta: float, n_sites: int) -> np.ndarray:
    """Expansion ``d_n`` of the helix state in the phantom basis."""
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array(
        [math.sqrt(math.comb(n_sites, n)) * (-1j) ** n * s**n * c ** (n_sites - n) for n in range(n_sites + 1)]
    )


def helix_state(spec: HelixSpec, n_sites: int) -> np.ndarray:
    """``prod_j [cos(theta/2)|dn> - i e^{+-iqj} sin(theta/2)|up>]``."""
    c, s = math.cos(spec.theta / 2), math.sin(spec.theta / 2)
    qq = spec.signed_q
    return product_state((c, -1j * np.exp(1j * qq * j) * s) for j in range(1, check_sites(n_sites) + 1))


def tilted_up_state(spec: HelixSpec, n_sites: int) -> np.ndarray:
    """Tilted ferromagnet ``prod_j [cos(theta/2)|up> - i e^{-+iqj} sin(theta/2)|dn>]``."""
    c, s = math.cos(spec.theta / 2), math.sin(spec.theta / 2)
    qq = spec.signed_q
    return product_state((-1j * np.exp(-1j * qq * j) * s, c) for j in range(1, check_sites(n_sites) + 1))


def tilted_site_operator(kind: str, j: int, spec: HelixSpec, n_sites: int) -> SparseOperator:
    """Rotated single-site spin operator ``s~_j^{+,-,z}``.

    ``kind`` is ``"raise"``, ``"lower"`` or ``"z"``; the z component is half the
    commutator of raise and lower.
    """
    if kind not in ("raise", "lower", "z"):
        raise ValueError(f"unknown tilted operator kind {kind!r}")
    c2 = math.cos(spec.theta / 2) ** 2
    s2 = math.sin(spec.theta / 2) ** 2
    ph = np.exp(-1j * spec.signed_q * j)
    up = add_scaled([
        (c2, site_operator("s_plus", j, n_sites)),
        (ph**2 * s2, site_operator("s_minus", j, n_sites)),
        (1j * ph * math.sin(spec.theta), site_operator("sz", j, n_sites)),
    ])
    if kind == "raise":
        return up
    if kind == "lower":
        return up.dagger()
    return 0.5 * commutator(up, up.dagger())


def tilted_raising(spec: HelixSpec, n_sites: int) -> SparseOperator:
    """Collective tilted raising operator ``sum_j s~_j^+(q)``."""
    return add_scaled((1.0, tilted_site_operator("raise", j, spec, n_sites)) for j in range(1, n_sites + 1))


def tilted_family(spec: HelixSpec, n_sites: int) -> StateFamily:
    op = tilted_raising(spec, n_sites)
    v = helix_state(spec, n_sites)
    members = [v]
    for _ in range(n_sites):
        v = apply(op, v)
        v = v / norm(v)
        members.append(v)
    return StateFamily(members, "tilted")
