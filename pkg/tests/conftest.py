import math
from functools import reduce

import numpy as np
import pytest

# Independent dense construction from 2x2 matrices, basis (down, up) per site.
# Site j sits on bit j-1, so in a Kronecker product site N is the leftmost factor.
SX = 0.5 * np.array([[0, 1], [1, 0]], dtype=complex)
SY = 0.5 * np.array([[0, 1j], [-1j, 0]], dtype=complex)
SZ = 0.5 * np.array([[-1, 0], [0, 1]], dtype=complex)
SP = np.array([[0, 0], [1, 0]], dtype=complex)
SM = SP.T.copy()
I2 = np.eye(2, dtype=complex)


def dense_site(op, j, n):
    factors = [op if site == j else I2 for site in range(n, 0, -1)]
    return reduce(np.kron, factors)


def dense_h0(n, q):
    h = 0
    for j in range(1, n + 1):
        k = j % n + 1
        h = h + dense_site(SX, j, n) @ dense_site(SX, k, n) + dense_site(SY, j, n) @ dense_site(SY, k, n)
        h = h + math.cos(q) * (dense_site(SZ, j, n) @ dense_site(SZ, k, n) - 0.25 * np.eye(2**n))
    return h


def dense_hdm(n, p, lam):
    h = 0
    for j in range(1, n + 1):
        k = j % n + 1
        h = h + 0.5j * lam * (np.exp(-1j * p) * dense_site(SP, j, n) @ dense_site(SM, k, n)
                              - np.exp(1j * p) * dense_site(SM, j, n) @ dense_site(SP, k, n))
    return h


def dense_product(factors):
    """Product state from per-site (down, up) amplitudes, site 1 first."""
    return reduce(np.kron, [np.asarray(f, dtype=complex) for f in reversed(list(factors))])


def dense_helix(n, theta, q):
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return dense_product([(c, -1j * np.exp(1j * q * j) * s) for j in range(1, n + 1)])


# One line per acceptance criterion, printed in the terminal summary.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
