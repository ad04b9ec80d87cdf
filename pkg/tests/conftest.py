import itertools

import numpy as np
import pytest

from iontrap_parity import build_space, sector_basis, sector_state


def basis_labels(space):
    """Enumerate (n_x, n_y, s) in the documented index order."""
    return list(itertools.product(range(space.dx), range(space.dy), range(2)))


def brute_force_matrix(space, element):
    """Matrix whose (i, j) entry is element(bra_labels, ket_labels)."""
    labels = basis_labels(space)
    m = np.zeros((space.dim, space.dim), dtype=complex)
    for i, bra in enumerate(labels):
        for j, ket in enumerate(labels):
            m[i, j] = element(bra, ket)
    return m


def random_sector_state(rng, space, N, s=0):
    n = len(sector_basis(space, N, s))
    c = rng.normal(size=n) + 1j * rng.normal(size=n)
    return sector_state(space, N, c, s)


@pytest.fixture
def rng():
    return np.random.default_rng(20261017)


@pytest.fixture
def small_space():
    return build_space(3, 2)


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(module.RESULTS, key=lambda s: int(s.split("] ")[1].split(".")[0])):
        terminalreporter.write_line(line)
