import os

import numpy as np
import pytest

from goldensd import model, preproc


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: end-to-end acceptance criteria (slow)")


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture(scope="session")
def workers():
    """Worker count for the heavy Monte Carlo tests."""
    return max(1, min(2, os.cpu_count() or 1))


def random_instance(mode, qam, snr_db, rng):
    """One complete (system, symbols, received, factors) draw."""
    const = model.constellation_for_qam(qam)
    n0 = model.snr_to_n0(snr_db, const, mode)
    h = model.draw_channel(mode, rng)
    system = model.build_system(mode, h, n0=n0)
    s = model.draw_symbols(const, rng)
    y = model.transmit(s, system, rng)
    return const, system, s, y, preproc.qr_givens(system.lattice)
