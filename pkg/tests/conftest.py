import os

import numpy as np
import pytest

from sirsched.analytic import AnalyticParams
from sirsched.channel import NetworkRealization
from sirsched.geometry import PointSet, SimWindow


def worker_count() -> int:
    """Worker processes for heavy Monte Carlo tests (env-overridable)."""
    return int(os.environ.get("SIRSCHED_TEST_WORKERS", min(2, os.cpu_count() or 1)))


@pytest.fixture(scope="session")
def paper_params() -> AnalyticParams:
    return AnalyticParams()  # lambda0=0.0025, d=10, alpha=4, beta=2.5


def hand_realization(fading=None, interior=None) -> NetworkRealization:
    """Two-link network with hand-checkable geometry.

    tx0 at (0,0) with rx0 at (10,0); tx1 at (30,0) with rx1 at (40,0).
    Cross distances: tx1->rx0 is 20 m, tx0->rx1 is 40 m. With alpha=4 and
    the default fading below, SIR_0 = 40 and SIR_1 = 768 exactly.
    """
    tx = PointSet(np.array([[0.0, 0.0], [30.0, 0.0]]))
    rx = PointSet(np.array([[10.0, 0.0], [40.0, 0.0]]))
    if fading is None:
        fading = np.array([[2.0, 0.5], [0.8, 1.5]])
    if interior is None:
        interior = np.array([True, True])
    return NetworkRealization(
        tx=tx,
        rx=rx,
        fading=np.asarray(fading, dtype=float),
        link_distance=10.0,
        alpha=4.0,
        interior=np.asarray(interior, dtype=bool),
    )


def small_window() -> SimWindow:
    """Cheap window for tests that only need many independent draws."""
    return SimWindow(outer_min=0.0, outer_max=200.0, inner_min=60.0, inner_max=140.0)
