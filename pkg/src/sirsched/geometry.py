"""Network geometry: Poisson transmitter fields on a bounded window.

Transmitters are scattered uniformly over the full outer window, while
capacity statistics are later restricted to an interior square (a guard
region). Receivers near the window border see artificially little
interference, so counting only interior transmitters keeps estimates
unbiased without toroidal wraparound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SimWindow:
    """Square simulation window with an interior sampling square.

    All coordinates are in meters. The interior square must lie strictly
    inside the outer square on both axes.
    """

    outer_min: float = 0.0
    outer_max: float = 600.0
    inner_min: float = 200.0
    inner_max: float = 400.0

    def __post_init__(self):
        if not (self.outer_min < self.inner_min < self.inner_max < self.outer_max):
            raise ValueError(
                "window corners must satisfy "
                "outer_min < inner_min < inner_max < outer_max, got "
                f"({self.outer_min}, {self.inner_min}, {self.inner_max}, {self.outer_max})"
            )

    @property
    def outer_side(self) -> float:
        return self.outer_max - self.outer_min

    @property
    def outer_area(self) -> float:
        return self.outer_side ** 2

    @property
    def inner_side(self) -> float:
        return self.inner_max - self.inner_min

    @property
    def inner_area(self) -> float:
        """Area over which successful transmitters are counted."""
        return self.inner_side ** 2


@dataclass(frozen=True, eq=False)
class PointSet:
    """A finite set of planar points, stored as an (n, 2) float array."""

    positions: np.ndarray

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=np.float64)
        if pos.ndim != 2 or pos.shape[1] != 2:
            raise ValueError(f"positions must have shape (n, 2), got {pos.shape}")
        object.__setattr__(self, "positions", pos)

    @property
    def count(self) -> int:
        return self.positions.shape[0]


def sample_ppp(density: float, window: SimWindow, rng: np.random.Generator) -> PointSet:
    """Sample a homogeneous Poisson point process over the outer window.

    The point count is Poisson with mean ``density * outer_area`` and the
    points are i.i.d. uniform over the outer square.
    """
    if density < 0:
        raise ValueError(f"density must be nonnegative, got {density}")
    if window.outer_area <= 0:
        raise ValueError("window has zero area")
    n = rng.poisson(density * window.outer_area)
    positions = rng.uniform(window.outer_min, window.outer_max, size=(n, 2))
    return PointSet(positions)


def place_receivers(tx: PointSet, link_distance: float, rng: np.random.Generator) -> PointSet:
    """Place one receiver per transmitter, uniformly on a circle of radius
    ``link_distance`` centered at its transmitter.

    Receivers may fall outside the outer window when their transmitter sits
    near the border; that is intentional and harmless because receivers do
    not interfere.
    """
    if link_distance <= 0:
        raise ValueError(f"link_distance must be positive, got {link_distance}")
    angles = rng.uniform(0.0, 2.0 * np.pi, size=tx.count)
    offsets = link_distance * np.stack([np.cos(angles), np.sin(angles)], axis=1)
    return PointSet(tx.positions + offsets)


def interior_mask(tx: PointSet, window: SimWindow) -> np.ndarray:
    """Boolean mask of transmitters inside the interior sampling square.

    Half-open convention [inner_min, inner_max) per axis, so tiled windows
    would never double-count a point.
    """
    pos = tx.positions
    lo, hi = window.inner_min, window.inner_max
    return (
        (pos[:, 0] >= lo) & (pos[:, 0] < hi) & (pos[:, 1] >= lo) & (pos[:, 1] < hi)
    )
