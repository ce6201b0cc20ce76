"""Channel model: power-law path loss, Rayleigh fading, and per-receiver SIR.

One :class:`NetworkRealization` captures everything random about a slot:
transmitter and receiver positions plus one n-by-n matrix of unit-mean
exponential fading gains. The fading is drawn once per slot and reused by
every probing phase, which makes SIR monotone under thinning an exact
per-realization fact rather than a distributional one.

The model is interference limited: no thermal noise term anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import PointSet, SimWindow, interior_mask, place_receivers, sample_ppp


def path_loss(distance, alpha: float):
    """Power-law path gain ``distance ** -alpha``.

    Rejects zero distance (co-located pairs are outside the model) and
    alpha <= 2 (the planar interference field would diverge).
    """
    if alpha <= 2:
        raise ValueError(f"path-loss exponent must exceed 2, got {alpha}")
    dist = np.asarray(distance, dtype=np.float64)
    if np.any(dist <= 0):
        raise ValueError("distance must be positive")
    result = dist ** (-alpha)
    return float(result) if np.isscalar(distance) else result


def _cross_path_loss(tx: np.ndarray, rx: np.ndarray, alpha: float) -> np.ndarray:
    """Matrix of |x_j - r_i|^-alpha gains, entry [j, i] = tx j to rx i."""
    dx = np.subtract.outer(tx[:, 0], rx[:, 0])
    dy = np.subtract.outer(tx[:, 1], rx[:, 1])
    dx *= dx
    dy *= dy
    dx += dy  # now squared distances
    if alpha == 4.0:
        np.multiply(dx, dx, out=dy)
        return np.reciprocal(dy, out=dy)
    return dx ** (-alpha / 2.0)


@dataclass(frozen=True, eq=False)
class NetworkRealization:
    """One sampled slot, immutable after construction.

    ``fading[j, i]`` is the channel power gain from transmitter j to
    receiver i. The derived ``cross_gain`` matrix (fading times path loss)
    and the direct-link gains are precomputed so that SIR evaluation over
    any active subset is a pure read.
    """

    tx: PointSet
    rx: PointSet
    fading: np.ndarray
    link_distance: float
    alpha: float
    interior: np.ndarray
    cross_gain: np.ndarray = field(init=False, repr=False)
    direct_gain: np.ndarray = field(init=False, repr=False)
    _own_cross_gain: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        n = self.tx.count
        fading = np.asarray(self.fading, dtype=np.float64)
        if fading.shape != (n, n):
            raise ValueError(f"fading must be ({n}, {n}), got {fading.shape}")
        if self.rx.count != n:
            raise ValueError("transmitter and receiver counts differ")
        if np.asarray(self.interior).shape != (n,):
            raise ValueError("interior mask length must equal the point count")
        object.__setattr__(self, "fading", fading)
        object.__setattr__(
            self, "interior", np.asarray(self.interior, dtype=bool)
        )
        cross = fading * _cross_path_loss(self.tx.positions, self.rx.positions, self.alpha)
        direct = fading.diagonal() * path_loss(self.link_distance, self.alpha)
        object.__setattr__(self, "cross_gain", cross)
        object.__setattr__(self, "direct_gain", direct)
        object.__setattr__(self, "_own_cross_gain", cross.diagonal().copy())

    @property
    def count(self) -> int:
        return self.tx.count


def draw_realization(
    density: float,
    window: SimWindow,
    link_distance: float,
    alpha: float,
    rng: np.random.Generator,
) -> NetworkRealization:
    """Sample a full slot: PPP transmitters, receivers, one fading draw.

    RNG consumption order is fixed (count, positions, angles, fading), so a
    fixed seed reproduces the realization bit for bit.
    """
    tx = sample_ppp(density, window, rng)
    rx = place_receivers(tx, link_distance, rng)
    fading = rng.exponential(1.0, size=(tx.count, tx.count))
    return NetworkRealization(
        tx=tx,
        rx=rx,
        fading=fading,
        link_distance=link_distance,
        alpha=alpha,
        interior=interior_mask(tx, window),
    )


def compute_sirs(real: NetworkRealization, active: np.ndarray) -> np.ndarray:
    """Per-receiver SIR over an active-transmitter subset.

    Returns an array of length n with the linear-scale SIR for every active
    transmitter, NaN for inactive ones, and +inf when the active set is a
    singleton (zero interference).
    """
    n = real.count
    active = np.asarray(active, dtype=bool)
    if active.shape != (n,):
        raise ValueError(f"active mask must have shape ({n},), got {active.shape}")
    sirs = np.full(n, np.nan)
    if not active.any():
        return sirs
    # Row sums of the cross-gain matrix over active transmitters; BLAS
    # matvec keeps this fast even for dense masks.
    totals = active.astype(np.float64) @ real.cross_gain
    interference = totals[active] - real._own_cross_gain[active]
    # A lone transmitter has exactly zero interference: SIR is unbounded.
    with np.errstate(divide="ignore", invalid="ignore"):
        sirs[active] = real.direct_gain[active] / interference
    return sirs
