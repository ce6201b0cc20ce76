"""Stochastic-geometry simulator and analytical toolkit for SIR-threshold
probe-and-transmit scheduling in slotted ad hoc networks."""

__version__ = "0.1.0"

from .analytic import AnalyticParams
from .channel import NetworkRealization, compute_sirs, draw_realization, path_loss
from .geometry import PointSet, SimWindow, interior_mask, place_receivers, sample_ppp
from .montecarlo import CapacityEstimate, SimPlan, estimate_capacity, estimate_capacity_many, sweep
from .scheduling import PhaseTrace, SchemeConfig, effective_capacity_factor

__all__ = [
    "AnalyticParams",
    "CapacityEstimate",
    "NetworkRealization",
    "PhaseTrace",
    "PointSet",
    "SchemeConfig",
    "SimPlan",
    "SimWindow",
    "compute_sirs",
    "draw_realization",
    "effective_capacity_factor",
    "estimate_capacity",
    "estimate_capacity_many",
    "interior_mask",
    "path_loss",
    "place_receivers",
    "sample_ppp",
    "sweep",
]
