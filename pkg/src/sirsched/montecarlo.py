"""Seeded Monte Carlo estimation of spatial capacity.

Every realization index maps to its own random stream through a pure
function of (base_seed, index), so estimates are reproducible bit for bit,
realizations can run in any order or in parallel, and different schemes
evaluated with the same base seed see identical network draws. That common
random numbers pairing turns the in-expectation orderings between schemes
into exact per-realization set inclusions, which the test suite exploits.

Capacity per realization is the number of successful transmitters inside
the interior sampling square divided by its area, scaled by the scheme's
effective data-transmission time fraction.
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass, field

import numpy as np

from . import scheduling
from .analytic import AnalyticParams
from .channel import NetworkRealization, draw_realization
from .geometry import SimWindow
from .scheduling import SchemeConfig, effective_capacity_factor

DEFAULT_MAX_EXPECTED_POINTS = 5000.0


@dataclass(frozen=True)
class SimPlan:
    """One Monte Carlo job: parameter point, scheme, window, trial count."""

    params: AnalyticParams
    scheme: SchemeConfig
    window: SimWindow = field(default_factory=SimWindow)
    realizations: int = 2000
    base_seed: int = 0
    max_expected_points: float = DEFAULT_MAX_EXPECTED_POINTS
    label: str = ""

    def __post_init__(self):
        if self.realizations < 1:
            raise ValueError(f"realizations must be >= 1, got {self.realizations}")


@dataclass(frozen=True)
class CapacityEstimate:
    """Monte Carlo spatial-capacity estimate with its standard error.

    ``success_prob_mean`` pools successes over all interior transmitters of
    all realizations.
    """

    mean: float
    std_error: float
    success_prob_mean: float
    realizations: int
    base_seed: int


@dataclass
class SweepRow:
    """One row of a sweep: either an estimate or the error that prevented it."""

    index: int
    label: str
    plan: SimPlan
    estimate: CapacityEstimate | None = None
    error: str | None = None


def realization_seed(base_seed: int, index: int) -> np.random.SeedSequence:
    """Derived seed for one realization; pure function of its arguments."""
    return np.random.SeedSequence(entropy=base_seed, spawn_key=(index,))


def _check_budget(params: AnalyticParams, window: SimWindow, max_expected_points: float):
    expected = params.lambda0 * window.outer_area
    if expected > max_expected_points:
        raise ValueError(
            f"plan expects {expected:.0f} transmitters per realization, over the "
            f"budget of {max_expected_points:.0f}; the fading matrix grows as n^2. "
            "Raise max_expected_points to override."
        )


def _realization_streams(base_seed: int, index: int):
    geometry_seed, scheme_seed = realization_seed(base_seed, index).spawn(2)
    return geometry_seed, scheme_seed


def _draw_indexed_realization(
    params: AnalyticParams, window: SimWindow, base_seed: int, index: int
) -> tuple[NetworkRealization, np.random.SeedSequence]:
    geometry_seed, scheme_seed = _realization_streams(base_seed, index)
    real = draw_realization(
        params.lambda0, window, params.d, params.alpha, np.random.default_rng(geometry_seed)
    )
    return real, scheme_seed


def _block_stats(args) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-realization statistics for a contiguous block of indices.

    Returns per-arm capacities (arms, block), per-arm interior success
    counts, and interior transmitter counts. Top-level so process pools can
    pickle it.
    """
    params, schemes, window, base_seed, indices = args
    inv_area = 1.0 / window.inner_area
    factors = [effective_capacity_factor(cfg) for cfg in schemes]
    caps = np.zeros((len(schemes), len(indices)))
    successes = np.zeros((len(schemes), len(indices)))
    interior_counts = np.zeros(len(indices))
    for pos, index in enumerate(indices):
        real, scheme_seed = _draw_indexed_realization(params, window, base_seed, index)
        interior_counts[pos] = int(real.interior.sum())
        sir_cache: dict = {}
        for arm, cfg in enumerate(schemes):
            # Every arm replays the same scheme stream, so arms differ only
            # in their configuration, never in the randomness they see.
            rng = np.random.default_rng(scheme_seed)
            trace = scheduling.run(real, cfg, rng, sir_cache)
            n_success = int((trace.success & real.interior).sum())
            successes[arm, pos] = n_success
            caps[arm, pos] = n_success * inv_area * factors[arm]
    return caps, successes, interior_counts


def _per_realization_stats(
    params: AnalyticParams,
    schemes: list[SchemeConfig],
    window: SimWindow,
    realizations: int,
    base_seed: int,
    workers: int = 1,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    indices = np.arange(realizations)
    if workers <= 1:
        return _block_stats((params, schemes, window, base_seed, indices))
    blocks = np.array_split(indices, min(4 * workers, realizations))
    jobs = [(params, schemes, window, base_seed, block) for block in blocks if block.size]
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(_block_stats, jobs))
    caps = np.concatenate([r[0] for r in results], axis=1)
    successes = np.concatenate([r[1] for r in results], axis=1)
    interior_counts = np.concatenate([r[2] for r in results])
    return caps, successes, interior_counts


def _estimate_from_stats(
    caps: np.ndarray, successes: np.ndarray, interior_counts: np.ndarray,
    realizations: int, base_seed: int,
) -> CapacityEstimate:
    mean = float(caps.mean())
    std_error = float(caps.std(ddof=1) / np.sqrt(realizations)) if realizations > 1 else 0.0
    total_interior = interior_counts.sum()
    success_prob = float(successes.sum() / total_interior) if total_interior > 0 else 0.0
    return CapacityEstimate(
        mean=mean,
        std_error=std_error,
        success_prob_mean=success_prob,
        realizations=realizations,
        base_seed=base_seed,
    )


def estimate_capacity_many(
    params: AnalyticParams,
    schemes: list[SchemeConfig],
    window: SimWindow | None = None,
    realizations: int = 2000,
    base_seed: int = 0,
    max_expected_points: float = DEFAULT_MAX_EXPECTED_POINTS,
    workers: int = 1,
) -> list[CapacityEstimate]:
    """Estimate several schemes on shared network realizations.

    Each arm's estimate is identical to running it alone with the same base
    seed; sharing just avoids redrawing the fading matrices and pairs the
    arms for low-variance comparisons.
    """
    window = window or SimWindow()
    if not schemes:
        raise ValueError("need at least one scheme")
    _check_budget(params, window, max_expected_points)
    caps, successes, interior_counts = _per_realization_stats(
        params, list(schemes), window, realizations, base_seed, workers
    )
    return [
        _estimate_from_stats(caps[a], successes[a], interior_counts, realizations, base_seed)
        for a in range(len(schemes))
    ]


def estimate_capacity(plan: SimPlan, workers: int = 1) -> CapacityEstimate:
    """Monte Carlo spatial capacity for one plan."""
    return estimate_capacity_many(
        plan.params,
        [plan.scheme],
        plan.window,
        plan.realizations,
        plan.base_seed,
        plan.max_expected_points,
        workers,
    )[0]


def capacity_samples(plan: SimPlan, workers: int = 1) -> np.ndarray:
    """Per-realization capacities in realization-index order."""
    _check_budget(plan.params, plan.window, plan.max_expected_points)
    caps, _, _ = _per_realization_stats(
        plan.params, [plan.scheme], plan.window, plan.realizations, plan.base_seed, workers
    )
    return caps[0]


def sweep(plans: list[SimPlan], workers: int = 1) -> list[SweepRow]:
    """Run estimate_capacity per plan; failures become row errors, not aborts."""
    if not plans:
        raise ValueError("sweep needs at least one plan")
    rows = []
    for i, plan in enumerate(plans):
        row = SweepRow(index=i, label=plan.label, plan=plan)
        try:
            row.estimate = estimate_capacity(plan, workers=workers)
        except Exception as exc:  # noqa: BLE001 - per-row error reporting is the contract
            row.error = f"{type(exc).__name__}: {exc}"
        rows.append(row)
    return rows


def iter_paired_traces(
    params: AnalyticParams,
    schemes: list[SchemeConfig],
    window: SimWindow | None = None,
    realizations: int = 100,
    base_seed: int = 0,
    max_expected_points: float = DEFAULT_MAX_EXPECTED_POINTS,
):
    """Yield (index, realization, [trace per scheme]) with shared draws.

    The trace-level view of estimate_capacity_many, for checks that need
    the per-realization success sets rather than aggregate capacity.
    """
    window = window or SimWindow()
    _check_budget(params, window, max_expected_points)
    for index in range(realizations):
        real, scheme_seed = _draw_indexed_realization(params, window, base_seed, index)
        sir_cache: dict = {}
        traces = [
            scheduling.run(real, cfg, np.random.default_rng(scheme_seed), sir_cache)
            for cfg in schemes
        ]
        yield index, real, traces
