"""Per-realization transmission schemes.

Four schemes share a common shape: a slot holds N probing phases followed
by one data phase. Each scheme decides, phase by phase, which transmitters
stay active; a data transmission succeeds when the final SIR meets the
required level beta. The retained sets are nested (a transmitter that goes
idle never comes back within the slot), so per-phase SIR can only improve.

Feedback SIR errors, when enabled, corrupt the threshold comparisons in the
probing phases with fresh zero-mean Gaussian draws on the linear SIR scale.
The final beta check models physical decodability and stays error free.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import NetworkRealization, compute_sirs

REFERENCE = "reference"
SIR_THRESHOLD = "sir_threshold"
PROBABILITY_BASED = "probability_based"
CHANNEL_THRESHOLD = "channel_threshold"

_KINDS = (REFERENCE, SIR_THRESHOLD, PROBABILITY_BASED, CHANNEL_THRESHOLD)


@dataclass(frozen=True)
class SchemeConfig:
    """Tagged configuration for one transmission scheme.

    Use the classmethod constructors; they fill in only the fields the
    chosen scheme actually reads.
    """

    kind: str
    beta: float
    thresholds: tuple[float, ...] = ()
    channel_threshold: float = 0.0
    probe_stages: int = 1
    sir_error_variance: float = 0.0
    slot_duration: float = 1.0
    probe_duration: float = 0.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown scheme kind {self.kind!r}")
        if self.beta <= 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if self.probe_stages < 1:
            raise ValueError(f"probe_stages must be >= 1, got {self.probe_stages}")
        if self.sir_error_variance < 0:
            raise ValueError("sir_error_variance must be nonnegative")
        if any(g < 0 for g in self.thresholds):
            raise ValueError("thresholds must be nonnegative")
        if self.kind == SIR_THRESHOLD and len(self.thresholds) != self.probe_stages:
            raise ValueError(
                f"expected {self.probe_stages} thresholds, got {len(self.thresholds)}"
            )
        if self.kind in (SIR_THRESHOLD, PROBABILITY_BASED):
            if self.probe_stages * self.probe_duration >= self.slot_duration:
                raise ValueError(
                    "probing overhead must be smaller than the slot: "
                    f"{self.probe_stages} * {self.probe_duration} >= {self.slot_duration}"
                )

    @classmethod
    def reference(cls, beta: float, slot_duration: float = 1.0) -> "SchemeConfig":
        """No scheduling: everyone transmits data immediately."""
        return cls(kind=REFERENCE, beta=beta, slot_duration=slot_duration)

    @classmethod
    def sir_threshold(
        cls,
        thresholds,
        beta: float,
        sir_error_variance: float = 0.0,
        slot_duration: float = 1.0,
        probe_duration: float = 0.0,
    ) -> "SchemeConfig":
        """Iterative SIR-threshold retention with one threshold per phase."""
        thresholds = tuple(float(g) for g in thresholds)
        return cls(
            kind=SIR_THRESHOLD,
            beta=beta,
            thresholds=thresholds,
            probe_stages=len(thresholds),
            sir_error_variance=sir_error_variance,
            slot_duration=slot_duration,
            probe_duration=probe_duration,
        )

    @classmethod
    def probability_based(
        cls,
        beta: float,
        probe_stages: int = 1,
        slot_duration: float = 1.0,
        probe_duration: float = 0.0,
    ) -> "SchemeConfig":
        """Retention with probability min(SIR/beta, 1) per phase."""
        return cls(
            kind=PROBABILITY_BASED,
            beta=beta,
            probe_stages=probe_stages,
            slot_duration=slot_duration,
            probe_duration=probe_duration,
        )

    @classmethod
    def channel_threshold(cls, threshold: float, beta: float, slot_duration: float = 1.0) -> "SchemeConfig":
        """Retention on direct fading strength only; interference plays no
        part in the decision."""
        if threshold < 0:
            raise ValueError("channel threshold must be nonnegative")
        return cls(
            kind=CHANNEL_THRESHOLD,
            beta=beta,
            channel_threshold=threshold,
            slot_duration=slot_duration,
        )


@dataclass
class PhaseTrace:
    """Per-phase record of one scheme run on one realization.

    ``retained[k]`` is the active mask of phase k (k = 0 is the initial
    probing phase; the last entry is the data phase). ``sirs[k]`` holds the
    SIR of phase k, NaN where inactive. ``success`` marks transmitters whose
    data transmission met the beta requirement.
    """

    retained: list[np.ndarray] = field(default_factory=list)
    sirs: list[np.ndarray] = field(default_factory=list)
    success: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=bool))


def _sirs(real: NetworkRealization, mask: np.ndarray, cache: dict | None) -> np.ndarray:
    """Memoized SIR evaluation; identical masks share one computation."""
    if cache is None:
        return compute_sirs(real, mask)
    key = mask.tobytes()
    hit = cache.get(key)
    if hit is None:
        hit = compute_sirs(real, mask)
        cache[key] = hit
    return hit


def _success_mask(mask: np.ndarray, sirs: np.ndarray, beta: float) -> np.ndarray:
    success = np.zeros(mask.shape, dtype=bool)
    idx = np.flatnonzero(mask)
    if idx.size:
        success[idx] = sirs[idx] >= beta
    return success


def run_reference(
    real: NetworkRealization, cfg: SchemeConfig, sir_cache: dict | None = None
) -> PhaseTrace:
    """Everyone transmits; success is simply SIR >= beta."""
    if cfg.kind != REFERENCE:
        raise ValueError(f"expected a reference config, got kind {cfg.kind!r}")
    everyone = np.ones(real.count, dtype=bool)
    sirs = _sirs(real, everyone, sir_cache)
    return PhaseTrace(
        retained=[everyone],
        sirs=[sirs],
        success=_success_mask(everyone, sirs, cfg.beta),
    )


def run_sir_threshold(
    real: NetworkRealization,
    cfg: SchemeConfig,
    rng: np.random.Generator | None = None,
    sir_cache: dict | None = None,
) -> PhaseTrace:
    """Iterative SIR-threshold retention over N probing phases.

    Phase k keeps transmitter i when its previous-phase feedback SIR (plus
    a Gaussian error when sir_error_variance > 0) is at least thresholds[k-1].
    A transmitter that drops out stays idle for the rest of the slot.
    """
    if cfg.kind != SIR_THRESHOLD:
        raise ValueError(f"expected a sir_threshold config, got kind {cfg.kind!r}")
    sigma = float(np.sqrt(cfg.sir_error_variance))
    if sigma > 0 and rng is None:
        raise ValueError("sir_error_variance > 0 requires an rng")
    n = real.count
    active = np.ones(n, dtype=bool)
    retained = [active]
    sirs = [_sirs(real, active, sir_cache)]
    for gamma in cfg.thresholds:
        prev = retained[-1]
        idx = np.flatnonzero(prev)
        feedback = sirs[-1]
        # Fixed draw count per phase (all n transmitters) keeps error
        # streams aligned across configs under common random numbers.
        if sigma > 0:
            noise = rng.normal(0.0, sigma, size=n)
            decide = feedback[idx] + noise[idx]
        else:
            decide = feedback[idx]
        keep = np.zeros(n, dtype=bool)
        keep[idx[decide >= gamma]] = True
        retained.append(keep)
        sirs.append(_sirs(real, keep, sir_cache))
    return PhaseTrace(
        retained=retained,
        sirs=sirs,
        success=_success_mask(retained[-1], sirs[-1], cfg.beta),
    )


def run_probability_based(
    real: NetworkRealization,
    cfg: SchemeConfig,
    rng: np.random.Generator,
    sir_cache: dict | None = None,
) -> PhaseTrace:
    """Random retention with probability min(previous SIR / beta, 1).

    A transmitter that skips a phase stays idle for the rest of the slot,
    mirroring the slot semantics of the threshold scheme.
    """
    if cfg.kind != PROBABILITY_BASED:
        raise ValueError(f"expected a probability_based config, got kind {cfg.kind!r}")
    n = real.count
    active = np.ones(n, dtype=bool)
    retained = [active]
    sirs = [_sirs(real, active, sir_cache)]
    for _ in range(cfg.probe_stages):
        prev = retained[-1]
        idx = np.flatnonzero(prev)
        draws = rng.random(n)
        stay_prob = np.minimum(sirs[-1][idx] / cfg.beta, 1.0)
        keep = np.zeros(n, dtype=bool)
        keep[idx[draws[idx] < stay_prob]] = True
        retained.append(keep)
        sirs.append(_sirs(real, keep, sir_cache))
    return PhaseTrace(
        retained=retained,
        sirs=sirs,
        success=_success_mask(retained[-1], sirs[-1], cfg.beta),
    )


def run_channel_threshold(
    real: NetworkRealization, cfg: SchemeConfig, sir_cache: dict | None = None
) -> PhaseTrace:
    """Keep transmitters whose direct fading gain meets the threshold.

    Structurally a single probing phase, but the decision reads only the
    direct channel strength, never the interference.
    """
    if cfg.kind != CHANNEL_THRESHOLD:
        raise ValueError(f"expected a channel_threshold config, got kind {cfg.kind!r}")
    n = real.count
    everyone = np.ones(n, dtype=bool)
    kept = real.fading.diagonal() >= cfg.channel_threshold
    sirs0 = _sirs(real, everyone, sir_cache)
    sirs1 = _sirs(real, kept, sir_cache)
    return PhaseTrace(
        retained=[everyone, kept],
        sirs=[sirs0, sirs1],
        success=_success_mask(kept, sirs1, cfg.beta),
    )


def run(
    real: NetworkRealization,
    cfg: SchemeConfig,
    rng: np.random.Generator | None = None,
    sir_cache: dict | None = None,
) -> PhaseTrace:
    """Dispatch to the scheme selected by cfg.kind."""
    if cfg.kind == REFERENCE:
        return run_reference(real, cfg, sir_cache)
    if cfg.kind == SIR_THRESHOLD:
        return run_sir_threshold(real, cfg, rng, sir_cache)
    if cfg.kind == PROBABILITY_BASED:
        if rng is None:
            raise ValueError("probability_based scheme requires an rng")
        return run_probability_based(real, cfg, rng, sir_cache)
    return run_channel_threshold(real, cfg, sir_cache)


def effective_capacity_factor(cfg: SchemeConfig) -> float:
    """Fraction of the slot left for data transmission.

    Probing schemes pay (slot - N*probe)/slot; the reference scheme and the
    single-probe channel-threshold scheme are charged no overhead.
    """
    if cfg.kind in (REFERENCE, CHANNEL_THRESHOLD):
        return 1.0
    overhead = cfg.probe_stages * cfg.probe_duration
    if overhead >= cfg.slot_duration:
        raise ValueError(
            f"probing overhead {overhead} must be smaller than the slot {cfg.slot_duration}"
        )
    return (cfg.slot_duration - overhead) / cfg.slot_duration
