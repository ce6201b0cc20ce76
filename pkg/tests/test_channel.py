import math

import numpy as np
import pytest

from conftest import hand_realization
from sirsched.channel import NetworkRealization, compute_sirs, draw_realization, path_loss
from sirsched.geometry import SimWindow


def test_path_loss_values():
    assert path_loss(1.0, 4.0) == 1.0
    assert math.isclose(path_loss(10.0, 4.0), 1e-4, rel_tol=1e-12)
    assert math.isclose(path_loss(2.0, 3.0), 0.125, rel_tol=1e-12)


def test_path_loss_rejects_bad_inputs():
    with pytest.raises(ValueError):
        path_loss(0.0, 4.0)
    with pytest.raises(ValueError):
        path_loss(-1.0, 4.0)
    with pytest.raises(ValueError):
        path_loss(1.0, 2.0)


def test_two_link_sirs_match_hand_computation():
    # SIR_0 = h00 * 10^-4 / (h10 * 20^-4) = 2e-4 / (0.8 * 6.25e-6) = 40
    # SIR_1 = h11 * 10^-4 / (h01 * 40^-4) = 1.5e-4 / (0.5 / 2.56e6) = 768
    real = hand_realization()
    sirs = compute_sirs(real, np.array([True, True]))
    assert math.isclose(sirs[0], 40.0, rel_tol=1e-12)
    assert math.isclose(sirs[1], 768.0, rel_tol=1e-12)


def test_singleton_active_set_is_unbounded():
    real = hand_realization()
    sirs = compute_sirs(real, np.array([True, False]))
    assert np.isinf(sirs[0])
    assert np.isnan(sirs[1])


def test_empty_realization():
    real = draw_realization(0.0, SimWindow(), 10.0, 4.0, np.random.default_rng(0))
    assert real.count == 0
    sirs = compute_sirs(real, np.zeros(0, dtype=bool))
    assert sirs.shape == (0,)


def test_fixed_seed_reproduces_realization():
    a = draw_realization(0.0025, SimWindow(), 10.0, 4.0, np.random.default_rng(21))
    b = draw_realization(0.0025, SimWindow(), 10.0, 4.0, np.random.default_rng(21))
    assert np.array_equal(a.tx.positions, b.tx.positions)
    assert np.array_equal(a.rx.positions, b.rx.positions)
    assert np.array_equal(a.fading, b.fading)
    assert np.array_equal(a.interior, b.interior)


def test_fading_is_unit_mean_exponential():
    real = draw_realization(0.0025, SimWindow(), 10.0, 4.0, np.random.default_rng(8))
    n2 = real.count ** 2
    assert n2 > 500_000
    # Exponential(1) has unit standard deviation: four standard errors.
    assert abs(real.fading.mean() - 1.0) < 4.0 / math.sqrt(n2)


def test_thinning_can_only_raise_sir():
    real = draw_realization(0.0025, SimWindow(), 10.0, 4.0, np.random.default_rng(13))
    rng = np.random.default_rng(5)
    larger = rng.random(real.count) < 0.8
    smaller = larger & (rng.random(real.count) < 0.5)
    sirs_large = compute_sirs(real, larger)
    sirs_small = compute_sirs(real, smaller)
    idx = np.flatnonzero(smaller)
    assert idx.size > 10
    assert np.all(sirs_small[idx] >= sirs_large[idx])


def test_fading_scale_invariance():
    # Doubling every fading entry rescales numerator and denominator alike,
    # and exact binary scaling makes the quotient bit-identical.
    real = draw_realization(0.001, SimWindow(), 10.0, 4.0, np.random.default_rng(17))
    doubled = NetworkRealization(
        tx=real.tx,
        rx=real.rx,
        fading=2.0 * real.fading,
        link_distance=10.0,
        alpha=4.0,
        interior=real.interior,
    )
    mask = np.ones(real.count, dtype=bool)
    assert np.array_equal(compute_sirs(real, mask), compute_sirs(doubled, mask), equal_nan=True)


def test_bad_active_mask_rejected():
    real = hand_realization()
    with pytest.raises(ValueError):
        compute_sirs(real, np.array([True]))


def test_sir_ccdf_matches_poisson_field_closed_form():
    # Empirical P(SIR >= beta) for the typical (most central interior)
    # transmitter over 2000 realizations against the closed form
    # exp(-pi lam d^2 sqrt(beta) * pi/2), within three binomial standard
    # errors.
    lam, d, beta = 0.0025, 10.0, 2.5
    expected = math.exp(-math.pi * lam * d * d * math.sqrt(beta) * (math.pi / 2.0))
    window = SimWindow()
    hits = 0
    trials = 0
    for seed in range(2000):
        real = draw_realization(lam, window, d, 4.0, np.random.default_rng(seed))
        idx = np.flatnonzero(real.interior)
        if idx.size == 0:
            continue
        # The typical transmitter must be an exchangeable pick (draw order
        # carries no spatial information); selecting by position, e.g. the
        # most central point, would bias toward isolated transmitters.
        typical = idx[0]
        sirs = compute_sirs(real, np.ones(real.count, dtype=bool))
        trials += 1
        hits += bool(sirs[typical] >= beta)
    p_hat = hits / trials
    stderr = math.sqrt(expected * (1.0 - expected) / trials)
    assert abs(p_hat - expected) < 3.0 * stderr
