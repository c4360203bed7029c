import math

import numpy as np
import pytest

from topicsim.lifecycle import (
    AccessSampler,
    LifecycleParams,
    density,
    density_unnormalized,
    normalizer,
    verify_smoothness,
)

from helpers import closed_form_cdf, ks_statistic, simpson_mass

SMALL = LifecycleParams(breaking_degree=1.0, peak_onset=2.0, plateau_rate=0.5, horizon=12.0)
DEFAULTS = LifecycleParams()

# Composite Simpson with 1e6 uniform panels over [0, 12] for SMALL,
# computed once and frozen; the closed-form value agrees to 2e-15.
SMALL_MASS_ORACLE = 5.728555960766272


def test_branch_values_at_known_points():
    assert density_unnormalized(2.0, SMALL) == pytest.approx(1.0, abs=1e-12)
    assert density_unnormalized(4.0, SMALL) == pytest.approx(1.0, abs=1e-12)
    assert density_unnormalized(3.0, SMALL) == pytest.approx(1.5, abs=1e-12)
    assert density_unnormalized(1.0, SMALL) == pytest.approx(math.exp(-1.0), abs=1e-12)


def test_density_rejects_times_outside_lifecycle():
    with pytest.raises(ValueError):
        density_unnormalized(-0.001, SMALL)
    with pytest.raises(ValueError):
        density_unnormalized(12.001, SMALL)


def test_param_validation():
    with pytest.raises(ValueError):
        LifecycleParams(breaking_degree=0.0)
    with pytest.raises(ValueError):
        LifecycleParams(peak_onset=-1.0)
    with pytest.raises(ValueError):
        LifecycleParams(plateau_rate=0.0)
    # horizon must leave room for the full plateau
    with pytest.raises(ValueError):
        LifecycleParams(peak_onset=240.0, plateau_rate=0.01, horizon=340.0)


def test_normalizer_matches_frozen_simpson_oracle():
    assert normalizer(SMALL) == pytest.approx(SMALL_MASS_ORACLE, abs=1e-9)


def test_normalized_density_integrates_to_one():
    for params in (SMALL, DEFAULTS):
        norm = normalizer(params)
        oracle = simpson_mass(
            params.breaking_degree, params.peak_onset, params.plateau_rate, params.horizon
        )
        assert oracle / norm == pytest.approx(1.0, abs=1e-6)


def test_density_is_positive_everywhere():
    t = np.linspace(0.0, DEFAULTS.horizon, 10_001)
    assert np.all(density(t, DEFAULTS) > 0.0)


def test_smoothness_defaults():
    report = verify_smoothness(SMALL)
    assert report.max_value_gap() <= 1e-12
    assert report.max_slope_gap() <= 1e-12
    # one-sided slopes equal +/- breaking_degree at the junctions
    assert report.slope_before_peak_onset == pytest.approx(1.0, abs=1e-12)
    assert report.slope_after_peak_onset == pytest.approx(1.0, abs=1e-12)
    assert report.slope_before_plateau_end == pytest.approx(-1.0, abs=1e-12)
    assert report.slope_after_plateau_end == pytest.approx(-1.0, abs=1e-12)


def test_smoothness_over_random_parameters():
    rng = np.random.default_rng(42)
    for _ in range(50):
        tm = rng.uniform(10.0, 600.0)
        a = rng.uniform(0.001, 1.0)
        params = LifecycleParams(
            breaking_degree=rng.uniform(0.1, 3.0),
            peak_onset=tm,
            plateau_rate=a,
            horizon=tm + 1.0 / a + rng.uniform(1.0, 500.0),
        )
        report = verify_smoothness(params)
        assert report.max_value_gap() <= 1e-12
        assert report.max_slope_gap() <= 1e-12
        assert report.slope_before_peak_onset == pytest.approx(
            params.breaking_degree, rel=1e-12
        )
        assert report.slope_after_plateau_end == pytest.approx(
            -params.breaking_degree, rel=1e-12
        )


def test_sampler_empty_and_deterministic():
    sampler = AccessSampler(DEFAULTS)
    assert sampler.sample_first(0, np.random.default_rng(1)).size == 0
    a = sampler.sample_first(1000, np.random.default_rng(7))
    b = sampler.sample_first(1000, np.random.default_rng(7))
    assert np.array_equal(a, b)
    assert np.all((a >= 0.0) & (a <= DEFAULTS.horizon))


def test_sampler_matches_analytic_cdf():
    sampler = AccessSampler(DEFAULTS)
    draws = sampler.sample_first(30_000, np.random.default_rng(123))
    stat = ks_statistic(
        draws,
        lambda x: closed_form_cdf(
            x,
            DEFAULTS.breaking_degree,
            DEFAULTS.peak_onset,
            DEFAULTS.plateau_rate,
            DEFAULTS.horizon,
        ),
    )
    assert stat < 0.015


def test_next_access_boundary_rules():
    sampler = AccessSampler(DEFAULTS)
    rng = np.random.default_rng(5)
    assert sampler.sample_next(DEFAULTS.horizon, 1.0, rng) is None
    for t_end in (0.0, 100.0, 900.0):
        assert sampler.sample_next(t_end, 0.0, rng) is None


def test_next_access_conditional_distribution():
    sampler = AccessSampler(DEFAULTS)
    rng = np.random.default_rng(99)
    draws = np.array([sampler.sample_next(0.0, 1.0, rng) for _ in range(100_000)])
    assert not np.any(draws == None)  # noqa: E711 - full remaining mass, always returns
    draws = draws.astype(float)
    stat = ks_statistic(
        draws,
        lambda x: closed_form_cdf(
            x,
            DEFAULTS.breaking_degree,
            DEFAULTS.peak_onset,
            DEFAULTS.plateau_rate,
            DEFAULTS.horizon,
        ),
    )
    assert stat < 0.02


def test_next_access_always_after_t_end():
    sampler = AccessSampler(DEFAULTS)
    rng = np.random.default_rng(11)
    for t_end in (0.0, 250.0, 700.0, 959.0):
        for _ in range(200):
            t = sampler.sample_next(t_end, 0.9, rng)
            if t is not None:
                assert t_end < t <= DEFAULTS.horizon
