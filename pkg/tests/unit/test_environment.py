"""Environment generation tests."""

import numpy as np
import pytest
from pydantic import ValidationError
from scipy import stats

from src.belief.grid import BeliefMap
from src.geometry.bounds import Bounds
from src.models.bench import EnvDistribution, EnvSpec, GaussianPrior, PriorityRegion
from src.services.environment import Environment, generate_env, rasterize, sample_truth

pytestmark = pytest.mark.unit

SQUARE = Bounds.from_size(300.0, 300.0)


def _spec(*priors, **kwargs):
    return EnvSpec(bounds=SQUARE, cell_size=10.0, priors=list(priors), **kwargs)


def test_zero_clusters_is_an_empty_map():
    env = generate_env(EnvDistribution(), SQUARE, 10.0, np.random.default_rng(0), count=0)
    assert not env.belief.prob.any()
    assert env.belief.total_entropy() == 0.0
    assert env.cluster_masks() == []


def test_peak_sits_on_the_center_cell():
    belief = rasterize(_spec(GaussianPrior(x=155.0, y=155.0, sigma=20.0, peak=0.3)))
    center = belief.cell_at(155.0, 155.0)
    assert belief.prob[center] == pytest.approx(0.3)
    assert int(np.argmax(belief.prob)) == center


def test_bumps_add_and_are_capped():
    overlap = rasterize(
        _spec(
            GaussianPrior(x=155.0, y=155.0, sigma=20.0, peak=0.3),
            GaussianPrior(x=155.0, y=155.0, sigma=20.0, peak=0.15),
        )
    )
    assert overlap.prob.max() == pytest.approx(0.45)
    capped = rasterize(_spec(GaussianPrior(x=155.0, y=155.0, sigma=20.0, peak=0.9)))
    assert capped.prob.max() == pytest.approx(0.5)
    assert np.all(capped.prob <= 0.5)


def test_priority_regions_weight_cells():
    region = PriorityRegion(bounds=Bounds(x_min=0.0, y_min=0.0, x_max=100.0, y_max=300.0), weight=3.0)
    belief = rasterize(_spec(priority_regions=[region]))
    assert belief.priority[belief.cell_at(50.0, 50.0)] == 3.0
    assert belief.priority[belief.cell_at(250.0, 50.0)] == 1.0


def test_same_seed_same_map():
    dist = EnvDistribution(sigma_min=12.0, sigma_max=90.0)
    a = generate_env(dist, SQUARE, 10.0, np.random.default_rng(42))
    b = generate_env(dist, SQUARE, 10.0, np.random.default_rng(42))
    c = generate_env(dist, SQUARE, 10.0, np.random.default_rng(43))
    assert np.array_equal(a.belief.prob, b.belief.prob)
    assert a.spec == b.spec
    assert not np.array_equal(a.belief.prob, c.belief.prob)


def test_generated_priors_follow_distribution():
    dist = EnvDistribution()
    bounds = Bounds.from_size(1000.0, 1000.0)
    rng = np.random.default_rng(7)
    counts = np.zeros(17, dtype=int)
    for _ in range(850):
        env = generate_env(dist, bounds, 100.0, rng)
        n = len(env.spec.priors)
        assert 4 <= n <= 20
        counts[n - 4] += 1
        for prior in env.spec.priors:
            assert 60.0 <= prior.sigma <= 450.0
            assert 0.05 <= prior.peak <= 0.5
            assert bounds.contains(prior.x, prior.y)
    assert stats.chisquare(counts).pvalue > 0.001


def test_env_spec_validation():
    with pytest.raises(ValidationError):
        _spec(GaussianPrior(x=400.0, y=10.0, sigma=20.0, peak=0.3))
    with pytest.raises(ValidationError):
        GaussianPrior(x=0.0, y=0.0, sigma=20.0, peak=1.0)
    with pytest.raises(ValidationError):
        GaussianPrior(x=0.0, y=0.0, sigma=0.0, peak=0.3)
    with pytest.raises(ValidationError):
        EnvDistribution(count_min=5, count_max=4)


def test_truth_follows_prior(rng):
    certain = BeliefMap.uniform(300.0, 300.0, 10.0, 0.0)
    assert not sample_truth(certain, rng).any()
    half = BeliefMap.uniform(1000.0, 1000.0, 10.0, 0.5)
    assert sample_truth(half, rng).mean() == pytest.approx(0.5, abs=0.02)


def test_cluster_mask_falls_back_to_center_cell():
    env = Environment.from_spec(_spec(GaussianPrior(x=151.0, y=149.0, sigma=1.0, peak=0.3)))
    (mask,) = env.cluster_masks()
    assert mask.sum() == 1
    assert mask[env.belief.cell_at(151.0, 149.0)]
