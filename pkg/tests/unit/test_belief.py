"""Belief map, entropy and detector model tests."""

import numpy as np
import pytest

from src.belief.grid import BeliefMap, total_entropy
from src.belief.sensor import (
    BeliefMapError,
    Measurement,
    SensorModel,
    bayes_update,
    entropy,
    entropy_array,
    lookup_rates,
    posterior,
)

pytestmark = pytest.mark.unit


def test_entropy_values():
    """Entropy peaks at 0.5 and vanishes at certainty."""
    assert entropy(0.5) == pytest.approx(1.0)
    assert entropy(0.9) == pytest.approx(0.4690, abs=1e-4)
    assert entropy(0.0) == 0.0
    assert entropy(1.0) == 0.0


def test_entropy_rejects_out_of_range():
    with pytest.raises(BeliefMapError):
        entropy(1.2)
    with pytest.raises(BeliefMapError):
        entropy(-0.1)


def test_entropy_array_matches_scalar():
    p = np.array([0.0, 0.1, 0.5, 0.9, 1.0])
    expected = [entropy(float(x)) for x in p]
    assert entropy_array(p) == pytest.approx(expected)


def test_lookup_rates_table(sensor):
    """Flat to 200 m, linear to 600 m, uninformative beyond."""
    assert lookup_rates(sensor, 100.0) == pytest.approx((0.9, 0.9))
    assert lookup_rates(sensor, 200.0) == pytest.approx((0.9, 0.9))
    assert lookup_rates(sensor, 400.0) == pytest.approx((0.7, 0.7))
    assert lookup_rates(sensor, 600.0) == pytest.approx((0.5, 0.5))
    assert lookup_rates(sensor, 601.0) == pytest.approx((0.5, 0.5))


def test_rates_array_matches_scalar(sensor):
    ranges = np.array([0.0, 150.0, 300.0, 599.0, 800.0])
    tpr, tnr = sensor.rates_array(ranges)
    for r, a, b in zip(ranges, tpr, tnr):
        assert (a, b) == pytest.approx(sensor.rates(float(r)))


def test_sensor_model_validation():
    with pytest.raises(BeliefMapError):
        SensorModel(breakpoints=((10.0, 0.9, 0.9),), max_range=600.0)
    with pytest.raises(BeliefMapError):
        SensorModel(breakpoints=((0.0, 0.9, 0.9), (0.0, 0.8, 0.8)), max_range=600.0)
    with pytest.raises(BeliefMapError):
        SensorModel(breakpoints=((0.0, 0.4, 0.9),), max_range=600.0)


def test_bayes_update_examples(sensor):
    assert bayes_update(0.5, Measurement(True, 100.0), sensor) == pytest.approx(0.9)
    assert bayes_update(0.5, Measurement(False, 100.0), sensor) == pytest.approx(0.1)


def test_uninformative_detector_keeps_prior():
    coin = SensorModel.constant(0.5, 0.5, 600.0)
    assert bayes_update(0.3, Measurement(True, 100.0), coin) == pytest.approx(0.3)
    assert bayes_update(0.3, Measurement(False, 100.0), coin) == pytest.approx(0.3)


def test_bayes_update_rejects_bad_prior(sensor):
    with pytest.raises(BeliefMapError):
        bayes_update(1.5, Measurement(True, 100.0), sensor)


def test_posterior_never_becomes_certain():
    """A perfect detector still leaves an uncertain cell short of 1."""
    post = posterior(np.array([0.5]), np.array([True]), np.array([1.0]), np.array([1.0]))
    assert 0.5 < post[0] < 1.0


def test_posterior_keeps_certain_cells():
    post = posterior(
        np.array([0.0, 1.0]), np.array([True, False]), np.array([0.9, 0.9]), np.array([0.9, 0.9])
    )
    assert post.tolist() == [0.0, 1.0]


def test_total_entropy_examples():
    assert total_entropy(BeliefMap(1.0, 2, 2)) == pytest.approx(4.0)
    certain = BeliefMap(1.0, 2, 2, prob=np.array([0.0, 1.0, 0.0, 1.0]))
    assert total_entropy(certain) == 0.0
    mixed = BeliefMap(1.0, 1, 2, prob=np.array([0.5, 0.9]))
    assert total_entropy(mixed) == pytest.approx(1.4690, abs=1e-4)


def test_index_and_row_col_are_inverse():
    belief = BeliefMap(10.0, 3, 4)
    for idx in range(belief.n_cells):
        assert belief.index(*belief.row_col(idx)) == idx
    with pytest.raises(BeliefMapError):
        belief.index(3, 0)
    with pytest.raises(BeliefMapError):
        belief.row_col(12)


def test_cell_geometry():
    belief = BeliefMap(10.0, 3, 4, origin=(100.0, 200.0))
    assert belief.cell_center(0) == (105.0, 205.0)
    assert belief.cell_at(139.0, 229.0) == belief.index(2, 3)
    assert belief.cell_at(99.0, 205.0) is None


def test_invalid_maps_rejected():
    with pytest.raises(BeliefMapError):
        BeliefMap(0.0, 2, 2)
    with pytest.raises(BeliefMapError):
        BeliefMap(1.0, 1, 2, prob=np.array([0.5, 1.5]))
    with pytest.raises(BeliefMapError):
        BeliefMap(1.0, 1, 2, priority=np.array([1.0, -1.0]))


def test_snapshot_is_independent(small_map):
    copy = small_map.snapshot()
    small_map.apply([0, 1], np.array([0.9, 0.1]))
    assert copy.prob[0] == 0.5
    assert small_map.prob[0] == 0.9


def test_save_and_load(tmp_path):
    belief = BeliefMap(15.0, 2, 3, origin=(5.0, 5.0), priority=np.array([1, 1, 2, 1, 1, 5.0]))
    belief.prob[4] = 0.25
    path = tmp_path / "belief.json"
    belief.save(path)
    loaded = BeliefMap.load(path)
    assert loaded.origin == belief.origin
    assert loaded.prob.tolist() == belief.prob.tolist()
    assert loaded.priority.tolist() == belief.priority.tolist()
