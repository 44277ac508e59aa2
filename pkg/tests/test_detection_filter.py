import numpy as np
import pytest
from hypothesis import given, strategies as st

from vinerow.detection_filter import (Detection, FilterConfig, FilterState,
                                      confirmed, ingest)
from vinerow.errors import InvalidParameter


def feed(points, **cfg):
    state = FilterState(FilterConfig(**cfg))
    for i, p in enumerate(points):
        state.ingest(Detection(p, i))
    return state


def test_first_insertion():
    s = feed([(1, 1)])
    assert [(c.position, c.count) for c in s.clusters] == [((1.0, 1.0), 1)]


def test_outside_box_creates_new_cluster():
    s = feed([(1, 1), (3, 3)], merge_radius=0.4)
    assert len(s.clusters) == 2


def test_rolling_average_update_matches_raw_mean():
    raw = [(0.0, 0.0), (0.0, 0.0), (0.3, 0.0)]
    s = feed(raw, merge_radius=0.4)
    (c,) = s.clusters
    assert c.count == 3
    assert c.position == pytest.approx((0.1, 0.0), abs=1e-12)
    assert c.position == pytest.approx(tuple(np.mean(raw, axis=0)), abs=1e-12)


def test_membership_is_a_box_not_a_disc():
    # (0.35, 0.35) is 0.49 m away but inside the 0.4 half-width box
    s = feed([(0, 0), (0.35, 0.35)], merge_radius=0.4)
    assert len(s.clusters) == 1
    s = feed([(0, 0), (0.41, 0.0)], merge_radius=0.4)
    assert len(s.clusters) == 2


def test_box_boundary_is_inclusive():
    s = feed([(0.0, 0.0), (0.5, -0.5)], merge_radius=0.5)
    assert len(s.clusters) == 1


def test_first_matching_cluster_wins():
    s = feed([(0, 0), (0.7, 0)], merge_radius=0.4)
    assert len(s.clusters) == 2
    s.ingest(Detection((0.35, 0.0)))
    a, b = s.clusters
    assert a.count == 2 and b.count == 1
    assert s.total_count == 3


def test_confirmed_is_strictly_greater_than_threshold():
    s = feed([(0, 0)] * 1 + [(5, 5)] * 2 + [(9, 9)] * 3)
    assert [c.count for c in s.clusters] == [1, 2, 3]
    assert [c.position for c in s.confirmed()] == [(9.0, 9.0)]


def test_confirmed_empty_state():
    assert confirmed(FilterState()) == []


def test_confirmed_keeps_id_order_and_is_idempotent():
    s = feed([(5, 5)] * 3 + [(0, 0)] * 3)
    first = s.confirmed()
    assert [c.id for c in first] == [0, 1]
    assert s.confirmed() == first


def test_functional_ingest_does_not_mutate():
    s = FilterState()
    s2 = ingest(Detection((1.0, 2.0)), s)
    assert s.clusters == [] and len(s2.clusters) == 1


def test_rejects_non_finite_detection():
    with pytest.raises(InvalidParameter):
        Detection((float("nan"), 0.0))


def test_config_validation():
    with pytest.raises(InvalidParameter):
        FilterConfig(merge_radius=0.0)
    with pytest.raises(InvalidParameter):
        FilterConfig(confirm_threshold=0)


small = st.floats(-0.1, 0.1, allow_nan=False)


@given(st.lists(st.tuples(small, small), min_size=1, max_size=60))
def test_mean_equivalence_any_order(points):
    for order in (points, points[::-1]):
        s = feed(order, merge_radius=0.4)
        (c,) = s.clusters
        assert c.count == len(points)
        assert c.position == pytest.approx(tuple(np.mean(points, axis=0)), abs=1e-9)


@given(st.lists(st.tuples(st.floats(-5, 5), st.floats(-5, 5)), max_size=80))
def test_count_conservation(points):
    s = feed(points)
    assert s.total_count == len(points)
    assert all(c.count >= 1 for c in s.clusters)


@given(st.lists(st.tuples(st.floats(-5, 5), st.floats(-5, 5)), min_size=1, max_size=30),
       st.data())
def test_detection_at_cluster_position_never_creates_cluster(points, data):
    s = feed(points)
    n = len(s.clusters)
    target = data.draw(st.sampled_from(s.clusters))
    s.ingest(Detection(target.position))
    assert len(s.clusters) == n
