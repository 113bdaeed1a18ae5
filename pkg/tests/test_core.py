import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stminer.core import (
    EmbeddingSpace,
    EventDataset,
    EventInstance,
    NeighborhoodParams,
    NormalizationParams,
    neighborhood_volume,
    space_volume,
    st_distance,
)


def test_space_volume():
    assert space_volume(EmbeddingSpace(((0, 1000), (0, 1000)), (0, 1200))) == 1.2e9
    assert space_volume(EmbeddingSpace(((0, 1),), (0, 1))) == 1
    assert space_volume(EmbeddingSpace(((2, 5),), (0, 10))) == 30


def test_space_volume_degenerate():
    with pytest.raises(ValueError, match="zero-volume"):
        space_volume(EmbeddingSpace(((0, 0),), (0, 10)))
    with pytest.raises(ValueError):
        EmbeddingSpace(((5, 1),), (0, 1))


def test_neighborhood_volume():
    assert neighborhood_volume(NeighborhoodParams(10, 10), 2) == pytest.approx(3141.5926, abs=1e-4)
    assert neighborhood_volume(NeighborhoodParams(1, 1), 1) == 2
    assert neighborhood_volume(NeighborhoodParams(10, 10), 1) == 200
    with pytest.raises(ValueError):
        neighborhood_volume(NeighborhoodParams(1, 1), 3)
    with pytest.raises(ValueError):
        NeighborhoodParams(0, 1)


def test_st_distance_examples():
    assert st_distance((0,), 0, (3,), 4) == 5
    assert st_distance((1.5, 2), 7, (1.5, 2), 7) == 0
    norm = NormalizationParams(2.5, 30)
    assert st_distance((0, 0), 0, (2.5, 0), 30, norm) == pytest.approx(math.sqrt(2))
    with pytest.raises(ValueError):
        st_distance((0,), 0, (0, 0), 0)


# subnormal differences scaled by a factor > 1 can round to zero in any float code
coord = st.floats(-1e3, 1e3, allow_nan=False, allow_subnormal=False)
point = st.tuples(st.tuples(coord, coord), coord)
norms = st.builds(NormalizationParams, st.floats(0.1, 10), st.floats(0.1, 10))


@settings(max_examples=200)
@given(point, point, point, norms)
def test_st_distance_is_metric(a, b, c, norm):
    ab = st_distance(*a, *b, norm)
    assert ab == st_distance(*b, *a, norm)
    assert st_distance(*a, *a, norm) == 0
    if a != b:
        assert ab > 0
    assert st_distance(*a, *c, norm) <= ab + st_distance(*b, *c, norm) + 1e-9


@given(st.floats(0.1, 100), st.floats(0.1, 100), st.floats(0.01, 10))
def test_volumes_monotone(r, t, delta):
    for S in (1, 2):
        assert neighborhood_volume(NeighborhoodParams(r + delta, t), S) > neighborhood_volume(NeighborhoodParams(r, t), S)
        assert neighborhood_volume(NeighborhoodParams(r, t + delta), S) > neighborhood_volume(NeighborhoodParams(r, t), S)
    base = space_volume(EmbeddingSpace(((0, r),), (0, t)))
    assert space_volume(EmbeddingSpace(((0, r + delta),), (0, t))) > base
    assert space_volume(EmbeddingSpace(((0, r),), (0, t + delta))) > base


def test_dataset_invariants():
    space = EmbeddingSpace(((0, 10),), (0, 10))
    a = EventInstance("a", "A", (1,), 1)
    with pytest.raises(ValueError, match="duplicate"):
        EventDataset(frozenset("A"), [a, a], space)
    with pytest.raises(ValueError, match="unknown type"):
        EventDataset(frozenset("B"), [a], space)
    with pytest.raises(ValueError, match="coordinates"):
        EventDataset(frozenset("A"), [EventInstance("b", "A", (1, 2), 1)], space)
    with pytest.raises(ValueError, match="non-finite"):
        EventInstance("c", "A", (math.inf,), 0)


def test_bounding_box_and_inside_count(chains):
    assert chains.space.spatial_extent == ((1.0, 95.0),)
    assert chains.space.temporal_extent == (1.0, 45.0)
    assert chains.count_inside("B") == 18
    assert len(chains.of_type("D")) == 9
