"""Domain types and spatio-temporal geometry shared by the rest of the package."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np


@dataclass(frozen=True)
class EventInstance:
    id: str
    event_type: str
    location: tuple[float, ...]
    time: float

    def __post_init__(self):
        object.__setattr__(self, "location", tuple(float(c) for c in self.location))
        object.__setattr__(self, "time", float(self.time))
        if not all(math.isfinite(c) for c in self.location) or not math.isfinite(self.time):
            raise ValueError(f"instance {self.id!r} has non-finite coordinates")


@dataclass(frozen=True)
class EmbeddingSpace:
    spatial_extent: tuple[tuple[float, float], ...]
    temporal_extent: tuple[float, float]

    def __post_init__(self):
        for lo, hi in (*self.spatial_extent, self.temporal_extent):
            if hi < lo:
                raise ValueError(f"extent [{lo}, {hi}] has hi < lo")

    @property
    def spatial_dim(self) -> int:
        return len(self.spatial_extent)

    def contains(self, location: Sequence[float], time: float) -> bool:
        t_lo, t_hi = self.temporal_extent
        if not t_lo <= time <= t_hi:
            return False
        return all(lo <= c <= hi for c, (lo, hi) in zip(location, self.spatial_extent))

    @classmethod
    def bounding_box(cls, instances: Iterable[EventInstance], spatial_dim: int) -> "EmbeddingSpace":
        instances = list(instances)
        if not instances:
            return cls(((0.0, 0.0),) * spatial_dim, (0.0, 0.0))
        locs = np.array([e.location for e in instances], dtype=float).reshape(-1, spatial_dim)
        times = np.array([e.time for e in instances], dtype=float)
        spatial = tuple((float(lo), float(hi)) for lo, hi in zip(locs.min(0), locs.max(0)))
        return cls(spatial, (float(times.min()), float(times.max())))


@dataclass(frozen=True)
class NeighborhoodParams:
    """Cylindrical neighborhood: spatial radius and (forward) temporal interval."""

    radius: float
    interval: float

    def __post_init__(self):
        if not (self.radius > 0 and self.interval > 0):
            raise ValueError("radius and interval must be positive")


@dataclass(frozen=True)
class NormalizationParams:
    """Per-axis scale for microclustering distances.

    Spatial axes are divided by ``spatial`` and time by ``temporal``. The
    default (1, 1) leaves raw coordinates untouched.
    """

    spatial: float = 1.0
    temporal: float = 1.0

    def __post_init__(self):
        if not (self.spatial > 0 and self.temporal > 0):
            raise ValueError("normalization scales must be positive")

    @property
    def enabled(self) -> bool:
        return (self.spatial, self.temporal) != (1.0, 1.0)

    # each axis group contributes at most ~1 once scaled
    NORMALIZED_THRESHOLD = math.sqrt(2.0)

    def scale(self, points: np.ndarray) -> np.ndarray:
        """Scale an (n, S+1) array of [location..., time] rows."""
        factors = np.full(points.shape[-1], 1.0 / self.spatial)
        factors[-1] = 1.0 / self.temporal
        return points * factors


@dataclass
class EventDataset:
    event_types: frozenset[str]
    instances: list[EventInstance]
    space: EmbeddingSpace
    _by_id: dict[str, EventInstance] = field(init=False, repr=False)

    def __post_init__(self):
        self.event_types = frozenset(self.event_types)
        self._by_id = {}
        for e in self.instances:
            if e.id in self._by_id:
                raise ValueError(f"duplicate instance id {e.id!r}")
            if e.event_type not in self.event_types:
                raise ValueError(f"instance {e.id!r} has unknown type {e.event_type!r}")
            if len(e.location) != self.space.spatial_dim:
                raise ValueError(
                    f"instance {e.id!r} has {len(e.location)} coordinates, "
                    f"expected {self.space.spatial_dim}"
                )
            self._by_id[e.id] = e

    @classmethod
    def from_instances(
        cls,
        instances: Iterable[EventInstance],
        space: EmbeddingSpace | None = None,
        event_types: Iterable[str] | None = None,
        spatial_dim: int | None = None,
    ) -> "EventDataset":
        instances = list(instances)
        if spatial_dim is None:
            if space is not None:
                spatial_dim = space.spatial_dim
            elif instances:
                spatial_dim = len(instances[0].location)
            else:
                spatial_dim = 2
        if space is None:
            space = EmbeddingSpace.bounding_box(instances, spatial_dim)
        types = set(event_types or ()) | {e.event_type for e in instances}
        return cls(frozenset(types), instances, space)

    def __len__(self) -> int:
        return len(self.instances)

    def __getitem__(self, instance_id: str) -> EventInstance:
        return self._by_id[instance_id]

    @property
    def spatial_dim(self) -> int:
        return self.space.spatial_dim

    def of_type(self, event_type: str) -> list[EventInstance]:
        return [e for e in self.instances if e.event_type == event_type]

    def count_inside(self, event_type: str) -> int:
        return sum(
            1 for e in self.instances
            if e.event_type == event_type and self.space.contains(e.location, e.time)
        )


def points_array(instances: Sequence[EventInstance], spatial_dim: int) -> np.ndarray:
    """Stack instances into an (n, S+1) float array of [location..., time]."""
    out = np.empty((len(instances), spatial_dim + 1), dtype=float)
    for i, e in enumerate(instances):
        out[i, :spatial_dim] = e.location
        out[i, spatial_dim] = e.time
    return out


def space_volume(space: EmbeddingSpace) -> float:
    vol = 1.0
    for lo, hi in (*space.spatial_extent, space.temporal_extent):
        vol *= hi - lo
    if vol <= 0:
        raise ValueError("zero-volume space")
    return vol


def neighborhood_volume(params: NeighborhoodParams, spatial_dim: int) -> float:
    if spatial_dim == 2:
        return math.pi * params.radius ** 2 * params.interval
    if spatial_dim == 1:
        return 2.0 * params.radius * params.interval
    raise ValueError(f"unsupported spatial dimensionality {spatial_dim}")


def st_distance(
    a_location: Sequence[float],
    a_time: float,
    b_location: Sequence[float],
    b_time: float,
    norm: NormalizationParams = NormalizationParams(),
) -> float:
    """Euclidean distance over (location, time) after per-axis scaling."""
    if len(a_location) != len(b_location):
        raise ValueError("dimension mismatch")
    # hypot avoids underflow when squaring tiny differences
    return math.hypot(
        *((x - y) / norm.spatial for x, y in zip(a_location, b_location)),
        (a_time - b_time) / norm.temporal,
    )


def spatial_distance(a: Sequence[float], b: Sequence[float]) -> float:
    return math.dist(a, b)
