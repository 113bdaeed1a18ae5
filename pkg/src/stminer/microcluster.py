"""Greedy microclustering of same-type instances into a compact index.

Each event type is clustered independently: instances are visited in
(time, id) order and inserted into the microcluster with the nearest
representative; clusters whose diameter exceeds the threshold (or, for the
capped variant, whose size exceeds ``cap``) are split around their
farthest pair of members.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np
from scipy.spatial.distance import cdist

from .core import (
    EventDataset,
    EventInstance,
    NormalizationParams,
    points_array,
)


@dataclass(frozen=True)
class Microcluster:
    cid: int
    event_type: str
    members: tuple[str, ...]
    rep_location: tuple[float, ...]
    rep_time: float

    @property
    def count(self) -> int:
        return len(self.members)


@dataclass
class MicroclusterIndex:
    clusters: dict[str, list[Microcluster]]
    spatial_dim: int
    diameter_threshold: float | None = None
    cap: int | None = None
    norm: NormalizationParams = field(default_factory=NormalizationParams)

    def __post_init__(self):
        self._by_cid = {}
        for group in self.clusters.values():
            for c in group:
                if c.cid in self._by_cid:
                    raise ValueError(f"duplicate cid {c.cid}")
                self._by_cid[c.cid] = c

    def __len__(self) -> int:
        return len(self._by_cid)

    def __iter__(self) -> Iterator[Microcluster]:
        for f in sorted(self.clusters):
            yield from self.clusters[f]

    def __getitem__(self, cid: int) -> Microcluster:
        return self._by_cid[cid]

    def of_type(self, event_type: str) -> list[Microcluster]:
        return self.clusters.get(event_type, [])

    @property
    def event_types(self) -> list[str]:
        return sorted(self.clusters)


def diameter(members: Sequence[EventInstance], norm: NormalizationParams = NormalizationParams()) -> float:
    """Root-mean-square pairwise distance of a set of instances (0 for one)."""
    if not members:
        raise ValueError("diameter of an empty set")
    pts = points_array(members, len(members[0].location))
    return _diameter(norm.scale(pts))


def _diameter(pts: np.ndarray) -> float:
    # sum_ij |x_i - x_j|^2 == 2 m sum_i |x_i - mean|^2
    m = len(pts)
    if m < 2:
        return 0.0
    if m == 2:
        return math.dist(pts[0], pts[1])
    centered = pts - pts.mean(axis=0)
    return math.sqrt(2.0 * float(np.einsum("ij,ij->", centered, centered)) / (m - 1))


def _split_members(pts: np.ndarray, ids: Sequence[str], members: list[int]) -> tuple[list[int], list[int]]:
    if len(members) == 2:
        a, b = members
        return ([a], [b]) if ids[a] < ids[b] else ([b], [a])
    sub = pts[members]
    dist = cdist(sub, sub)
    far = dist.max()
    ii, jj = np.nonzero(np.triu(dist == far, k=1))
    if len(ii) == 0:
        # single distinct pair degenerate; cannot happen for len(members) >= 2
        ii, jj = np.array([0]), np.array([1])
    best = min(
        (tuple(sorted((ids[members[i]], ids[members[j]]))), i, j) for i, j in zip(ii, jj)
    )
    _, i, j = best
    if ids[members[j]] < ids[members[i]]:
        i, j = j, i
    first, second = [members[i]], [members[j]]
    for k, m in enumerate(members):
        if k in (i, j):
            continue
        (first if dist[k, i] <= dist[k, j] else second).append(m)
    return first, second


class _TypeBuilder:
    """Mutable clustering state for the instances of one event type."""

    def __init__(self, pts: np.ndarray, ids: Sequence[str], d: float, cap: int | None):
        self.pts = pts
        self.ids = ids
        self.d = d
        self.cap = cap
        self.groups: list[list[int]] = []
        self.sums = np.zeros((max(len(pts), 1), pts.shape[1]))
        self.reps = np.zeros_like(self.sums)

    def _set(self, pos: int, members: list[int]) -> None:
        if pos == len(self.groups):
            self.groups.append(members)
        else:
            self.groups[pos] = members
        self.sums[pos] = self.pts[members].sum(axis=0)
        self.reps[pos] = self.sums[pos] / len(members)

    def _too_wide(self, members: list[int]) -> bool:
        return len(members) > 1 and _diameter(self.pts[members]) > self.d

    def _split_until_narrow(self, members: list[int]) -> list[list[int]]:
        out, stack = [], [members]
        while stack:
            g = stack.pop()
            if self._too_wide(g):
                a, b = _split_members(self.pts, self.ids, g)
                stack.extend((b, a))
            else:
                out.append(g)
        return out

    def _replace(self, pos: int, parts: list[list[int]]) -> None:
        self._set(pos, parts[0])
        for p in parts[1:]:
            self._set(len(self.groups), p)

    def insert(self, i: int) -> None:
        p = self.pts[i]
        k = len(self.groups)
        if k == 0:
            self._set(0, [i])
            return
        diff = self.reps[:k] - p
        pos = int(np.argmin(np.einsum("ij,ij->i", diff, diff)))
        members = self.groups[pos] + [i]
        if self.cap is not None and len(members) > self.cap:
            a, b = _split_members(self.pts, self.ids, members)
            parts = self._split_until_narrow(a) + self._split_until_narrow(b)
        elif self._too_wide(members):
            parts = self._split_until_narrow(members)
        else:
            self.groups[pos] = members
            self.sums[pos] += p
            self.reps[pos] = self.sums[pos] / len(members)
            return
        self._replace(pos, parts)


def _build(dataset: EventDataset, d: float, cap: int | None, norm: NormalizationParams) -> MicroclusterIndex:
    if not d > 0:
        raise ValueError("diameter threshold must be positive")
    if cap is not None and cap < 1:
        raise ValueError("cap must be >= 1")
    S = dataset.spatial_dim
    by_type: dict[str, list[EventInstance]] = {}
    for e in dataset.instances:
        by_type.setdefault(e.event_type, []).append(e)

    clusters: dict[str, list[Microcluster]] = {}
    next_cid = 1
    for f in sorted(by_type):
        insts = sorted(by_type[f], key=lambda e: (e.time, e.id))
        raw = points_array(insts, S)
        ids = [e.id for e in insts]
        builder = _TypeBuilder(norm.scale(raw), ids, d, cap)
        for i in range(len(insts)):
            builder.insert(i)
        out = []
        for members in builder.groups:
            rep = raw[members].mean(axis=0)
            out.append(Microcluster(
                cid=next_cid,
                event_type=f,
                members=tuple(ids[m] for m in members),
                rep_location=tuple(float(v) for v in rep[:S]),
                rep_time=float(rep[S]),
            ))
            next_cid += 1
        clusters[f] = out
    return MicroclusterIndex(clusters, S, diameter_threshold=d, cap=cap, norm=norm)


def build_index(
    dataset: EventDataset, d: float, norm: NormalizationParams = NormalizationParams()
) -> MicroclusterIndex:
    """Diameter-limited microclustering. Every cluster ends with diameter <= d."""
    return _build(dataset, d, None, norm)


def build_index_capped(
    dataset: EventDataset, d: float, cap: int, norm: NormalizationParams = NormalizationParams()
) -> MicroclusterIndex:
    """Like :func:`build_index` but clusters also hold at most ``cap`` instances."""
    return _build(dataset, d, cap, norm)


def split(
    cluster: Microcluster, dataset: EventDataset, norm: NormalizationParams = NormalizationParams()
) -> tuple[Microcluster, Microcluster]:
    """Split a cluster around its farthest pair of members.

    The two children get cids ``cluster.cid`` and ``-cluster.cid``; callers
    building an index renumber them.
    """
    if cluster.count < 2:
        raise ValueError("cannot split singleton")
    insts = [dataset[m] for m in cluster.members]
    S = dataset.spatial_dim
    raw = points_array(insts, S)
    ids = [e.id for e in insts]
    a, b = _split_members(norm.scale(raw), ids, list(range(len(insts))))
    children = []
    for cid, members in ((cluster.cid, a), (-cluster.cid, b)):
        rep = raw[members].mean(axis=0)
        children.append(Microcluster(
            cid, cluster.event_type, tuple(ids[m] for m in members),
            tuple(float(v) for v in rep[:S]), float(rep[S]),
        ))
    return children[0], children[1]


def compression_ratio(dataset_size: int, index_size: int) -> float:
    if index_size <= 0:
        raise ValueError("index size must be positive")
    return dataset_size / index_size


def singleton_index(dataset: EventDataset) -> MicroclusterIndex:
    """One microcluster per instance (the limit of a vanishing threshold)."""
    clusters: dict[str, list[Microcluster]] = {}
    cid = 1
    for f in sorted(dataset.event_types):
        group = []
        for e in sorted(dataset.of_type(f), key=lambda e: (e.time, e.id)):
            group.append(Microcluster(cid, f, (e.id,), e.location, e.time))
            cid += 1
        clusters[f] = group
    return MicroclusterIndex(clusters, dataset.spatial_dim, diameter_threshold=0.0)


# -- CSV export/import --------------------------------------------------------

def _index_header(spatial_dim: int) -> list[str]:
    loc = ["rep_x"] if spatial_dim == 1 else ["rep_x", "rep_y"]
    return ["cid", "event_type", "count", *loc, "rep_t", "member_ids"]


def write_index(index: MicroclusterIndex, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(_index_header(index.spatial_dim))
        for c in index:
            w.writerow([
                c.cid, c.event_type, c.count,
                *(repr(v) for v in c.rep_location), repr(c.rep_time),
                ";".join(c.members),
            ])


def read_index(path) -> MicroclusterIndex:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header == _index_header(1):
            S = 1
        elif header == _index_header(2):
            S = 2
        else:
            raise ValueError(f"{path}: unrecognised index header {header}")
        clusters: dict[str, list[Microcluster]] = {}
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                cid, f, count = int(row[0]), row[1], int(row[2])
                loc = tuple(float(v) for v in row[3:3 + S])
                t = float(row[3 + S])
                members = tuple(row[4 + S].split(";")) if row[4 + S] else ()
            except (ValueError, IndexError) as exc:
                raise ValueError(f"{path}:{lineno}: malformed index row ({exc})") from None
            if count != len(members) or count < 1:
                raise ValueError(f"{path}:{lineno}: count {count} != {len(members)} members")
            clusters.setdefault(f, []).append(Microcluster(cid, f, members, loc, t))
    return MicroclusterIndex(clusters, S)


def iter_members(index: MicroclusterIndex, cids: Iterable[int]) -> Iterator[str]:
    for cid in cids:
        yield from index[cid].members
