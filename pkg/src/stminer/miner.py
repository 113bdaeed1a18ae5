"""Density ratios, sequence indexes and depth-first pattern discovery.

Both miners share one expansion routine that works on *units*: raw
instances (weight 1) for the baseline, microclusters (weight = member
count, location = representative) for the microcluster miner. A sequence
``s -> f`` is significant when the minimum density ratio along its
consecutive pairs is at least ``theta``; since that minimum can only drop
as a sequence grows, branches below ``theta`` are pruned without loss.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .core import (
    EmbeddingSpace,
    EventDataset,
    EventInstance,
    NeighborhoodParams,
    neighborhood_volume,
    space_volume,
)
from .join import JoinStats, group_pairs, instance_neighbors, join_pairs, microcluster_neighbors
from .microcluster import Microcluster, MicroclusterIndex


@dataclass(frozen=True)
class MinerConfig:
    params: NeighborhoodParams
    theta: float = 1.0
    max_len: int = 20

    def __post_init__(self):
        if not self.theta > 0:
            raise ValueError("theta must be positive")
        if self.max_len < 2:
            raise ValueError("max_len must be >= 2")


@dataclass(frozen=True)
class PatternResult:
    types: tuple[str, ...]
    index_value: float
    tail_size: int

    @property
    def length(self) -> int:
        return len(self.types)

    def __str__(self) -> str:
        return " -> ".join(self.types)


@dataclass
class MiningResult:
    patterns: list[PatternResult] = field(default_factory=list)
    expansions: int = 0
    join_seconds: float = 0.0
    elapsed_seconds: float = 0.0
    join_stats: JoinStats = field(default_factory=JoinStats)

    def __iter__(self) -> Iterator[PatternResult]:
        return iter(self.patterns)

    def __len__(self) -> int:
        return len(self.patterns)

    def as_dict(self) -> dict[tuple[str, ...], float]:
        return {p.types: p.index_value for p in self.patterns}


# -- densities and ratios -----------------------------------------------------

def density(f: str, volume: float, count_in_space: int) -> float:
    if volume <= 0:
        raise ValueError("zero-volume space")
    return count_in_space / volume


def modified_density(f: str, volume: float, clusters_inside: Iterable[Microcluster]) -> float:
    if volume <= 0:
        raise ValueError("zero-volume space")
    return sum(c.count for c in clusters_inside) / volume


def _weighted_ratio(num: int, anchor_weight: int, total: int, vol_n: float, vol_v: float) -> float:
    # num = sum_a w_a * (weight of a's neighbors); anchor_weight = sum_a w_a;
    # total = weight of the follower type inside V.
    if anchor_weight <= 0:
        raise ValueError("empty tail")
    if total == 0:
        return 0.0
    return (num / (anchor_weight * vol_n)) / (total / vol_v)


def density_ratio(
    f1: str,
    f2: str,
    anchors: Sequence[EventInstance],
    dataset: EventDataset,
    params: NeighborhoodParams,
) -> float:
    """Mean neighborhood density of ``f2`` around ``anchors`` over its global density."""
    anchors = list(anchors)
    if not anchors:
        raise ValueError("empty tail")
    if any(a.event_type != f1 for a in anchors):
        raise ValueError(f"anchors must all be of type {f1!r}")
    nbrs = instance_neighbors(anchors, f2, params, dataset)
    num = sum(len(nbrs[a.id]) for a in anchors)
    return _weighted_ratio(
        num, len(anchors), dataset.count_inside(f2),
        neighborhood_volume(params, dataset.spatial_dim), space_volume(dataset.space),
    )


def modified_density_ratio(
    f1: str,
    f2: str,
    anchor_clusters: Sequence[Microcluster],
    index: MicroclusterIndex,
    params: NeighborhoodParams,
    space: EmbeddingSpace,
) -> float:
    """Count-weighted version of :func:`density_ratio` over microclusters."""
    anchor_clusters = list(anchor_clusters)
    if not anchor_clusters:
        raise ValueError("empty tail")
    if any(c.event_type != f1 for c in anchor_clusters):
        raise ValueError(f"anchor clusters must all be of type {f1!r}")
    nbrs = microcluster_neighbors(anchor_clusters, f2, params, index)
    num = sum(c.count * sum(index[n].count for n in nbrs[c.cid]) for c in anchor_clusters)
    inside = sum(c.count for c in index.of_type(f2) if space.contains(c.rep_location, c.rep_time))
    return _weighted_ratio(
        num, sum(c.count for c in anchor_clusters), inside,
        neighborhood_volume(params, index.spatial_dim), space_volume(space),
    )


def sequence_index(prefix_index: float | None, last_ratio: float) -> float:
    """Index of ``s -> f`` from the index of ``s`` (None for length 1)."""
    if prefix_index is None:
        return last_ratio
    return min(prefix_index, last_ratio)


# -- expansion ----------------------------------------------------------------

@dataclass
class _Units:
    """Per-type arrays of mining units, ordered as the caller supplied them."""

    labels: list
    locs: np.ndarray
    times: np.ndarray
    weights: list[int]
    inside_weight: int


class _Search:
    def __init__(self, units: dict[str, _Units], types: Sequence[str], vol_n: float,
                 vol_v: float, config: MinerConfig):
        self.units = units
        self.types = sorted(types)
        self.vol_n = vol_n
        self.vol_v = vol_v
        self.config = config
        self.result = MiningResult()
        self._joins: dict[tuple[str, str], list[list[int]]] = {}

    def neighbors(self, f1: str, f2: str) -> list[list[int]]:
        key = (f1, f2)
        if key not in self._joins:
            self._join_all(f1)
        return self._joins[key]

    def _join_all(self, f1: str) -> None:
        # one join of f1 against every type's units, split per target type
        t0 = time.perf_counter()
        a = self.units[f1]
        present = [f for f in self.types if f in self.units]
        sizes = [len(self.units[f].labels) for f in present]
        offsets = np.concatenate([[0], np.cumsum(sizes)])
        owner, cand = join_pairs(
            a.locs, a.times,
            np.concatenate([self.units[f].locs for f in present]),
            np.concatenate([self.units[f].times for f in present]),
            self.config.params, self.result.join_stats,
        )
        n_a = len(a.labels)
        for k, f2 in enumerate(present):
            lo, hi = offsets[k], offsets[k + 1]
            mask = (cand >= lo) & (cand < hi)
            self._joins[(f1, f2)] = group_pairs(owner[mask], cand[mask] - lo, n_a)
        self.result.join_seconds += time.perf_counter() - t0

    def run(self) -> MiningResult:
        t0 = time.perf_counter()
        for f in self.types:
            u = self.units.get(f)
            if u is None or not u.labels:
                continue
            self.expand((f,), list(range(len(u.labels))), None)
        self.result.elapsed_seconds = time.perf_counter() - t0
        return self.result

    def expand(self, seq: tuple[str, ...], tail: list[int], prefix_index: float | None) -> None:
        self.result.expansions += 1
        last = seq[-1]
        w_last = self.units[last].weights
        anchor_weight = sum(w_last[a] for a in tail)
        for f in self.types:
            target = self.units.get(f)
            if target is None or not target.labels:
                continue
            nbrs = self.neighbors(last, f)
            w_f = target.weights
            num = 0
            for a in tail:
                if nbrs[a]:
                    num += w_last[a] * sum(w_f[n] for n in nbrs[a])
            ratio = _weighted_ratio(num, anchor_weight, target.inside_weight, self.vol_n, self.vol_v)
            idx = sequence_index(prefix_index, ratio)
            if idx < self.config.theta:
                continue
            new_tail = sorted({n for a in tail for n in nbrs[a]})
            new_seq = seq + (f,)
            self.result.patterns.append(PatternResult(new_seq, idx, len(new_tail)))
            if len(new_seq) < self.config.max_len and new_tail:
                self.expand(new_seq, new_tail, idx)


def _instance_units(dataset: EventDataset) -> dict[str, _Units]:
    S = dataset.spatial_dim
    out = {}
    for f in dataset.event_types:
        insts = sorted(dataset.of_type(f), key=lambda e: (e.time, e.id))
        out[f] = _Units(
            labels=[e.id for e in insts],
            locs=np.array([e.location for e in insts], dtype=float).reshape(len(insts), S),
            times=np.array([e.time for e in insts], dtype=float),
            weights=[1] * len(insts),
            inside_weight=sum(1 for e in insts if dataset.space.contains(e.location, e.time)),
        )
    return out


def _cluster_units(index: MicroclusterIndex, space: EmbeddingSpace) -> dict[str, _Units]:
    S = index.spatial_dim
    out = {}
    for f in index.event_types:
        cs = index.of_type(f)
        out[f] = _Units(
            labels=[c.cid for c in cs],
            locs=np.array([c.rep_location for c in cs], dtype=float).reshape(len(cs), S),
            times=np.array([c.rep_time for c in cs], dtype=float),
            weights=[c.count for c in cs],
            inside_weight=sum(c.count for c in cs if space.contains(c.rep_location, c.rep_time)),
        )
    return out


def mine_baseline(dataset: EventDataset, config: MinerConfig) -> MiningResult:
    """Depth-first discovery over raw instances."""
    if len(dataset) == 0:
        return MiningResult()
    search = _Search(
        _instance_units(dataset), dataset.event_types,
        neighborhood_volume(config.params, dataset.spatial_dim),
        space_volume(dataset.space), config,
    )
    return search.run()


def mine_micro(dataset: EventDataset, index: MicroclusterIndex, config: MinerConfig) -> MiningResult:
    """Depth-first discovery over the microclusters of ``index``."""
    if len(dataset) == 0 or len(index) == 0:
        return MiningResult()
    search = _Search(
        _cluster_units(index, dataset.space), dataset.event_types,
        neighborhood_volume(config.params, index.spatial_dim),
        space_volume(dataset.space), config,
    )
    return search.run()


def write_patterns(result: Iterable[PatternResult], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["pattern", "length", "seq_index", "tail_size"])
        for p in result:
            w.writerow([";".join(p.types), p.length, repr(p.index_value), p.tail_size])


def read_patterns(path) -> list[PatternResult]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    return [
        PatternResult(tuple(r["pattern"].split(";")), float(r["seq_index"]), int(r["tail_size"]))
        for r in rows
    ]
