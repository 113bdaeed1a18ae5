"""Forward spatio-temporal neighborhoods via a temporal plane sweep.

A target ``p`` is a neighbor of anchor ``e`` when it lies within the
spatial radius and strictly after ``e`` by at most the temporal interval:
``|e.loc - p.loc| <= R`` and ``0 < p.time - e.time <= T``.

Targets live in a uniform grid with cell edge ``R``, time-ordered within each
cell, so an anchor only inspects the active time window of the 3**S cells
around it instead of the whole target set.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import EventDataset, EventInstance, NeighborhoodParams
from .microcluster import Microcluster, MicroclusterIndex


@dataclass
class JoinStats:
    anchors: int = 0
    examined: int = 0
    pairs: int = 0


def join_pairs(
    anchor_locs: np.ndarray,
    anchor_times: np.ndarray,
    target_locs: np.ndarray,
    target_times: np.ndarray,
    params: NeighborhoodParams,
    stats: JoinStats | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """All neighbor pairs as (anchor row, target row) arrays, sorted.

    Targets are bucketed by grid cell and sorted by time inside each cell.
    Every anchor then binary-searches the window ``(t, t + T]`` in each of
    the 3**S cells around it, and the few candidates found are checked
    exactly. All anchors are processed at once with numpy.
    """
    n_a, n_t = len(anchor_times), len(target_times)
    empty = np.empty(0, dtype=np.int64)
    if n_a == 0 or n_t == 0:
        return empty, empty
    R, T = float(params.radius), float(params.interval)
    a_locs = np.asarray(anchor_locs, dtype=float).reshape(n_a, -1)
    S = a_locs.shape[1]
    b_locs = np.asarray(target_locs, dtype=float).reshape(n_t, S)
    a_t = np.asarray(anchor_times, dtype=float)
    b_t = np.asarray(target_times, dtype=float)

    a_cells = np.floor(a_locs / R).astype(np.int64)
    b_cells = np.floor(b_locs / R).astype(np.int64)
    lo_cell = np.minimum(a_cells.min(0), b_cells.min(0)) - 1
    width = np.maximum(a_cells.max(0), b_cells.max(0)) - lo_cell + 2
    strides = np.cumprod(np.concatenate([[1], width[:-1]]))

    t0 = min(a_t.min(), b_t.min())
    # cells occupy disjoint stretches of the composite (cell, time) axis
    span = max(a_t.max() + T, b_t.max()) - t0 + 2.0
    if float(np.prod(width.astype(float))) * span > 2.0 ** 48:
        hits = brute_force_join(a_locs, a_t, b_locs, b_t, params)
        owner = np.repeat(np.arange(n_a), [len(h) for h in hits])
        return owner, np.array([k for h in hits for k in h], dtype=np.int64)

    def composite(cells, times):
        return ((cells - lo_cell) @ strides).astype(float) * span + (times - t0)

    b_key = composite(b_cells, b_t)
    order = np.argsort(b_key, kind="stable")
    b_sorted = b_key[order]

    anchors_parts, cand_parts = [], []
    for off in itertools.product((-1, 0, 1), repeat=S):
        q = composite(a_cells + np.asarray(off), a_t)
        q_hi = q + T
        # widened by a few ulps; the exact predicate below trims the excess
        lo = np.searchsorted(b_sorted, q - 4 * np.spacing(q_hi), side="left")
        hi = np.searchsorted(b_sorted, q_hi + 4 * np.spacing(q_hi), side="right")
        counts = hi - lo
        total = int(counts.sum())
        if total == 0:
            continue
        owner = np.repeat(np.arange(n_a), counts)
        pos = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts) + np.repeat(lo, counts)
        anchors_parts.append(owner)
        cand_parts.append(order[pos])

    if not cand_parts:
        if stats is not None:
            stats.anchors += n_a
        return empty, empty
    owner = np.concatenate(anchors_parts)
    cand = np.concatenate(cand_parts)
    dt = b_t[cand] - a_t[owner]
    d2 = np.zeros(len(cand))
    for col in range(S):
        diff = b_locs[cand, col] - a_locs[owner, col]
        d2 = d2 + diff * diff
    keep = (dt > 0) & (dt <= T) & (d2 <= R * R)
    if stats is not None:
        stats.anchors += n_a
        stats.examined += len(cand)
        stats.pairs += int(keep.sum())
    owner, cand = owner[keep], cand[keep]
    srt = np.lexsort((cand, owner))
    return owner[srt], cand[srt]


def group_pairs(owner: np.ndarray, cand: np.ndarray, n_anchors: int) -> list[list[int]]:
    """Turn sorted pair arrays into one list of targets per anchor."""
    if n_anchors == 0:
        return []
    bounds = np.searchsorted(owner, np.arange(1, n_anchors))
    return [part.tolist() for part in np.split(cand, bounds)]


def sweep_join(
    anchor_locs: np.ndarray,
    anchor_times: np.ndarray,
    target_locs: np.ndarray,
    target_times: np.ndarray,
    params: NeighborhoodParams,
    stats: JoinStats | None = None,
) -> list[list[int]]:
    """Neighbor target indices (ascending) for every anchor row."""
    owner, cand = join_pairs(anchor_locs, anchor_times, target_locs, target_times, params, stats)
    return group_pairs(owner, cand, len(anchor_times))


def brute_force_join(
    anchor_locs: np.ndarray,
    anchor_times: np.ndarray,
    target_locs: np.ndarray,
    target_times: np.ndarray,
    params: NeighborhoodParams,
) -> list[list[int]]:
    """O(N*M) reference for :func:`sweep_join`."""
    n_a = len(anchor_times)
    if n_a == 0 or len(target_times) == 0:
        return [[] for _ in range(n_a)]
    a_locs = np.asarray(anchor_locs, dtype=float).reshape(n_a, -1)
    b_locs = np.asarray(target_locs, dtype=float).reshape(len(target_times), -1)
    out = []
    for loc, ta in zip(a_locs, np.asarray(anchor_times, dtype=float)):
        dt = np.asarray(target_times, dtype=float) - ta
        diff = b_locs - loc
        d2 = np.zeros(len(b_locs))
        for col in range(diff.shape[1]):
            d2 = d2 + diff[:, col] * diff[:, col]
        hit = (d2 <= params.radius * params.radius) & (dt > 0) & (dt <= params.interval)
        out.append(np.nonzero(hit)[0].tolist())
    return out


def _arrays(items: Sequence, spatial_dim: int, loc_attr: str, time_attr: str):
    locs = np.array([getattr(x, loc_attr) for x in items], dtype=float).reshape(len(items), spatial_dim)
    times = np.array([getattr(x, time_attr) for x in items], dtype=float)
    return locs, times


def instance_neighbors(
    anchors: Iterable[EventInstance],
    target_type: str,
    params: NeighborhoodParams,
    dataset: EventDataset,
    stats: JoinStats | None = None,
) -> dict[str, set[str]]:
    anchors = list(anchors)
    targets = dataset.of_type(target_type)
    S = dataset.spatial_dim
    hits = sweep_join(
        *_arrays(anchors, S, "location", "time"),
        *_arrays(targets, S, "location", "time"),
        params, stats,
    )
    return {a.id: {targets[k].id for k in h} for a, h in zip(anchors, hits)}


def microcluster_neighbors(
    anchors: Iterable[Microcluster],
    target_type: str,
    params: NeighborhoodParams,
    index: MicroclusterIndex,
    stats: JoinStats | None = None,
) -> dict[int, set[int]]:
    anchors = list(anchors)
    targets = index.of_type(target_type)
    S = index.spatial_dim
    hits = sweep_join(
        *_arrays(anchors, S, "rep_location", "rep_time"),
        *_arrays(targets, S, "rep_location", "rep_time"),
        params, stats,
    )
    return {a.cid: {targets[k].cid for k in h} for a, h in zip(anchors, hits)}


def covered_instances(anchor: Microcluster, neighbor_cids: Iterable[int], index: MicroclusterIndex) -> set[str]:
    """Instances held by the microclusters neighboring ``anchor``."""
    out: set[str] = set()
    for cid in neighbor_cids:
        out.update(index[cid].members)
    return out
