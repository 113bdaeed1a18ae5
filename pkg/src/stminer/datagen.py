"""Synthetic event datasets with planted following-chains.

For every planted pattern, ``ni`` instances of its first type are spread
uniformly over the DSize x DSize x TSize box; each instance of a later type
is dropped into the cylindrical neighborhood (radius R, forward window T)
of a randomly chosen instance of the preceding type. The same number of
uniformly placed noise instances is then added, so a dataset holds
``ni * ps * pn * 2`` instances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .core import EmbeddingSpace, EventDataset, EventInstance


@dataclass(frozen=True)
class GeneratorParams:
    ps: int = 5
    pn: int = 10
    dsize: float = 1000.0
    tsize: float = 1200.0
    nf: int = 20
    ni: int = 100
    radius: float = 10.0
    interval: float = 10.0
    seed: int = 0

    def __post_init__(self):
        for name in ("ps", "nf", "ni"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.pn < 0:
            raise ValueError("pn must be >= 0")
        if not (self.dsize > 0 and self.tsize > 0 and self.radius > 0 and self.interval > 0):
            raise ValueError("sizes, radius and interval must be positive")
        if self.ps > self.nf:
            raise ValueError("ps cannot exceed nf (types in a pattern are distinct)")

    @property
    def total_instances(self) -> int:
        return self.ni * self.ps * self.pn * 2


@dataclass
class GeneratedDataset:
    dataset: EventDataset
    planted: list[tuple[str, ...]]
    # child instance id -> id of the instance it was placed around
    parents: dict[str, str] = field(default_factory=dict)


def type_names(nf: int) -> list[str]:
    width = len(str(nf - 1))
    return [f"E{i:0{width}d}" for i in range(nf)]


def generate(params: GeneratorParams) -> GeneratedDataset:
    rng = np.random.default_rng(params.seed)
    names = type_names(params.nf)
    R, T = params.radius, params.interval
    instances: list[EventInstance] = []
    parents: dict[str, str] = {}
    planted: list[tuple[str, ...]] = []

    def add(f: str, x: float, y: float, t: float) -> str:
        iid = f"i{len(instances)}"
        instances.append(EventInstance(iid, f, (x, y), t))
        return iid

    for p in range(params.pn):
        chain = tuple(names[k] for k in rng.choice(params.nf, size=params.ps, replace=False))
        planted.append(chain)
        xy = rng.uniform(0.0, params.dsize, size=(params.ni, 2))
        ts = rng.uniform(0.0, params.tsize, size=params.ni)
        prev = [add(chain[0], x, y, t) for (x, y), t in zip(xy, ts)]
        prev_pts = np.column_stack([xy, ts])
        for f in chain[1:]:
            picks = rng.integers(0, params.ni, size=params.ni)
            r = R * np.sqrt(rng.uniform(0.0, 1.0, size=params.ni))
            phi = rng.uniform(0.0, 2.0 * math.pi, size=params.ni)
            # 1 - U[0, 1) lies in (0, 1]
            dt = T * (1.0 - rng.uniform(0.0, 1.0, size=params.ni))
            base = prev_pts[picks]
            pts = np.column_stack([
                base[:, 0] + r * np.cos(phi),
                base[:, 1] + r * np.sin(phi),
                base[:, 2] + dt,
            ])
            cur = []
            for k, (x, y, t) in enumerate(pts):
                iid = add(f, x, y, t)
                parents[iid] = prev[picks[k]]
                cur.append(iid)
            prev, prev_pts = cur, pts

    n_noise = params.ni * params.ps * params.pn
    noise_types = rng.integers(0, params.nf, size=n_noise)
    xy = rng.uniform(0.0, params.dsize, size=(n_noise, 2))
    ts = rng.uniform(0.0, params.tsize, size=n_noise)
    for k in range(n_noise):
        add(names[noise_types[k]], xy[k, 0], xy[k, 1], ts[k])

    space = EmbeddingSpace(((0.0, params.dsize), (0.0, params.dsize)), (0.0, params.tsize))
    dataset = EventDataset(frozenset(names), instances, space)
    return GeneratedDataset(dataset, planted, parents)


def contiguous_subchains(chain: Sequence[str], min_len: int = 2) -> set[tuple[str, ...]]:
    chain = tuple(chain)
    return {
        chain[i:j]
        for i in range(len(chain))
        for j in range(i + min_len, len(chain) + 1)
    }


@dataclass(frozen=True)
class RecoveryReport:
    maximal: float
    subsequences: float
    missing: tuple[tuple[str, ...], ...]


def verify_planted(found: Iterable[Sequence[str]], planted: Sequence[Sequence[str]]) -> RecoveryReport:
    """Share of planted chains (and of their contiguous sub-chains) among ``found``."""
    found = {tuple(p) for p in found}
    planted = [tuple(p) for p in planted]
    if not planted:
        return RecoveryReport(1.0, 1.0, ())
    missing = tuple(p for p in planted if p not in found)
    subs = set().union(*(contiguous_subchains(p) for p in planted))
    sub_hit = sum(1 for s in subs if s in found) / len(subs) if subs else 1.0
    return RecoveryReport(1.0 - len(missing) / len(planted), sub_hit, missing)


def write_planted(planted: Iterable[Sequence[str]], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for chain in planted:
            fh.write(";".join(chain) + "\n")


def read_planted(path) -> list[tuple[str, ...]]:
    with open(path, encoding="utf-8") as fh:
        return [tuple(line.strip().split(";")) for line in fh if line.strip()]
