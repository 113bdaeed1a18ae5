"""Parameter sweeps over generated data: index size, compression, timings."""

from __future__ import annotations

import csv
import dataclasses
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from statistics import fmean
from typing import Sequence

from .core import EventDataset, NeighborhoodParams, NormalizationParams
from .datagen import GeneratorParams, generate
from .microcluster import build_index, build_index_capped, compression_ratio
from .miner import MinerConfig, mine_micro

SWEEP_VARS = ("ni", "pn", "ps", "k")


@dataclass(frozen=True)
class BenchmarkConfig:
    sweep: str = "ni"
    values: tuple[float, ...] = (100,)
    diameters: tuple[float, ...] = (40.0, 60.0, 80.0, 100.0)
    seeds: tuple[int, ...] = (0, 1, 2, 3, 4)
    base: GeneratorParams = field(default_factory=GeneratorParams)
    mine: bool = False
    theta: float = 1.0
    max_len: int = 20
    jobs: int = 1
    # the cap sweep runs on a fixed (e.g. real) dataset instead of generated ones
    dataset: EventDataset | None = None
    norm: NormalizationParams = field(default_factory=NormalizationParams)

    def __post_init__(self):
        if self.sweep not in SWEEP_VARS:
            raise ValueError(f"sweep must be one of {SWEEP_VARS}")
        if self.sweep == "k" and self.dataset is None:
            raise ValueError("the cap sweep needs an input dataset")
        if not self.values or not self.diameters or not self.seeds:
            raise ValueError("values, diameters and seeds must be non-empty")


@dataclass(frozen=True)
class RunRecord:
    """One (sweep value, diameter, seed) measurement."""

    value: float
    diameter: float
    seed: int
    dataset_size: int
    index_size: int
    microclustering_ms: float
    mining_ms: float
    patterns: int


@dataclass(frozen=True)
class BenchmarkRow:
    sweep_var: str
    value: float
    diameter: float
    dataset_size: float
    index_size: float
    compression_ratio: float
    microclustering_ms: float
    mining_ms: float
    patterns: float


def _run_point(config: BenchmarkConfig, value, seed: int) -> list[RunRecord]:
    if config.sweep == "k":
        dataset = config.dataset
        radius, interval = config.base.radius, config.base.interval
    else:
        params = dataclasses.replace(config.base, **{config.sweep: int(value)}, seed=seed)
        dataset = generate(params).dataset
        radius, interval = params.radius, params.interval
    miner_cfg = MinerConfig(NeighborhoodParams(radius, interval), config.theta, config.max_len)
    out = []
    for d in config.diameters:
        t0 = time.perf_counter()
        if config.sweep == "k":
            index = build_index_capped(dataset, d, int(value), config.norm)
        else:
            index = build_index(dataset, d, config.norm)
        mc_ms = (time.perf_counter() - t0) * 1e3
        mine_ms, n_patterns = 0.0, 0
        if config.mine:
            t0 = time.perf_counter()
            n_patterns = len(mine_micro(dataset, index, miner_cfg))
            mine_ms = (time.perf_counter() - t0) * 1e3
        out.append(RunRecord(value, d, seed, len(dataset), len(index), mc_ms, mine_ms, n_patterns))
    return out


def run_benchmark(config: BenchmarkConfig) -> tuple[list[BenchmarkRow], list[RunRecord]]:
    """Sweep the configured variable; returns seed-averaged rows and raw records."""
    seeds = config.seeds[:1] if config.sweep == "k" else config.seeds
    tasks = [(v, s) for v in config.values for s in seeds]
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            futures = [pool.submit(_run_point, config, v, s) for v, s in tasks]
            results = [f.result() for f in futures]
    else:
        results = [_run_point(config, v, s) for v, s in tasks]
    records = sorted((r for rs in results for r in rs), key=lambda r: (r.value, r.diameter, r.seed))

    rows = []
    for v in config.values:
        for d in config.diameters:
            group = [r for r in records if r.value == v and r.diameter == d]
            ds = fmean(r.dataset_size for r in group)
            size = fmean(r.index_size for r in group)
            rows.append(BenchmarkRow(
                config.sweep, v, d, ds, size, compression_ratio(ds, size),
                fmean(r.microclustering_ms for r in group),
                fmean(r.mining_ms for r in group),
                fmean(r.patterns for r in group),
            ))
    return rows, records


BENCHMARK_HEADER = [
    "sweep_var", "value", "diameter", "dataset_size", "index_size",
    "compression_ratio", "microclustering_ms", "mining_ms", "patterns",
]
TIMING_HEADER = [
    "value", "diameter", "seed", "dataset_size", "index_size",
    "microclustering_ms", "mining_ms", "patterns",
]


def _fmt(x) -> str:
    if isinstance(x, float) and x.is_integer():
        return str(int(x))
    if isinstance(x, float):
        return f"{x:.6g}"
    return str(x)


def write_benchmark(rows: Sequence[BenchmarkRow], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(BENCHMARK_HEADER)
        for r in rows:
            w.writerow([_fmt(getattr(r, k)) for k in BENCHMARK_HEADER])


def write_timing(records: Sequence[RunRecord], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TIMING_HEADER)
        for r in records:
            w.writerow([_fmt(getattr(r, k)) for k in TIMING_HEADER])
