"""End-to-end acceptance criteria, one test each.

Every test appends a ``PASS``/``FAIL`` line to the shared report, printed at
the end of the pytest run, and then asserts.
"""

import math
import time

import numpy as np
import pytest

from oracles import (
    all_sequence_indexes,
    cluster_units,
    clustered_dataset,
    instance_units,
    min_same_type_distance,
    neighbors_bruteforce,
    random_dataset,
)
from stminer.benchmark import BenchmarkConfig, run_benchmark
from stminer.core import (
    EventDataset,
    EventInstance,
    NeighborhoodParams,
    NormalizationParams,
    neighborhood_volume,
    space_volume,
)
from stminer.datagen import GeneratorParams, contiguous_subchains, generate, verify_planted
from stminer.join import sweep_join
from stminer.microcluster import build_index, build_index_capped
from stminer.miner import MinerConfig, mine_baseline, mine_micro

P10 = NeighborhoodParams(10, 10)
SEEDS = (0, 1, 2, 3, 4)
DIAMETERS = (40.0, 60.0, 80.0, 100.0)


def record(report, n, ok, detail):
    report.append(f"{'PASS' if ok else 'FAIL'} criterion {n:>2}: {detail}")
    return ok


def test_01_worked_example(chains, acceptance_report):
    expected = set()
    for chain in [("A", "B", "C", "D"), ("B", "C", "D"), ("C", "D")]:
        expected |= contiguous_subchains(chain)
    t0 = time.perf_counter()
    base = {p.types for p in mine_baseline(chains, MinerConfig(P10, 1.0))}
    micro = {p.types for p in mine_micro(chains, build_index(chains, 5.0), MinerConfig(P10, 1.0))}
    elapsed = time.perf_counter() - t0
    ok = base == expected and micro == expected and elapsed < 1.0
    assert record(acceptance_report, 1, ok,
                  f"baseline {len(base)} / micro {len(micro)} patterns, closure of 3 chains has "
                  f"{len(expected)}; {elapsed:.3f}s (<1s)")


def test_02_join_oracle(acceptance_report):
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    mismatches = 0
    sizes = []
    for k in range(200):
        S = 1 + k % 2
        n = int(rng.integers(1, 2001)) if k % 10 == 0 else int(rng.integers(1, 400))
        sizes.append(n)
        integer = k % 3 == 0
        extent = float(rng.choice([30, 100, 300]))
        ds = random_dataset(rng, n, n_types=1, spatial_dim=S, extent=extent, tsize=extent, integer=integer)
        R, T = float(rng.uniform(1, 20)), float(rng.uniform(1, 20))
        if integer:
            R, T = float(round(R)), float(round(T))
        locs = np.array([e.location for e in ds.instances]).reshape(n, S)
        times = np.array([e.time for e in ds.instances])
        got = sweep_join(locs, times, locs, times, NeighborhoodParams(R, T))
        pts = [(e.location, e.time) for e in ds.instances]
        if got != neighbors_bruteforce(pts, pts, R, T):
            mismatches += 1
    elapsed = time.perf_counter() - t0
    ok = mismatches == 0 and elapsed < 60
    assert record(acceptance_report, 2, ok,
                  f"200 datasets (max {max(sizes)} instances), {mismatches} mismatches; {elapsed:.1f}s (<60s)")


def test_03_singleton_limit(acceptance_report):
    rng = np.random.default_rng(3)
    worst, differing, not_singleton = 0.0, 0, 0
    for k in range(50):
        if k % 2:
            ds = clustered_dataset(rng, int(rng.integers(3, 40)), n_types=int(rng.integers(2, 6)),
                                   spatial_dim=1 + k % 4 // 2)
        else:
            ds = random_dataset(rng, int(rng.integers(20, 501)), n_types=int(rng.integers(2, 6)),
                                spatial_dim=1 + k % 4 // 2)
        d = min_same_type_distance(ds) / 2
        index = build_index(ds, d)
        not_singleton += len(index) != len(ds)
        config = MinerConfig(P10, float(rng.choice([0.5, 1.0, 2.0])), max_len=6)
        a = mine_baseline(ds, config).as_dict()
        b = mine_micro(ds, index, config).as_dict()
        if a.keys() != b.keys():
            differing += 1
            continue
        for key in a:
            rel = abs(a[key] - b[key]) / max(abs(a[key]), 1e-300)
            worst = max(worst, rel)
    ok = differing == 0 and not_singleton == 0 and worst <= 1e-9
    assert record(acceptance_report, 3, ok,
                  f"50 datasets, {differing} differing pattern sets, max rel diff {worst:.1e} (<=1e-9)")


def test_04_pruning_soundness(acceptance_report):
    rng = np.random.default_rng(4)
    failures, checked = 0, 0
    for k in range(12):
        n_types = int(rng.integers(2, 7))
        if k % 2:
            ds = clustered_dataset(rng, int(rng.integers(5, 30)), n_types=n_types, extent=80, tsize=80)
        else:
            ds = random_dataset(rng, int(rng.integers(50, 301)), n_types=n_types, extent=60, tsize=60)
        assert len(ds) <= 300 and len(ds.event_types) <= 6
        index = build_index(ds, float(rng.choice([4.0, 10.0])))
        vol_n, vol_v = neighborhood_volume(P10, ds.spatial_dim), space_volume(ds.space)
        for units, mine in [
            (instance_units(ds), lambda cfg: mine_baseline(ds, cfg)),
            (cluster_units(index, ds.space), lambda cfg: mine_micro(ds, index, cfg)),
        ]:
            every = all_sequence_indexes(units, ds.event_types, vol_n, vol_v, 10, 10, 4)
            for theta in (0.5, 1.0, 2.0):
                want = {s: v for s, v in every.items() if v >= theta}
                got = mine(MinerConfig(P10, theta, max_len=4)).as_dict()
                checked += 1
                if got.keys() != want.keys() or any(
                        not math.isclose(got[s], want[s], rel_tol=1e-12) for s in want):
                    failures += 1
    assert record(acceptance_report, 4, failures == 0,
                  f"{checked} (dataset, miner, theta) runs vs exhaustive length<=4, {failures} differ")


@pytest.fixture(scope="module")
def ni_sweep():
    t0 = time.perf_counter()
    rows, records = run_benchmark(BenchmarkConfig(
        sweep="ni", values=(100, 160), diameters=DIAMETERS, seeds=SEEDS, base=GeneratorParams()))
    return rows, records, time.perf_counter() - t0


@pytest.fixture(scope="module")
def ps_sweep():
    rows, records = run_benchmark(BenchmarkConfig(
        sweep="ps", values=(2, 4, 6, 8, 10), diameters=(100.0,), seeds=SEEDS, base=GeneratorParams()))
    return rows, records


def test_05_compression_ratios(ni_sweep, acceptance_report):
    rows, _, elapsed = ni_sweep
    ratio = {(r.value, r.diameter): r.compression_ratio for r in rows}
    targets = [((100, 40.0), 1.38, 0.15), ((100, 100.0), 2.25, 0.25), ((160, 100.0), 2.76, 0.30)]
    ok = elapsed <= 300
    parts = []
    for key, want, tol in targets:
        hit = abs(ratio[key] - want) <= tol
        ok &= hit
        parts.append(f"Ni={key[0]} d={key[1]:g}: {ratio[key]:.3f} ({want}±{tol})")
    assert record(acceptance_report, 5, ok, "; ".join(parts) + f"; {elapsed:.0f}s (<=300s)")


def test_06_monotone_trends(ni_sweep, ps_sweep, acceptance_report):
    _, records, _ = ni_sweep
    violations = 0
    for v in (100, 160):
        for s in SEEDS:
            sizes = [r.index_size for r in sorted(records, key=lambda r: r.diameter)
                     if r.value == v and r.seed == s]
            violations += any(b > a for a, b in zip(sizes, sizes[1:]))
    rows, _ = ps_sweep
    ratios = [r.compression_ratio for r in rows]
    increasing = all(b > a for a, b in zip(ratios, ratios[1:]))
    lo_ok = abs(ratios[0] / 1.52091 - 1) <= 0.2
    hi_ok = abs(ratios[-1] / 3.33167 - 1) <= 0.2
    ok = violations == 0 and increasing and lo_ok and hi_ok
    assert record(acceptance_report, 6, ok,
                  f"{violations} non-monotone datasets over d; ratio by Ps 2..10 at d=100: "
                  + ", ".join(f"{x:.3f}" for x in ratios) + " (ends 1.52/3.33 ±20%)")


def test_07_planted_recovery(acceptance_report):
    rates = []
    for s in SEEDS:
        gen = generate(GeneratorParams(seed=s))
        index = build_index(gen.dataset, 40.0)
        found = [p.types for p in mine_micro(gen.dataset, index, MinerConfig(P10, 1.0))]
        rates.append(verify_planted(found, gen.planted).maximal)
    mean = sum(rates) / len(rates)
    assert record(acceptance_report, 7, mean >= 0.9,
                  f"mean recovery {mean:.3f} over {len(SEEDS)} seeds (>=0.9)")


def grid_dataset(rng, n=6000):
    # coarse 0.5-degree grid, daily timestamps, heavy coordinate coincidence
    insts = []
    for i in range(n):
        f = ("High-tg", "Low-tg", "High-rr")[int(rng.integers(3))]
        x, y = rng.integers(0, 12, size=2) * 0.5
        t = float(rng.integers(0, 120))
        insts.append(EventInstance(f"g{i}", f, (float(x), float(y)), t))
    return EventDataset.from_instances(insts)


def test_08_capped_index(acceptance_report):
    ds = grid_dataset(np.random.default_rng(8))
    norm = NormalizationParams(2.5, 30)
    d = NormalizationParams.NORMALIZED_THRESHOLD
    bad, sizes, biggest = 0, {}, {}
    for K in (20, 100):
        index = build_index_capped(ds, d, K, norm)
        sizes[K] = len(index)
        biggest[K] = max(c.count for c in index)
        for c in index:
            pts = norm.scale(np.array([(*ds[m].location, ds[m].time) for m in c.members]))
            m = len(pts)
            diam = 0.0 if m == 1 else math.sqrt(
                ((pts[:, None, :] - pts[None, :, :]) ** 2).sum() / (m * (m - 1)))
            bad += c.count > K or diam > d * (1 + 1e-12)
        assert sum(c.count for c in index) == len(ds)
    uncapped = max(c.count for c in build_index(ds, d, norm))
    ok = bad == 0 and uncapped > 100
    assert record(acceptance_report, 8, ok,
                  f"{len(ds)} grid instances (largest uncapped cluster {uncapped}); "
                  f"K=20 -> {sizes[20]} clusters (max {biggest[20]}), "
                  f"K=100 -> {sizes[100]} (max {biggest[100]}); {bad} violations")


def test_09_structural_invariants(acceptance_report):
    rng = np.random.default_rng(9)
    worst_mean, bad = 0.0, 0
    for k in range(500):
        S = 1 + k % 2
        ds = random_dataset(rng, int(rng.integers(1, 150)), n_types=int(rng.integers(1, 4)), spatial_dim=S,
                            extent=50, tsize=50, integer=k % 3 == 0)
        d = float(rng.uniform(0.5, 40))
        norm = NormalizationParams(2.5, 30) if k % 5 == 0 else NormalizationParams()
        if k % 4 == 0:
            index = build_index_capped(ds, d, int(rng.integers(1, 20)), norm)
        else:
            index = build_index(ds, d, norm)
        members = [m for c in index for m in c.members]
        bad += len(members) != len(set(members)) or set(members) != {e.id for e in ds.instances}
        for c in index:
            bad += any(ds[m].event_type != c.event_type for m in c.members)
            raw = np.array([(*ds[m].location, ds[m].time) for m in c.members])
            rep = np.array((*c.rep_location, c.rep_time))
            worst_mean = max(worst_mean, float(np.max(np.abs(rep - raw.mean(0)) / np.maximum(1, np.abs(rep)))))
            pts = norm.scale(raw)
            m = len(pts)
            if m > 1:
                diam = math.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum() / (m * (m - 1)))
                bad += diam > d * (1 + 1e-12)
            if index.cap is not None:
                bad += c.count > index.cap
    ok = bad == 0 and worst_mean <= 1e-9
    assert record(acceptance_report, 9, ok,
                  f"500 builds, {bad} partition/diameter violations, max rep-mean error {worst_mean:.1e}")


def test_10_speedup(acceptance_report):
    gen = generate(GeneratorParams(seed=0))
    config = MinerConfig(P10, 1.0)
    t0 = time.perf_counter()
    index = build_index(gen.dataset, 40.0)
    t_index = time.perf_counter() - t0
    t0 = time.perf_counter()
    micro = mine_micro(gen.dataset, index, config)
    t_micro = time.perf_counter() - t0
    t0 = time.perf_counter()
    base = mine_baseline(gen.dataset, config)
    t_base = time.perf_counter() - t0
    # the index is an input of mine_micro; its build time is reported separately
    speedup = t_base / t_micro
    ok = speedup >= 5 and t_index + t_micro + t_base <= 600
    assert record(acceptance_report, 10, ok,
                  f"Ti={len(gen.dataset)}: mine_micro {t_micro:.2f}s ({len(micro)} patterns), "
                  f"mine_baseline {t_base:.2f}s ({len(base)} patterns), speedup {speedup:.1f}x (>=5x); "
                  f"index build {t_index:.2f}s, end-to-end {t_base / (t_index + t_micro):.1f}x")
