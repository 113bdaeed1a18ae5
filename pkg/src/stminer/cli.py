"""Command-line entry point: ``stminer {generate,microcluster,mine,benchmark,extract}``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal invariant
violation. Any long option may also be given as ``key=value`` in a file
passed with ``--config`` (command-line flags win).
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

from . import benchmark, datagen, extremes, io, microcluster, miner
from .core import NeighborhoodParams, NormalizationParams

log = logging.getLogger("stminer")


class UsageError(Exception):
    pass


class InvariantError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _generator_flags(p):
    g = p.add_argument_group("generator")
    g.add_argument("--ps", type=int, default=5, help="maximal pattern length")
    g.add_argument("--pn", type=int, default=10, help="number of maximal patterns")
    g.add_argument("--dsize", type=float, default=1000.0, help="spatial edge of V")
    g.add_argument("--tsize", type=float, default=1200.0, help="temporal extent of V")
    g.add_argument("--nf", type=int, default=20, help="event type pool size")
    g.add_argument("--ni", type=int, default=100, help="instances per type per pattern")
    g.add_argument("--seed", type=int, default=0)


def _neighborhood_flags(p):
    p.add_argument("--radius", type=float, default=10.0, help="neighborhood radius R")
    p.add_argument("--tinterval", type=float, default=10.0, help="neighborhood interval T")


def _index_flags(p):
    p.add_argument("--diameter", type=float, default=None,
                   help="diameter threshold d (default sqrt(2) with normalization, else 40)")
    p.add_argument("--cap", type=int, default=None, help="max instances per microcluster")
    p.add_argument("--norm-ds", type=float, default=None, help="spatial normalization scale")
    p.add_argument("--norm-dt", type=float, default=None, help="temporal normalization scale")


def _mining_flags(p):
    p.add_argument("--theta", type=float, default=1.0, help="significance threshold")
    p.add_argument("--max-len", type=int, default=20)


def build_parser() -> tuple[argparse.ArgumentParser, argparse._SubParsersAction]:
    parser = _Parser(prog="stminer", description=__doc__.splitlines()[0])
    parser.add_argument("--config", type=Path, default=None, help="key=value option file")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("generate", help="write a synthetic dataset with planted patterns")
    _generator_flags(p)
    _neighborhood_flags(p)
    p.add_argument("--output", type=Path, required=True)
    p.add_argument("--planted", type=Path, default=None,
                   help="ground-truth file (default: OUTPUT with .planted suffix)")

    p = sub.add_parser("microcluster", help="build and export a microclustering index")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--space", default=None, help="x_lo,x_hi[,y_lo,y_hi],t_lo,t_hi")
    _index_flags(p)
    p.add_argument("--output", type=Path, required=True)

    p = sub.add_parser("mine", help="discover significant sequential patterns")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--space", default=None, help="x_lo,x_hi[,y_lo,y_hi],t_lo,t_hi")
    _neighborhood_flags(p)
    _index_flags(p)
    _mining_flags(p)
    p.add_argument("--index", type=Path, default=None, help="reuse an exported index")
    p.add_argument("--baseline", action="store_true", help="mine raw instances (no index)")
    p.add_argument("--planted", type=Path, default=None, help="report recovery of these chains")
    p.add_argument("--output", type=Path, required=True)

    p = sub.add_parser("benchmark", help="reproduce the compression/timing sweeps")
    p.add_argument("--sweep", choices=benchmark.SWEEP_VARS, default="ni")
    p.add_argument("--values", type=float, nargs="+", default=[100])
    p.add_argument("--diameters", type=float, nargs="+", default=[40, 60, 80, 100])
    p.add_argument("--seeds", type=int, default=5, help="number of seeds, starting at --seed")
    _generator_flags(p)
    _neighborhood_flags(p)
    _index_flags(p)
    _mining_flags(p)
    p.add_argument("--mine", action="store_true", help="also time mining on each index")
    p.add_argument("--input", type=Path, default=None, help="dataset for --sweep k")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--output", type=Path, required=True)
    p.add_argument("--timing", type=Path, default=None, help="per-seed timing CSV")

    p = sub.add_parser("extract", help="extreme events from gridded observations")
    p.add_argument("--input", type=Path, required=True, help="CSV variable,x[,y],t,value")
    p.add_argument("--q-lo", type=float, default=0.01)
    p.add_argument("--q-hi", type=float, default=0.99)
    p.add_argument("--omit", nargs="*", default=[], help="event types to drop, e.g. Low-precipitation")
    p.add_argument("--output", type=Path, required=True)
    return parser, sub


def read_config(path: Path) -> dict[str, str]:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.lstrip("-").replace("-", "_")] = value
    return out


def _apply_config(sub_parser: argparse.ArgumentParser, cfg: dict[str, str]) -> None:
    known = {a.dest: a for a in sub_parser._actions}
    defaults = {}
    for key, value in cfg.items():
        action = known.get(key)
        if action is None:
            raise UsageError(f"unknown config key {key!r}")
        if isinstance(action, argparse._StoreTrueAction):
            defaults[key] = value.lower() in ("1", "true", "yes", "on")
        elif action.nargs in ("+", "*"):
            conv = action.type or str
            defaults[key] = [conv(v) for v in value.replace(",", " ").split()]
        else:
            defaults[key] = value
    sub_parser.set_defaults(**defaults)


def _norm(args) -> NormalizationParams:
    if args.norm_ds is None and args.norm_dt is None:
        return NormalizationParams()
    return NormalizationParams(args.norm_ds or 1.0, args.norm_dt or 1.0)


def _diameter(args, norm: NormalizationParams) -> float:
    if args.diameter is not None:
        return args.diameter
    return NormalizationParams.NORMALIZED_THRESHOLD if norm.enabled else 40.0


def _load(args):
    space = io.parse_space(args.space) if getattr(args, "space", None) else None
    return io.read_dataset(args.input, space)


def _check_index(index: microcluster.MicroclusterIndex, dataset) -> None:
    seen = [m for c in index for m in c.members]
    if len(seen) != len(set(seen)) or set(seen) != {e.id for e in dataset.instances}:
        raise InvariantError("microclusters do not partition the dataset")
    for c in index:
        if any(dataset[m].event_type != c.event_type for m in c.members):
            raise InvariantError(f"microcluster {c.cid} mixes event types")


def _build(args, dataset):
    norm = _norm(args)
    d = _diameter(args, norm)
    t0 = time.perf_counter()
    if args.cap is not None:
        index = microcluster.build_index_capped(dataset, d, args.cap, norm)
    else:
        index = microcluster.build_index(dataset, d, norm)
    ms = (time.perf_counter() - t0) * 1e3
    _check_index(index, dataset)
    return index, ms


def cmd_generate(args) -> None:
    params = datagen.GeneratorParams(
        ps=args.ps, pn=args.pn, dsize=args.dsize, tsize=args.tsize, nf=args.nf,
        ni=args.ni, radius=args.radius, interval=args.tinterval, seed=args.seed,
    )
    gen = datagen.generate(params)
    io.write_dataset(gen.dataset, args.output)
    planted = args.planted or args.output.with_suffix(".planted")
    datagen.write_planted(gen.planted, planted)
    print(f"wrote {len(gen.dataset)} instances to {args.output}, {len(gen.planted)} planted chains to {planted}")


def cmd_microcluster(args) -> None:
    dataset = _load(args)
    index, ms = _build(args, dataset)
    microcluster.write_index(index, args.output)
    ratio = microcluster.compression_ratio(len(dataset), len(index)) if len(index) else float("nan")
    print(f"dataset {len(dataset)}  index {len(index)}  compression {ratio:.5f}  {ms:.0f} ms")


def cmd_mine(args) -> None:
    dataset = _load(args)
    config = miner.MinerConfig(NeighborhoodParams(args.radius, args.tinterval), args.theta, args.max_len)
    if args.baseline:
        result = miner.mine_baseline(dataset, config)
    else:
        if args.index is not None:
            index = microcluster.read_index(args.index)
            _check_index(index, dataset)
        else:
            index, ms = _build(args, dataset)
            log.info("index of %d microclusters built in %.0f ms", len(index), ms)
        result = miner.mine_micro(dataset, index, config)
    miner.write_patterns(result, args.output)
    print(f"{len(result)} significant patterns in {result.elapsed_seconds * 1e3:.0f} ms "
          f"({result.expansions} expansions)")
    if args.planted is not None:
        report = datagen.verify_planted((p.types for p in result), datagen.read_planted(args.planted))
        print(f"planted recovery {report.maximal:.3f}  sub-chains {report.subsequences:.3f}")


def cmd_benchmark(args) -> None:
    base = datagen.GeneratorParams(
        ps=args.ps, pn=args.pn, dsize=args.dsize, tsize=args.tsize, nf=args.nf,
        ni=args.ni, radius=args.radius, interval=args.tinterval, seed=args.seed,
    )
    norm = _norm(args)
    diameters = tuple(args.diameters)
    if args.diameter is not None:
        diameters = (args.diameter,)
    elif norm.enabled:
        diameters = (NormalizationParams.NORMALIZED_THRESHOLD,)
    dataset = None
    if args.sweep == "k":
        if args.input is None:
            raise UsageError("--sweep k needs --input")
        dataset = _load(args)
    elif args.input is not None:
        raise UsageError("--input is only used with --sweep k")
    config = benchmark.BenchmarkConfig(
        sweep=args.sweep, values=tuple(args.values), diameters=diameters,
        seeds=tuple(range(args.seed, args.seed + args.seeds)), base=base,
        mine=args.mine, theta=args.theta, max_len=args.max_len, jobs=args.jobs,
        dataset=dataset, norm=norm,
    )
    rows, records = benchmark.run_benchmark(config)
    for r in rows:
        if r.compression_ratio != r.dataset_size / r.index_size:
            raise InvariantError("compression ratio identity violated")
    benchmark.write_benchmark(rows, args.output)
    if args.timing is not None:
        benchmark.write_timing(records, args.timing)
    for r in rows:
        print(f"{r.sweep_var}={r.value:g} d={r.diameter:g}: index {r.index_size:.1f} "
              f"ratio {r.compression_ratio:.5f} mc {r.microclustering_ms:.0f} ms")


def cmd_extract(args) -> None:
    series = extremes.read_series(args.input)
    dataset = extremes.extract_extremes(series, args.q_lo, args.q_hi, omit=args.omit)
    io.write_dataset(dataset, args.output)
    counts = {f: len(dataset.of_type(f)) for f in sorted(dataset.event_types)}
    print(f"wrote {len(dataset)} events to {args.output}: {counts}")


COMMANDS = {
    "generate": cmd_generate,
    "microcluster": cmd_microcluster,
    "mine": cmd_mine,
    "benchmark": cmd_benchmark,
    "extract": cmd_extract,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, sub = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required")
        if args.config is not None:
            _apply_config(sub.choices[args.command], read_config(args.config))
            args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(message)s")
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"stminer: usage error: {exc}", file=sys.stderr)
        return 1
    except InvariantError as exc:
        print(f"stminer: invariant violated: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"stminer: data error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
