"""Compression sweeps over Ni, Pn and Ps against published reference ratios.

Writes one benchmark CSV per sweep into the output directory and prints
measured vs reference compression ratios for d in {40, 60, 80, 100}.

    python3 scripts/reproduce_tables.py --seeds 5 --out results/
"""

import argparse
from pathlib import Path

from stminer.benchmark import BenchmarkConfig, run_benchmark, write_benchmark, write_timing
from stminer.datagen import GeneratorParams

DIAMETERS = (40.0, 60.0, 80.0, 100.0)

# reference compression ratios per sweep value, ordered like DIAMETERS
REFERENCE = {
    "ni": {
        100: (1.38007, 1.53799, 1.82183, 2.24669),
        110: (1.38959, 1.56139, 1.87649, 2.34292),
        120: (1.39811, 1.58646, 1.92215, 2.42571),
        130: (1.3947, 1.59921, 1.96286, 2.50772),
        140: (1.40576, 1.62432, 2.01671, 2.59307),
        150: (1.41817, 1.64817, 2.05959, 2.67809),
        160: (1.4267, 1.67364, 2.11277, 2.76482),
    },
    "pn": {
        2: (1.32275, 1.36147, 1.43266, 1.53492),
        4: (1.34363, 1.40994, 1.53905, 1.73085),
        6: (1.37112, 1.46879, 1.65244, 1.91939),
        8: (1.36705, 1.49561, 1.72488, 2.07523),
        10: (1.38715, 1.54775, 1.83419, 2.26193),
        12: (1.3986, 1.58688, 1.92369, 2.4326),
        14: (1.40888, 1.62583, 2.01613, 2.60271),
        16: (1.4209, 1.66858, 2.11249, 2.76577),
        18: (1.43816, 1.71331, 2.20049, 2.92826),
        20: (1.44221, 1.74368, 2.28154, 3.07314),
    },
    "ps": {
        2: (1.14123, 1.21029, 1.33422, 1.52091),
        3: (1.22875, 1.32538, 1.5, 1.76315),
        4: (1.30251, 1.42857, 1.65358, 2.00702),
        5: (1.3837, 1.53728, 1.81785, 2.24669),
        6: (1.44543, 1.63778, 1.97759, 2.48859),
        7: (1.50215, 1.72861, 2.12218, 2.72321),
        8: (1.54261, 1.79715, 2.2453, 2.91758),
        9: (1.5827, 1.86916, 2.37279, 3.12772),
        10: (1.63159, 1.94704, 2.50219, 3.33167),
    },
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sweeps", nargs="+", choices=sorted(REFERENCE), default=["ni", "pn", "ps"])
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("results"))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    for sweep in args.sweeps:
        ref = REFERENCE[sweep]
        rows, records = run_benchmark(BenchmarkConfig(
            sweep=sweep, values=tuple(ref), diameters=DIAMETERS,
            seeds=tuple(range(args.seeds)), base=GeneratorParams(), jobs=args.jobs,
        ))
        write_benchmark(rows, args.out / f"sweep_{sweep}.csv")
        write_timing(records, args.out / f"timing_{sweep}.csv")
        print(f"\n{sweep} sweep ({args.seeds} seeds): measured / reference compression ratio")
        print(f"{sweep:>4} " + "".join(f"{'d=' + format(d, 'g'):>20}" for d in DIAMETERS))
        for v in ref:
            cells = []
            for k, d in enumerate(DIAMETERS):
                row = next(r for r in rows if r.value == v and r.diameter == d)
                cells.append(f"{row.compression_ratio:8.3f} / {ref[v][k]:<8.3f}")
            print(f"{v:>4} " + "".join(f"{c:>20}" for c in cells))


if __name__ == "__main__":
    main()
