"""Time the microcluster miner against the raw-instance miner on generated data.

    python3 scripts/speedup.py --ni 100 --seeds 3
"""

import argparse
import time

from stminer.core import NeighborhoodParams
from stminer.datagen import GeneratorParams, generate, verify_planted
from stminer.microcluster import build_index
from stminer.miner import MinerConfig, mine_baseline, mine_micro


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ni", type=int, default=100)
    ap.add_argument("--ps", type=int, default=5)
    ap.add_argument("--pn", type=int, default=10)
    ap.add_argument("--diameter", type=float, default=40.0)
    ap.add_argument("--theta", type=float, default=1.0)
    ap.add_argument("--seeds", type=int, default=3)
    ap.add_argument("--skip-baseline", action="store_true")
    args = ap.parse_args()
    config = MinerConfig(NeighborhoodParams(10, 10), args.theta)

    print("seed  Ti     index  build_s  micro_s  patterns  recovery  base_s  patterns  speedup")
    for seed in range(args.seeds):
        gen = generate(GeneratorParams(ps=args.ps, pn=args.pn, ni=args.ni, seed=seed))
        t0 = time.perf_counter()
        index = build_index(gen.dataset, args.diameter)
        t_build = time.perf_counter() - t0
        micro = mine_micro(gen.dataset, index, config)
        rec = verify_planted((p.types for p in micro), gen.planted).maximal
        line = (f"{seed:>4}  {len(gen.dataset):<6} {len(index):<6} {t_build:7.2f}  "
                f"{micro.elapsed_seconds:7.2f}  {len(micro):8d}  {rec:8.2f}")
        if not args.skip_baseline:
            base = mine_baseline(gen.dataset, config)
            line += (f"  {base.elapsed_seconds:6.2f}  {len(base):8d}  "
                     f"{base.elapsed_seconds / micro.elapsed_seconds:6.1f}x")
        print(line)


if __name__ == "__main__":
    main()
