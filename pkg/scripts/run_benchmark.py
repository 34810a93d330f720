#!/usr/bin/env python3
"""Run the full noisy-stream benchmark and write the results table.

Example:
    python scripts/run_benchmark.py --trials 100 --noise 0.10 --seed 0 --out bench_out
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from demoplan.bench import BenchConfig, results_tsv, run_benchmark, write_outputs


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=100)
    parser.add_argument("--noise", type=float, default=0.10)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--window-width", type=int, default=15)
    parser.add_argument("--frames-per-key", type=int, default=30)
    parser.add_argument("--out", default=None, help="directory for bench.tsv and summary.json")
    args = parser.parse_args()

    cfg = BenchConfig(
        trials=args.trials,
        noise_rate=args.noise,
        seed=args.seed,
        window_width=args.window_width,
        frames_per_key=args.frames_per_key,
    )
    results = run_benchmark(cfg)
    sys.stdout.write(results_tsv(results))
    if args.out:
        write_outputs(cfg, results, args.out)
        print(f"wrote {args.out}/bench.tsv and {args.out}/summary.json", file=sys.stderr)


if __name__ == "__main__":
    main()
