"""Median and quartile R_t/t curves on the synthetic benchmarks, one CSV per benchmark.

    python scripts/synthetic_curves.py --reps 20 --benchmarks branin michalewicz
"""
import argparse
import csv
from pathlib import Path

import numpy as np

from practical_ego.benchmarks import SYNTHETIC
from practical_ego.experiments import preset, run_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--benchmarks", nargs="+", default=sorted(SYNTHETIC), choices=sorted(SYNTHETIC))
    ap.add_argument("--eps", type=float, nargs="+", default=[1e-2, 1e-4, 1e-6])
    ap.add_argument("--reps", type=int, default=100)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="results/synthetic")
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name in args.benchmarks:
        cfg = preset(name, eps=args.eps, reps=args.reps, workers=args.workers)
        curves = run_experiment(cfg)
        path = out / f"curves_{name}.csv"
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["epsilon", "t", "median", "p25", "p75"])
            for eps, A in curves.items():
                p25, med, p75 = np.percentile(A, [25, 50, 75], axis=0)
                for t in range(A.shape[1]):
                    w.writerow([repr(eps), t + 1, repr(float(med[t])), repr(float(p25[t])), repr(float(p75[t]))])
        finals = ", ".join(f"eps={e:g}: {np.median(A[:, -1]):.4g}" for e, A in curves.items())
        print(f"{name}: median R_T/T {finals} -> {path}")


if __name__ == "__main__":
    main()
