"""Regret-bound curves u_T(eps) for the SE and Matern kernels, with case labels.

    python scripts/bound_sweeps.py --out results/bounds
"""
import argparse
from pathlib import Path

import numpy as np

from practical_ego.bounds import sign_agreement
from practical_ego.experiments import bound_sweep, sweep_svg


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--T", type=float, nargs="+", default=[1e2, 1e4, 1e6])
    ap.add_argument("--eps-min", type=float, default=1e-12)
    ap.add_argument("--eps-max", type=float, default=1e2)
    ap.add_argument("--points", type=int, default=141)
    ap.add_argument("--B", type=float, default=1.0)
    ap.add_argument("--out", default="results/bounds")
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    grid = np.logspace(np.log10(args.eps_min), np.log10(args.eps_max), args.points)
    for kernel in ("se", "matern"):
        res = bound_sweep(kernel, args.T, grid, args.B)
        res.write_csv(out / f"sweep_{kernel}.csv")
        (out / f"sweep_{kernel}.svg").write_text(sweep_svg(res))
        agree, labeled = sign_agreement(res)
        for T in args.T:
            rows = res.for_T(T)
            best = min(rows, key=lambda r: r.u_T)
            print(f"{kernel:>6} T={T:g}: argmin_eps u_T = {best.eps:.2e} (u_T={best.u_T:.4g})")
        print(f"{kernel:>6} slope signs agreeing with case labels: {agree}/{labeled}")


if __name__ == "__main__":
    main()
