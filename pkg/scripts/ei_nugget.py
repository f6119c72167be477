"""EI maxima over a grid for several nuggets, EGO-placed versus random samples.

    python scripts/ei_nugget.py --seeds 10 --resolution 200
"""
import argparse
from pathlib import Path

from practical_ego.benchmarks import get_benchmark
from practical_ego.experiments import ei_grid, ei_sample_set


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--benchmark", default="branin")
    ap.add_argument("--eps", type=float, nargs="+", default=[1e-10, 1e-6, 1e-2])
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--resolution", type=int, default=200)
    ap.add_argument("--out", default="results/ei_nugget")
    args = ap.parse_args()

    b = get_benchmark(args.benchmark)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    eps = sorted(args.eps)
    print("seed source " + " ".join(f"{e:>10.0e}" for e in eps))
    for seed in range(args.seeds):
        for source in ("ego", "random"):
            X, y = ei_sample_set(b, source, seed)
            res = ei_grid(b, X, y, eps, args.resolution)
            if seed == 0:
                res.write_csv(out / f"ei_grid_{b.name}_{source}_seed{seed}.csv")
            print(f"{seed:>4} {source:>6} " + " ".join(f"{res.maxima[e]:10.3e}" for e in eps))


if __name__ == "__main__":
    main()
