"""Multi-start maximization of rho for a range of degrees.

    python3 scripts/run_search.py --degrees 3-6 --starts 64 --circle-only

Reports the best value found, its gap to (n - 1)/n and whether the maximizer
has the extremal shape (nonzero roots on a circle, equally spaced).
"""

import argparse
from pathlib import Path

from smale_lab import io
from smale_lab.cli import parse_degrees
from smale_lab.search import SearchConfig, maximize_rho, maximize_rho_circle


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--degrees", default="3-6", help="N or A-B")
    ap.add_argument("--starts", type=int, default=64)
    ap.add_argument("--max-iterations", type=int, default=4000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--circle-only", action="store_true", help="keep every nonzero root on |z| = 1")
    ap.add_argument("--workers", type=int, default=None)
    ap.add_argument("--out", type=Path, default=None)
    args = ap.parse_args()

    search = maximize_rho_circle if args.circle_only else maximize_rho
    results = []
    for n in parse_degrees(args.degrees):
        cfg = SearchConfig(n, starts=args.starts, max_iterations=args.max_iterations,
                           seed=args.seed, circle_only=args.circle_only)
        r = search(cfg, workers=args.workers)
        results.append(r)
        print(f"n={n}: best rho {r.best_rho:.12f}, gap {r.gap_to_bound:.2e}, "
              f"extremal {r.extremal_form}, {r.objective_evaluations} evaluations")
    if args.out:
        args.out.write_text(io.dumps(results) + "\n")
        print(f"results written to {args.out}")


if __name__ == "__main__":
    main()
