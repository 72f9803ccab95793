"""Monte Carlo check of rho against (n - 1)/n over a range of degrees.

    python3 scripts/run_verify.py --degrees 3-8 --samples 20000 --seed 1 --out verify.json

Prints one line per degree and writes the full summary as JSON.
"""

import argparse
from pathlib import Path

from smale_lab import io
from smale_lab.cli import parse_degrees
from smale_lab.experiments import reverify, verify


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--degrees", default="3-8", help="N or A-B")
    ap.add_argument("--samples", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--tol", type=float, default=1e-9)
    ap.add_argument("--workers", type=int, default=None)
    ap.add_argument("--out", type=Path, default=None)
    args = ap.parse_args()

    s = verify(parse_degrees(args.degrees), args.samples, args.seed, tol=args.tol, workers=args.workers)
    print(f"{'n':>3} {'bound':>9} {'rho max':>10} {'rho mean':>10} {'min margin':>11} {'over':>5}")
    for d in s.per_degree:
        print(f"{d.degree:>3} {d.bound:>9.6f} {d.rho_max:>10.6f} {d.rho_mean:>10.6f} "
              f"{d.margin_min:>11.3e} {d.exceedances:>5}")
    confirmed = sum(reverify(v, args.tol) for v in s.violations)
    print(f"{len(s.violations)} violations, {confirmed} confirmed on recomputation; {s.wall_time:.1f}s")
    if args.out:
        args.out.write_text(io.dumps(s) + "\n")
        print(f"summary written to {args.out}")


if __name__ == "__main__":
    main()
