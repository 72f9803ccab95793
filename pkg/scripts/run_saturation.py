"""Push interior zeros of random samples to the unit circle and dump uncertified steps.

    python3 scripts/run_saturation.py --degrees 3-5 --samples 100 --out findings.json

Each finding is the polynomial before the step, the zero that moved and rho on
both sides.  Feed a finding's ``poly`` back into ``smale-lab deform`` to
inspect it.
"""

import argparse
import json
from pathlib import Path

from smale_lab import io
from smale_lab.cli import parse_degrees
from smale_lab.experiments import saturation_probe


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--degrees", default="3-5", help="N or A-B")
    ap.add_argument("--samples", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--boundary-samples", type=int, default=720)
    ap.add_argument("--workers", type=int, default=None)
    ap.add_argument("--out", type=Path, default=None)
    args = ap.parse_args()

    s = saturation_probe(parse_degrees(args.degrees), args.samples, args.seed,
                         boundary_samples=args.boundary_samples, workers=args.workers)
    for d in s.per_degree:
        print(f"n={d.degree}: {d.certified}/{d.samples} certified, {d.on_circle} on circle, "
              f"max final rho {d.final_rho_max:.6f}, {d.bound_exceedances} above bound")
    worst = sorted(s.findings, key=lambda f: f.rho_before - f.rho_after, reverse=True)[:5]
    for f in worst:
        print(f"  n={f.degree} sample {f.sample} step {f.step}: rho {f.rho_before:.6f} -> {f.rho_after:.6f}")
    print(f"{len(s.findings)} uncertified steps; {s.wall_time:.1f}s")
    if args.out:
        args.out.write_text(json.dumps(json.loads(io.dumps(s)), indent=1) + "\n")
        print(f"summary written to {args.out}")


if __name__ == "__main__":
    main()
