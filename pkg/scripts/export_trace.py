"""Continue a critical point of the z^3 - z family along a path and write the trace as CSV.

    python3 scripts/export_trace.py --path -1 -2 --out trace.csv

Columns are u, zeta and the residual at each accepted step, plus rho of Q_u at
that critical point, which is what a plot of the deformation wants.
"""

import argparse
import csv
import math
import sys

from smale_lab.surface import PathSpec, continue_critical_point, family_from_roots


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--path", nargs="+", type=complex, default=[-1, -2],
                    help="waypoints in Python complex syntax, starting at -1")
    ap.add_argument("--anchor", type=float, default=-1 / math.sqrt(3), help="critical point to follow at u = -1")
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    fam = family_from_roots([1.0], -1.0, args.anchor)
    tr = continue_critical_point(fam, PathSpec.polyline(args.path))
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.writer(fh)
    w.writerow(["u_re", "u_im", "zeta_re", "zeta_im", "residual", "rho"])
    for s in tr.samples:
        Q = fam.Q(s.u)
        r = float(abs(Q(s.zeta) / (s.zeta * Q.coeffs[1]))) if s.zeta != 0 else float("nan")
        w.writerow([repr(s.u.real), repr(s.u.imag), repr(s.zeta.real), repr(s.zeta.imag), repr(s.residual), repr(r)])
    if args.out:
        fh.close()
    print(f"{len(tr.samples)} samples, f = {tr.f_closed:.8f}, rho at end {tr.rho_endpoint:.8f}", file=sys.stderr)


if __name__ == "__main__":
    main()
