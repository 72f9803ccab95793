"""Command-line front end: ``smale-lab <command> [options]``.

Polynomials are JSON documents, either ``{"coeffs": [[re, im], ...]}``
(ascending degree) or ``{"roots": [...], "leading": [re, im],
"include_origin": true}``.  A family is ``{"poly": <doc>, "moving_root": z,
"anchor": z}`` (or ``moving_root_index`` / ``anchor_index``).  A path is a list
whose items are waypoints (a number or ``[re, im]``) or arcs
``{"center", "radius", "from_angle", "to_angle", "turns"}``.

Exit status: 0 success, 1 a mathematical certificate failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import csv
import io as _stdio
import math
import sys
from dataclasses import dataclass
from typing import Any, Optional, Sequence

from . import io
from .deform import (
    DeformError,
    SaturationReport,
    _nonzero_roots,
    blowup_probe,
    circle_saturate,
    push_zero_to_circle,
)
from .experiments import verify
from .polycore import Polynomial, PolynomialError, normalize_to_class
from .rootfind import RootCluster, RootFindError, RootFindReport, cluster_multiplicities, critical_points
from .search import SearchConfig, maximize_rho, maximize_rho_circle
from .smale import SmaleError, conjectured_bound, rho
from .surface import (
    ContinuationError,
    ContinuationTrace,
    PathSpec,
    SurfaceError,
    branch_points,
    build_family,
    continue_critical_point,
    monodromy,
    rho_identity_check,
)

EXIT_OK, EXIT_CERTIFICATE, EXIT_USAGE = 0, 1, 2
IDENTITY_TOL = 1e-8
AGREEMENT_TOL = 1e-6


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class CriticalPointsReport:
    roots: RootFindReport
    clusters: tuple[RootCluster, ...]


# ----------------------------------------------------------------------------
# input documents


def _read_arg(text: str, where: str) -> Any:
    if text == "-":
        text = sys.stdin.read()
    return io.loads_document(text, where)


def read_polynomial(text: str) -> Polynomial:
    return io.parse_polynomial(_read_arg(text, "--poly"), "--poly")


def read_family(text: str):
    doc = _read_arg(text, "--family")
    where = "--family"
    if not isinstance(doc, dict) or "poly" not in doc:
        raise io.DocumentError(where, "expected an object with a 'poly' key")
    extra = set(doc) - {"poly", "moving_root", "moving_root_index", "anchor", "anchor_index"}
    if extra:
        raise io.DocumentError(where, f"unknown keys {sorted(extra)}")
    p = io.parse_polynomial(doc["poly"], f"{where}.poly")
    kw = {}
    for key in ("moving_root", "anchor"):
        if key in doc:
            kw[key] = io.parse_complex(doc[key], f"{where}.{key}")
        if f"{key}_index" in doc:
            v = doc[f"{key}_index"]
            if isinstance(v, bool) or not isinstance(v, int) or v < 0:
                raise io.DocumentError(f"{where}.{key}_index", "expected a non-negative integer")
            kw[f"{key}_index"] = v
    return build_family(p, **kw)


def parse_path(doc: Any, where: str = "--path") -> PathSpec:
    if not isinstance(doc, list) or not doc:
        raise io.DocumentError(where, "expected a non-empty list of waypoints and arcs")
    pieces: list[PathSpec] = []
    points: list[complex] = []
    for i, item in enumerate(doc):
        at = f"{where}[{i}]"
        if isinstance(item, dict):
            if points:
                pieces.append(PathSpec.polyline(points))
                points = []
            pieces.append(_parse_arc(item, at))
        else:
            points.append(io.parse_complex(item, at))
    if points:
        pieces.append(PathSpec.polyline(points))
    path = pieces[0]
    for piece in pieces[1:]:
        path = path + piece
    return path


def _parse_arc(item: dict, where: str) -> PathSpec:
    need = {"center", "radius", "from_angle", "to_angle"}
    missing = need - set(item)
    if missing:
        raise io.DocumentError(where, f"arc is missing {sorted(missing)}")
    extra = set(item) - need - {"turns"}
    if extra:
        raise io.DocumentError(where, f"unknown arc keys {sorted(extra)}")
    center = io.parse_complex(item["center"], f"{where}.center")
    vals = {}
    for key in ("radius", "from_angle", "to_angle"):
        v = item[key]
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise io.DocumentError(f"{where}.{key}", "expected a finite number")
        vals[key] = float(v)
    if vals["radius"] <= 0:
        raise io.DocumentError(f"{where}.radius", "radius must be positive")
    turns = item.get("turns", 0)
    if isinstance(turns, bool) or not isinstance(turns, int):
        raise io.DocumentError(f"{where}.turns", "expected an integer")
    return PathSpec.arc(center, vals["radius"], vals["from_angle"], vals["to_angle"], turns)


def parse_degrees(text: str) -> tuple[int, ...]:
    try:
        if "-" in text:
            a, b = (int(s) for s in text.split("-", 1))
        else:
            a = b = int(text)
    except ValueError:
        raise UsageError(f"--degree: expected N or A-B, got {text!r}") from None
    if a < 2 or b < a:
        raise UsageError(f"--degree: need 2 <= A <= B, got {text!r}")
    return tuple(range(a, b + 1))


# ----------------------------------------------------------------------------
# output


def _flatten(value: Any, prefix: str, rows: list) -> None:
    if isinstance(value, dict):
        for k, v in value.items():
            _flatten(v, f"{prefix}.{k}" if prefix else k, rows)
    elif isinstance(value, list):
        for i, v in enumerate(value):
            _flatten(v, f"{prefix}[{i}]", rows)
    else:
        rows.append((prefix, value))


def to_csv(report: Any) -> str:
    buf = _stdio.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if isinstance(report, ContinuationTrace):
        w.writerow(["u_re", "u_im", "zeta_re", "zeta_im", "residual"])
        for s in report.samples:
            w.writerow([io.format_float(x) for x in (s.u.real, s.u.imag, s.zeta.real, s.zeta.imag, s.residual)])
        return buf.getvalue()
    rows: list = []
    _flatten(io.to_jsonable(report), "", rows)
    w.writerow(["field", "value"])
    for key, v in rows:
        if isinstance(v, float):
            v = io.format_float(v)
        w.writerow([key, "" if v is None else v])
    return buf.getvalue()


def emit(report: Any, fmt: str, out: Optional[str]) -> None:
    text = io.dumps(report) + "\n" if fmt == "json" else to_csv(report)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ----------------------------------------------------------------------------
# commands


def _tol(args, default: float) -> float:
    return default if args.tol is None else args.tol


def cmd_rho(args):
    rep = rho(read_polynomial(args.poly))
    return rep, rep.rho <= conjectured_bound(rep.degree) + _tol(args, 1e-9)


def cmd_critical_points(args):
    rep = critical_points(read_polynomial(args.poly))
    clusters = cluster_multiplicities(rep, _tol(args, 1e-7))
    return CriticalPointsReport(rep, tuple(clusters)), True


def cmd_continue(args):
    fam = read_family(args.family)
    path = parse_path(io.loads_document(args.path, "--path"))
    trace = continue_critical_point(fam, path)
    ok = True
    if trace.f_closed is not None and trace.f_integral is not None:
        ok = abs(trace.f_integral - trace.f_closed) <= AGREEMENT_TOL * (1 + abs(trace.f_closed))
        ok = ok and rho_identity_check(fam, trace) <= _tol(args, IDENTITY_TOL)
    return trace, ok


def cmd_monodromy(args):
    fam = read_family(args.family)
    return monodromy(fam, parse_path(io.loads_document(args.path, "--path"))), True


def cmd_branch_points(args):
    return branch_points(read_family(args.family)), True


def cmd_deform(args):
    p, scale = normalize_to_class(read_polynomial(args.poly))
    step = push_zero_to_circle(p, args.moving_root, args.samples or 720)
    on_circle = all(abs(abs(z) - 1) <= 1e-9 for z in _nonzero_roots(step.after))
    rep = SaturationReport(p, scale, (step,), step.after, (step.rho_before, step.rho_after), on_circle)
    return rep, step.certificate_ok


def cmd_saturate(args):
    rep = circle_saturate(read_polynomial(args.poly), args.samples or 720)
    return rep, rep.certified


def _search_config(args, circle: bool) -> SearchConfig:
    return SearchConfig(
        degree=args.degree,
        starts=args.starts,
        max_iterations=args.max_iterations,
        seed=args.seed,
        circle_only=circle,
        extremal_tol=_tol(args, 1e-3),
    )


def cmd_search(args):
    res = maximize_rho(_search_config(args, False))
    return res, res.best_rho <= conjectured_bound(res.degree) + 1e-9


def cmd_tischler(args):
    res = maximize_rho_circle(_search_config(args, True))
    return res, res.best_rho <= conjectured_bound(res.degree) + 1e-9


def cmd_verify(args):
    summary = verify(parse_degrees(args.degree), args.samples or 1000, args.seed, tol=_tol(args, 1e-9))
    return summary, not summary.violations


def cmd_probe_blowup(args):
    probe = blowup_probe(read_family(args.family), args.radius, args.samples or 16)
    return probe, probe.finite_ok and probe.pole_ok


COMMANDS = {
    "rho": (cmd_rho, "rho(p) with every critical point"),
    "critical-points": (cmd_critical_points, "critical points and their multiplicities"),
    "continue": (cmd_continue, "continue the anchor critical point along a path"),
    "monodromy": (cmd_monodromy, "sheet permutation around a closed loop"),
    "branch-points": (cmd_branch_points, "branch points and sheets at infinity"),
    "deform": (cmd_deform, "move one interior zero to the unit circle"),
    "saturate": (cmd_saturate, "move every interior zero to the unit circle"),
    "search": (cmd_search, "multi-start search for the largest rho"),
    "tischler": (cmd_tischler, "search restricted to roots on the unit circle"),
    "verify": (cmd_verify, "rho of random class members against the bound"),
    "probe-blowup": (cmd_probe_blowup, "transfer-function inequalities on |u| = r"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None, help="tolerance (command specific default)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--samples", type=int, default=None, help="sample count (command specific default)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", default=None, metavar="PATH")

    parser = argparse.ArgumentParser(prog="smale-lab", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        sp = sub.add_parser(name, parents=[common], help=help_text)
        if name in ("rho", "critical-points", "deform", "saturate"):
            sp.add_argument("--poly", required=True, help="polynomial document, or - for stdin")
        if name in ("continue", "monodromy", "branch-points", "probe-blowup"):
            sp.add_argument("--family", required=True, help="family document")
        if name in ("continue", "monodromy"):
            sp.add_argument("--path", required=True, help="JSON list of waypoints and arcs")
        if name == "deform":
            sp.add_argument("--moving-root", type=int, default=None, help="index of the interior zero to move")
        if name in ("search", "tischler"):
            sp.add_argument("--degree", type=int, required=True)
            sp.add_argument("--starts", type=int, default=64)
            sp.add_argument("--max-iterations", type=int, default=4000)
        if name == "verify":
            sp.add_argument("--degree", required=True, help="N or A-B")
        if name == "probe-blowup":
            sp.add_argument("--radius", type=float, required=True)
    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    fn = COMMANDS[args.command][0]
    try:
        report, ok = fn(args)
    except (UsageError, io.DocumentError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PolynomialError, SmaleError, SurfaceError, DeformError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ContinuationError, RootFindError) as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        emit(report, args.format, args.out)
    except OSError as exc:
        print(f"error: --out: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK if ok else EXIT_CERTIFICATE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
