"""Push interior zeros onto the unit circle without (supposedly) lowering rho.

The large-r blow-up argument reduces, after pulling back, to choosing a new
position ``u*`` with ``|u*| = 1`` for one interior zero while the others stay
put.  :func:`push_zero_to_circle` searches that circle directly: a dense
sweep of ``rho(Q(., u))`` followed by golden-section refinement.  A step whose
best boundary value falls below the starting rho is still returned, with
``certificate_ok = False``; it is a counterexample to the monotonicity claim.

:func:`blowup_probe` evaluates the transfer-function inequalities used by the
asymptotic argument on a circle of radius r.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .parallel import chunked, ordered_map, worker_count
from .polycore import Polynomial, PolynomialError, from_roots, normalize_to_class
from .rootfind import all_roots
from .smale import batch_rho, rho
from .surface import VariationFamily, _canonical_order, f_closed_form, g_value, sheet_limit

log = logging.getLogger(__name__)

CIRCLE_TOL = 1e-9
CERT_SLACK = 1e-9
ANGLE_TOL = 1e-10
DEFAULT_SAMPLES = 720
_INV_GOLDEN = (math.sqrt(5) - 1) / 2


class DeformError(ValueError):
    """Precondition failure for a deformation step."""


@dataclass(frozen=True)
class DeformationStep:
    before: Polynomial
    after: Polynomial
    moved_root_from: complex
    moved_root_to: complex
    rho_before: float
    rho_after: float
    boundary_samples: int
    certificate_ok: bool
    angle: float
    skipped_samples: int = 0


@dataclass(frozen=True)
class SaturationReport:
    initial: Polynomial
    scale: float
    steps: tuple[DeformationStep, ...]
    final: Polynomial
    rho_trajectory: tuple[float, ...]
    all_on_circle: bool

    @property
    def certified(self) -> bool:
        return all(s.certificate_ok for s in self.steps)


def _nonzero_roots(p: Polynomial) -> list[complex]:
    rep = all_roots(Polynomial(p.coeffs[1:]), strict=True)
    return _canonical_order(rep.roots)


def _sweep(fixed: list[complex], angles: np.ndarray, workers: Optional[int]) -> tuple[np.ndarray, np.ndarray]:
    rows = np.empty((angles.size, len(fixed) + 1), dtype=np.complex128)
    rows[:, :-1] = fixed
    rows[:, -1] = np.exp(1j * angles)
    parts = chunked(rows, worker_count(workers))
    results = ordered_map(batch_rho, parts, workers)
    vals = np.concatenate([r[0] for r in results])
    ok = np.concatenate([r[1] for r in results])
    return vals, ok


def _circle_value(fixed: list[complex], theta: float) -> float:
    vals, ok = _sweep(fixed, np.array([theta]), 1)
    return float(vals[0]) if ok[0] else -math.inf


def _golden_max(fn, a: float, b: float, tol: float) -> tuple[float, float]:
    c = b - _INV_GOLDEN * (b - a)
    d = a + _INV_GOLDEN * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_GOLDEN * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_GOLDEN * (b - a)
            fd = fn(d)
    return (c, fc) if fc >= fd else (d, fd)


def _push(roots: list[complex], k: int, samples: int, workers: Optional[int]) -> tuple[float, float, int]:
    fixed = roots[:k] + roots[k + 1 :]
    angles = 2 * math.pi * np.arange(samples) / samples
    vals, ok = _sweep(fixed, angles, workers)
    skipped = int(np.count_nonzero(~ok))
    if skipped:
        log.info("skipped %d boundary samples outside the class", skipped)
    vals = np.where(ok, vals, -np.inf)
    i = int(np.argmax(vals))
    best_theta, best_val = float(angles[i]), float(vals[i])
    h = 2 * math.pi / samples
    theta, val = _golden_max(lambda t: _circle_value(fixed, t), best_theta - h, best_theta + h, ANGLE_TOL)
    if val > best_val:
        best_theta, best_val = theta % (2 * math.pi), val
    return best_theta, best_val, skipped


def push_zero_to_circle(
    p: Polynomial,
    moving_root_index: Optional[int] = None,
    samples: int = DEFAULT_SAMPLES,
    *,
    workers: Optional[int] = None,
) -> DeformationStep:
    """Move one interior zero of a normalized ``p`` to the best point of the unit circle.

    ``moving_root_index`` indexes the nonzero roots in canonical order
    (modulus, then angle); by default the interior root of smallest modulus
    moves.
    """
    if abs(p.leading - 1) > 1e-12 or p.coeffs[0] != 0:
        raise DeformError("push_zero_to_circle needs a normalized (monic, p(0)=0) polynomial")
    roots = _nonzero_roots(p)
    if max(abs(z) for z in roots) > 1 + CIRCLE_TOL:
        raise DeformError("polynomial is not normalized: a root lies outside the unit disk")
    return _step(p, roots, moving_root_index, samples, workers)


def _step(p, roots, k, samples, workers) -> DeformationStep:
    interior = [i for i, z in enumerate(roots) if abs(z) < 1 - CIRCLE_TOL]
    if k is None:
        if not interior:
            raise DeformError("no interior root to move")
        k = min(interior, key=lambda i: abs(roots[i]))
    elif k not in interior:
        raise DeformError(f"root {k} is not strictly inside the unit circle")
    theta, _, skipped = _push(roots, k, samples, workers)
    new_root = cmath.exp(1j * theta)
    new_roots = roots[:k] + [new_root] + roots[k + 1 :]
    after = from_roots(new_roots, 1.0)
    before_rho = rho(p).rho
    after_rho = rho(after).rho
    return DeformationStep(
        before=p,
        after=after,
        moved_root_from=roots[k],
        moved_root_to=new_root,
        rho_before=before_rho,
        rho_after=after_rho,
        boundary_samples=samples,
        certificate_ok=bool(after_rho >= before_rho - CERT_SLACK),
        angle=theta,
        skipped_samples=skipped,
    )


def circle_saturate(p: Polynomial, samples: int = DEFAULT_SAMPLES, *, workers: Optional[int] = None) -> SaturationReport:
    """Normalize, then move interior zeros (smallest modulus first) to the circle."""
    current, scale = normalize_to_class(p)
    initial = current
    roots = [z if abs(abs(z) - 1) > CIRCLE_TOL else z / abs(z) for z in _nonzero_roots(current)]
    trajectory = [rho(current).rho]
    steps = []
    for _ in range(p.degree() - 1):
        if all(abs(z) >= 1 - CIRCLE_TOL for z in roots):
            break
        step = _step(current, roots, None, samples, workers)
        if not step.certificate_ok:
            log.info("uncertified deformation step: rho %.12g -> %.12g for roots %s",
                        step.rho_before, step.rho_after, roots)
        steps.append(step)
        k = roots.index(step.moved_root_from)
        roots[k] = step.moved_root_to
        current = step.after
        trajectory.append(step.rho_after)
    final_roots = _nonzero_roots(current)
    on_circle = all(abs(abs(z) - 1) <= CIRCLE_TOL for z in final_roots)
    return SaturationReport(initial, scale, tuple(steps), current, tuple(trajectory), on_circle)


# ----------------------------------------------------------------------------
# asymptotic probe


@dataclass(frozen=True)
class SheetValue:
    kind: str  # "pole_sheet" | "finite_sheet"
    zeta: complex
    f: complex
    threshold: float
    holds: bool


@dataclass(frozen=True)
class ProbeRow:
    u: complex
    rho: float
    sheets: tuple[SheetValue, ...]


@dataclass(frozen=True)
class BlowupProbe:
    r: float
    rows: tuple[ProbeRow, ...]
    finite_ok: bool
    pole_ok: bool


def blowup_probe(family: VariationFamily, r: float, boundary_samples: int = 16) -> BlowupProbe:
    """Check ``|f| > |c_k|/2`` (finite sheets) and ``|f| > 1`` (pole sheet) on ``|u| = r``.

    Sheets are told apart by size: the critical point of largest modulus is on
    the pole sheet, the rest are matched to the nearest critical point of q.
    At small r this labelling is only nominal.
    """
    if r < 1:
        raise DeformError("blow-up probe needs r >= 1")
    xis = list(all_roots(family.dq).roots) if family.degree_n > 2 else []
    rows = []
    for k in range(boundary_samples):
        u = r * cmath.exp(2j * math.pi * k / boundary_samples)
        cps = _canonical_order(family.critical_points(u))
        pole = max(range(len(cps)), key=lambda i: abs(cps[i]))
        vals = []
        rhos = []
        for i, z in enumerate(cps):
            f = f_closed_form(family, u, z)
            rhos.append(abs(g_value(family, u, z)))
            if i == pole:
                vals.append(SheetValue("pole_sheet", z, f, 1.0, abs(f) > 1.0))
            else:
                xi = min(xis, key=lambda x: abs(z - x))
                thr = abs(sheet_limit(family, xi)) / 2
                vals.append(SheetValue("finite_sheet", z, f, thr, abs(f) > thr))
        rows.append(ProbeRow(u, float(min(rhos)), tuple(vals)))
    finite_ok = all(s.holds for row in rows for s in row.sheets if s.kind == "finite_sheet")
    pole_ok = all(s.holds for row in rows for s in row.sheets if s.kind == "pole_sheet")
    return BlowupProbe(float(r), tuple(rows), finite_ok, pole_ok)
