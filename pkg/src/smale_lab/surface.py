"""The variation family ``Q(z, u) = (z - u) q(z)`` and its critical-point surface.

One root ``z_n`` of ``p`` moves (it becomes the parameter ``u``) while
``q(z) = z * prod(z - z_j)`` stays fixed.  The critical points of ``Q(., u)``
solve ``q(w) + (w - u) q'(w) = 0``; over the u-plane they form an
(n - 1)-sheeted surface with projection ``phi(w) = w + q(w)/q'(w)``.

The transfer function ``f`` relates rho along a continued critical point to
rho at the start::

    rho(Q(., u), zeta(u)) = rho(p, zeta_0) * |f(u, zeta(u))|

and is available both as a path integral (``f_integral``) and in closed form
(``f_closed_form``).
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence, Union

import numpy as np

from .polycore import Polynomial, PolynomialError, derivative, evaluate, from_roots
from .rootfind import MAX_SWEEPS, _roots_kernel, all_roots, cluster_multiplicities
from .smale import is_in_class, rho_at

log = logging.getLogger(__name__)

# step control, as fractions of the segment parameter
INITIAL_STEP = 1e-2
MAX_STEP = 5e-2
MIN_STEP = 1e-13
MAX_NEWTON = 5
NEWTON_TOL = 1e-12
JUMP_FRACTION = 0.5
BRANCH_CLEARANCE = 1e-6
POLE_CLEARANCE = 1e-4
QUAD_TOL = 1e-8
DENOM_TOL = 1e-14

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(10)


class SurfaceError(ValueError):
    """Bad family, path or evaluation point."""


class ContinuationError(ArithmeticError):
    """The tracker could not follow the critical point."""


class IntegrandPoleError(ContinuationError):
    """The path passes too close to a pole of the transfer-function integrand."""


class AmbiguousSheetError(ArithmeticError):
    """Two sheets converge to the same critical point of q at infinity."""


def _canonical_order(values: Sequence[complex]) -> list[complex]:
    def key(z):
        ang = math.atan2(z.imag, z.real) % (2 * math.pi)
        return (round(abs(z), 9), round(ang, 9) % round(2 * math.pi, 9))

    return sorted((complex(v) for v in values), key=key)


# ----------------------------------------------------------------------------
# family


@dataclass(frozen=True)
class VariationFamily:
    q: Polynomial
    fixed_roots: tuple[complex, ...]
    base_u: complex
    anchor_zeta: complex
    degree_n: int

    @cached_property
    def dq(self) -> Polynomial:
        return derivative(self.q)

    @cached_property
    def d2q(self) -> Polynomial:
        return derivative(self.dq)

    @cached_property
    def _dq_parts(self) -> tuple[np.ndarray, np.ndarray]:
        # Q'(z, u) = (q + z q') - u q'
        n = self.degree_n
        a = np.zeros(n, dtype=np.complex128)
        b = np.zeros(n, dtype=np.complex128)
        qc, dqc = self.q.coeffs, self.dq.coeffs
        a[: qc.size] += qc
        a[1 : dqc.size + 1] += dqc
        b[: dqc.size] = dqc
        return a, b

    def Q(self, u: complex) -> Polynomial:
        return Polynomial([-complex(u), 1.0]) * self.q

    def dQ(self, u: complex) -> Polynomial:
        a, b = self._dq_parts
        return Polynomial(a - complex(u) * b)

    def critical_points(self, u: complex) -> np.ndarray:
        """All critical points of ``Q(., u)`` (unordered)."""
        a, b = self._dq_parts
        roots, _, _ = _roots_kernel(a - complex(u) * b, MAX_SWEEPS)
        return roots

    @cached_property
    def _qlist(self) -> tuple[complex, ...]:
        return tuple(complex(a) for a in self.q.coeffs[::-1])

    def qvals(self, w: complex) -> tuple[complex, complex, complex]:
        """``q(w), q'(w), q''(w)`` in one Horner pass."""
        w = complex(w)
        c = self._qlist
        p = c[0]
        d1 = 0j
        d2 = 0j
        for a in c[1:]:
            d2 = d2 * w + d1
            d1 = d1 * w + p
            p = p * w + a
        return p, d1, 2 * d2

    def residual(self, w: complex, u: complex) -> float:
        q, dq, _ = self.qvals(w)
        return abs(q + (w - u) * dq)

    def residual_bound(self, u: complex) -> float:
        return 1e-10 * (1.0 + abs(u)) ** self.degree_n

    def prefactor(self, zeta_start: Optional[complex] = None) -> complex:
        """``z_n zeta_0 q'(zeta_0) / q(zeta_0)^2`` normalizing f to 1 at the start."""
        z0 = self.anchor_zeta if zeta_start is None else complex(zeta_start)
        q0, dq0, _ = self.qvals(z0)
        if abs(q0) < DENOM_TOL:
            raise SurfaceError("q vanishes at the start critical point")
        return self.base_u * z0 * dq0 / q0**2

    @cached_property
    def branch_data(self) -> tuple[tuple[complex, ...], tuple[complex, ...]]:
        if self.degree_n < 3:
            return (), ()
        dq, d2q = self.dq, self.d2q
        cond = 2 * dq * dq - self.q * d2q
        rep = all_roots(cond)
        if not rep.converged:
            raise ContinuationError("branch-point root finding did not converge")
        pts = tuple(_canonical_order(rep.roots))
        return pts, tuple(phi(self, w) for w in pts)


def build_family(
    p: Polynomial,
    moving_root_index: Optional[int] = None,
    anchor_index: Optional[int] = None,
    *,
    moving_root: Optional[complex] = None,
    anchor: Optional[complex] = None,
) -> VariationFamily:
    """Split ``p = (z - z_n) q`` and pick a start critical point.

    Roots and critical points are indexed in canonical order (modulus, then
    angle in [0, 2pi)).  Value keywords pick the nearest root / critical point.
    The moving root defaults to the one of smallest modulus, the anchor to
    index 0.
    """
    n = p.degree()
    if n < 2:
        raise SurfaceError("a variation family needs degree >= 2")
    if p.leading != 1:
        p = Polynomial(p.coeffs / p.leading)
    check = is_in_class(p)
    if not check:
        raise SurfaceError("polynomial not in class: " + "; ".join(check.violations))
    rep = all_roots(Polynomial(p.coeffs[1:]), strict=True)
    if any(c.multiplicity > 1 for c in cluster_multiplicities(rep)):
        raise SurfaceError("p has a multiple root")
    roots = _canonical_order(rep.roots)
    if moving_root is not None:
        k = int(np.argmin([abs(r - complex(moving_root)) for r in roots]))
    elif moving_root_index is not None:
        k = moving_root_index
    else:
        k = 0
    zn = roots[k]
    fixed = tuple(roots[:k] + roots[k + 1 :])
    q = from_roots(fixed, 1.0)
    proto = VariationFamily(q, fixed, zn, 0j, n)
    cps = _canonical_order(proto.critical_points(zn))
    if anchor is not None:
        j = int(np.argmin([abs(c - complex(anchor)) for c in cps]))
    else:
        j = anchor_index or 0
    fam = VariationFamily(q, fixed, zn, cps[j], n)
    qa, _, _ = fam.qvals(fam.anchor_zeta)
    if abs(qa * (fam.anchor_zeta - zn)) <= 1e-10:
        raise SurfaceError("p vanishes at the anchor critical point")
    return fam


def family_from_roots(fixed_roots: Sequence[complex], base_u: complex, anchor: complex) -> VariationFamily:
    """Family ``(z - u) z prod(z - z_j)`` with explicitly given data."""
    fixed = tuple(complex(z) for z in fixed_roots)
    q = from_roots(fixed, 1.0)
    proto = VariationFamily(q, fixed, complex(base_u), 0j, len(fixed) + 2)
    cps = proto.critical_points(base_u)
    z0 = complex(cps[int(np.argmin(np.abs(cps - complex(anchor))))])
    return VariationFamily(q, fixed, complex(base_u), z0, len(fixed) + 2)


def phi(family: VariationFamily, w: complex) -> complex:
    """Projection ``w + q(w)/q'(w)``: the parameter u for which w is critical."""
    w = complex(w)
    q, dq, _ = family.qvals(w)
    if abs(dq) <= DENOM_TOL * (1.0 + abs(q)):
        raise SurfaceError(f"phi has a pole at {w!r} (critical point of q)")
    return w + q / dq


def zeta_prime(family: VariationFamily, w: complex, u: complex) -> complex:
    """Implicit-function derivative of the critical point w.r.t. u."""
    q, dq, d2q = family.qvals(w)
    den = 2 * dq + (w - u) * d2q
    if den == 0:
        raise ContinuationError(f"branch point hit at u = {u!r}")
    return dq / den


# ----------------------------------------------------------------------------
# atlas


@dataclass(frozen=True)
class SheetInfo:
    kind: str  # "pole_sheet" | "finite_sheet"
    start_zeta: complex
    end_zeta: complex
    xi: Optional[complex] = None
    c: Optional[complex] = None
    u_over_zeta_limit: Optional[float] = None
    growth_exponent: Optional[float] = None


@dataclass(frozen=True)
class SurfaceAtlas:
    branch_points: tuple[complex, ...]
    branch_projections: tuple[complex, ...]
    sheet_count: int
    sheets_at_infinity: tuple[SheetInfo, ...]
    branch_residuals: tuple[float, ...] = ()


def branch_points(family: VariationFamily, *, with_sheets: bool = True) -> SurfaceAtlas:
    """Roots of ``2 q'^2 - q q''`` and their projections, plus the sheets at infinity."""
    pts, proj = family.branch_data
    res = tuple(
        float(abs(2 * dq * dq - q * d2q)) for q, dq, d2q in (family.qvals(w) for w in pts)
    )
    sheets = classify_sheets_at_infinity(family) if with_sheets else ()
    return SurfaceAtlas(pts, proj, family.degree_n - 1, tuple(sheets), res)


# ----------------------------------------------------------------------------
# paths


@dataclass(frozen=True)
class LineSegment:
    a: complex
    b: complex

    def point(self, t: float) -> complex:
        return self.a + (self.b - self.a) * t

    def velocity(self, t: float) -> complex:
        return self.b - self.a

    @property
    def start(self) -> complex:
        return self.a

    @property
    def end(self) -> complex:
        return self.b

    @property
    def length(self) -> float:
        return abs(self.b - self.a)

    def distance_to(self, z: complex) -> float:
        d = self.b - self.a
        if d == 0:
            return abs(z - self.a)
        t = ((z - self.a) * d.conjugate()).real / abs(d) ** 2
        return abs(z - self.point(min(1.0, max(0.0, t))))

    def reversed(self) -> "LineSegment":
        return LineSegment(self.b, self.a)


@dataclass(frozen=True)
class ArcSegment:
    """Arc ``center + radius e^{i theta}``, theta from ``from_angle`` to ``to_angle + 2 pi turns``."""

    center: complex
    radius: float
    from_angle: float
    to_angle: float
    turns: int = 0

    @property
    def sweep(self) -> float:
        return self.to_angle + 2 * math.pi * self.turns - self.from_angle

    def point(self, t: float) -> complex:
        return self.center + self.radius * cmath.exp(1j * (self.from_angle + self.sweep * t))

    def velocity(self, t: float) -> complex:
        return 1j * self.sweep * self.radius * cmath.exp(1j * (self.from_angle + self.sweep * t))

    @property
    def start(self) -> complex:
        return self.point(0.0)

    @property
    def end(self) -> complex:
        return self.point(1.0)

    @property
    def length(self) -> float:
        return abs(self.sweep) * self.radius

    def distance_to(self, z: complex) -> float:
        rel = z - self.center
        if abs(self.sweep) >= 2 * math.pi or rel == 0:
            return abs(abs(rel) - self.radius) if rel != 0 else self.radius
        ang = cmath.phase(rel)
        lo = min(self.from_angle, self.from_angle + self.sweep)
        k = math.ceil((lo - ang) / (2 * math.pi))
        if ang + 2 * math.pi * k <= lo + abs(self.sweep):
            return abs(abs(rel) - self.radius)
        return min(abs(z - self.start), abs(z - self.end))

    def reversed(self) -> "ArcSegment":
        total = self.from_angle + self.sweep
        return ArcSegment(self.center, self.radius, total, self.from_angle, 0)


Segment = Union[LineSegment, ArcSegment]


@dataclass(frozen=True)
class PathSpec:
    segments: tuple[Segment, ...]
    start_point: complex
    samples_hint: int = 0

    @classmethod
    def polyline(cls, waypoints: Sequence[complex]) -> "PathSpec":
        pts = [complex(w) for w in waypoints]
        if not pts:
            raise SurfaceError("a path needs at least one waypoint")
        segs = tuple(LineSegment(a, b) for a, b in zip(pts, pts[1:]) if a != b)
        return cls(segs, pts[0])

    @classmethod
    def arc(cls, center: complex, radius: float, from_angle: float, to_angle: float, turns: int = 0) -> "PathSpec":
        seg = ArcSegment(complex(center), float(radius), float(from_angle), float(to_angle), int(turns))
        return cls((seg,), seg.start)

    @property
    def start(self) -> complex:
        return self.start_point

    @property
    def end(self) -> complex:
        return self.segments[-1].end if self.segments else self.start_point

    def __add__(self, other: "PathSpec") -> "PathSpec":
        join = ()
        if other.start != self.end:
            join = (LineSegment(self.end, other.start),)
        return PathSpec(self.segments + join + other.segments, self.start_point,
                        max(self.samples_hint, other.samples_hint))

    def reversed(self) -> "PathSpec":
        return PathSpec(tuple(s.reversed() for s in reversed(self.segments)), self.end, self.samples_hint)

    def distance_to(self, z: complex) -> float:
        if not self.segments:
            return abs(z - self.start_point)
        return min(s.distance_to(z) for s in self.segments)


def lasso(base: complex, center: complex, radius: float, turns: int = 1) -> PathSpec:
    """Closed loop at ``base``: out to the circle, ``turns`` times around it, back."""
    base, center = complex(base), complex(center)
    ang = cmath.phase(base - center) if base != center else 0.0
    touch = center + radius * cmath.exp(1j * ang)
    out = PathSpec.polyline([base, touch])
    loop = PathSpec.arc(center, radius, ang, ang, turns)
    return out + loop + PathSpec.polyline([touch, base])


def _check_path(family: VariationFamily, path: PathSpec) -> float:
    _, proj = family.branch_data
    dist = min((path.distance_to(b) for b in proj), default=math.inf)
    if dist < BRANCH_CLEARANCE:
        raise SurfaceError(f"path passes within {dist:.2e} of a branch projection")
    return dist


# ----------------------------------------------------------------------------
# continuation


@dataclass(frozen=True)
class TraceSample:
    u: complex
    zeta: complex
    residual: float


@dataclass(frozen=True)
class ContinuationTrace:
    samples: tuple[TraceSample, ...]
    f_closed: Optional[complex]
    f_integral: Optional[complex]
    g_value: Optional[complex]
    rho_endpoint: Optional[float]
    step_count: int
    min_branch_distance: float
    integral: Optional[complex] = None
    rejected_steps: int = 0

    @property
    def start(self) -> TraceSample:
        return self.samples[0]

    @property
    def end(self) -> TraceSample:
        return self.samples[-1]


class _Tracker:
    def __init__(self, family: VariationFamily, with_integral: bool):
        self.fam = family
        self.with_integral = with_integral
        self.integral = 0j
        self.rejected = 0
        self.steps = 0

    def newton(self, w: complex, u: complex, max_iter: int = MAX_NEWTON) -> Optional[complex]:
        fam = self.fam
        for _ in range(max_iter):
            q, dq, d2q = fam.qvals(w)
            F = q + (w - u) * dq
            Fw = 2 * dq + (w - u) * d2q
            if Fw == 0:
                return None
            dw = F / Fw
            w = w - dw
            if abs(dw) <= NEWTON_TOL * (1.0 + abs(w)):
                return w
        return None

    def dzdt(self, seg: Segment, t: float, w: complex) -> complex:
        u = seg.point(t)
        return zeta_prime(self.fam, w, u) * seg.velocity(t)

    def predict(self, seg: Segment, t: float, w: complex, h: float) -> complex:
        k1 = self.dzdt(seg, t, w)
        k2 = self.dzdt(seg, t + h / 2, w + h / 2 * k1)
        k3 = self.dzdt(seg, t + h / 2, w + h / 2 * k2)
        k4 = self.dzdt(seg, t + h, w + h * k3)
        return w + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)

    def min_gap(self, u: complex) -> float:
        if self.fam.degree_n < 3:
            return math.inf
        cps = self.fam.critical_points(u)
        d = np.abs(cps[:, None] - cps[None, :])
        d[np.diag_indices_from(d)] = np.inf
        return float(d.min())

    def track_segment(self, seg: Segment, w: complex, out: list) -> complex:
        t = 0.0
        h = INITIAL_STEP
        streak = 0
        while t < 1.0:
            h = min(h, 1.0 - t)
            try:
                guess = self.predict(seg, t, w, h)
            except ContinuationError:
                guess = None
            t_new = 1.0 if t + h >= 1.0 - 1e-15 else t + h
            u_new = seg.point(t_new)
            w_new = None if guess is None else self.newton(guess, u_new)
            if w_new is not None and abs(w_new - guess) > JUMP_FRACTION * self.min_gap(u_new):
                w_new = None
            if w_new is None:
                self.rejected += 1
                h *= 0.5
                streak = 0
                if h < MIN_STEP:
                    raise ContinuationError(f"step underflow near u = {seg.point(t)!r}")
                continue
            if self.with_integral:
                self.integral += self.integrate_step(seg, t, t_new, w, w_new)
            t, w = t_new, w_new
            self.steps += 1
            out.append(TraceSample(complex(u_new), complex(w), float(self.fam.residual(w, u_new))))
            streak += 1
            if streak >= 3:
                h = min(2 * h, MAX_STEP)
                streak = 0
        return w

    # integral of zeta/((zeta - v) v) dv over one accepted step

    def integrate_step(self, seg: Segment, t0: float, t1: float, w0: complex, w1: complex) -> complex:
        dt = t1 - t0
        d0 = self.dzdt(seg, t0, w0) * dt
        d1 = self.dzdt(seg, t1, w1) * dt
        scale = abs(w1 - w0) + 1e-12 * (1 + abs(w0))

        def zeta_at(t):
            s = (t - t0) / dt
            h00 = 2 * s**3 - 3 * s**2 + 1
            h10 = s**3 - 2 * s**2 + s
            h01 = -2 * s**3 + 3 * s**2
            h11 = s**3 - s**2
            guess = h00 * w0 + h10 * d0 + h01 * w1 + h11 * d1
            v = seg.point(t)
            z = self.newton(guess, v, max_iter=12)
            if z is None or abs(z - guess) > 0.5 * scale + 1e-10:
                raise ContinuationError(f"quadrature node lost the sheet at u = {v!r}")
            return v, z

        def gl(a, b):
            mid, half = (a + b) / 2, (b - a) / 2
            acc = 0j
            for x, wt in zip(_GL_NODES, _GL_WEIGHTS):
                t = mid + half * x
                v, z = zeta_at(t)
                if abs(v) < POLE_CLEARANCE or abs(z - v) < POLE_CLEARANCE:
                    raise IntegrandPoleError(f"integrand pole within {POLE_CLEARANCE} of u = {v!r}")
                acc += wt * z / ((z - v) * v) * seg.velocity(t)
            return acc * half

        def adapt(a, b, whole, depth):
            m = (a + b) / 2
            left, right = gl(a, m), gl(m, b)
            if abs(left + right - whole) <= QUAD_TOL * (b - a) / dt * max(1.0, abs(whole)) or depth >= 12:
                return left + right
            return adapt(a, m, left, depth + 1) + adapt(m, b, right, depth + 1)

        return adapt(t0, t1, gl(t0, t1), 0)


def continue_critical_point(
    family: VariationFamily,
    path: PathSpec,
    *,
    zeta_start: Optional[complex] = None,
    with_integral: bool = True,
) -> ContinuationTrace:
    """Track the critical point ``zeta(u)`` of ``Q(., u)`` along ``path``.

    The path must start at ``family.base_u``; the tracked sheet starts at the
    anchor unless ``zeta_start`` names another critical point of
    ``Q(., base_u)``.  With ``with_integral`` the transfer-function integral is
    accumulated alongside (and the path must then keep clear of u = 0 and of
    zeta(u) = u).
    """
    if abs(path.start - family.base_u) > 1e-9 * (1 + abs(family.base_u)):
        raise SurfaceError("path must start at the family's base point")
    clearance = _check_path(family, path)
    w0 = family.anchor_zeta if zeta_start is None else complex(zeta_start)
    tr = _Tracker(family, with_integral)
    w = tr.newton(w0, family.base_u, max_iter=20)
    if w is None:
        raise SurfaceError(f"{w0!r} is not a critical point of Q(., base_u)")
    samples = [TraceSample(family.base_u, complex(w), float(family.residual(w, family.base_u)))]
    for seg in path.segments:
        if seg.length == 0:
            continue
        w = tr.track_segment(seg, w, samples)
    return _finish_trace(family, samples, tr, clearance)


def _finish_trace(family, samples, tr: _Tracker, clearance: float) -> ContinuationTrace:
    start, end = samples[0], samples[-1]
    try:
        fc = f_closed_form(family, end.u, end.zeta, zeta_start=start.zeta)
    except SurfaceError:
        fc = None
    try:
        g = g_value(family, end.u, end.zeta)
    except SurfaceError:
        g = None
    fi = None
    integral = None
    if tr.with_integral:
        integral = tr.integral
        fi = start.zeta / end.zeta * cmath.exp(-integral)
    return ContinuationTrace(
        samples=tuple(samples),
        f_closed=fc,
        f_integral=fi,
        g_value=g,
        rho_endpoint=None if g is None else abs(g),
        step_count=tr.steps,
        min_branch_distance=clearance,
        integral=integral,
        rejected_steps=tr.rejected,
    )


def continue_all(family: VariationFamily, path: PathSpec, *, with_integral: bool = False) -> list[ContinuationTrace]:
    """One trace per critical point of ``Q(., base_u)``, in canonical order."""
    starts = _canonical_order(family.critical_points(family.base_u))
    return [
        continue_critical_point(family, path, zeta_start=z, with_integral=with_integral)
        for z in starts
    ]


# ----------------------------------------------------------------------------
# transfer function


def f_closed_form(
    family: VariationFamily, u: complex, zeta_u: complex, *, zeta_start: Optional[complex] = None
) -> complex:
    u, z = complex(u), complex(zeta_u)
    q, dq, _ = family.qvals(z)
    if abs(u) < DENOM_TOL or abs(z) < DENOM_TOL or abs(dq) < DENOM_TOL:
        raise SurfaceError(f"f denominator vanishes at u = {u!r}, zeta = {z!r}")
    return family.prefactor(zeta_start) * q * q / (u * z * dq)


def f_integral(family: VariationFamily, trace: ContinuationTrace) -> complex:
    """``(zeta_0 / zeta(u)) exp(-integral)`` from a trace tracked with the integral on."""
    if trace.integral is None:
        raise SurfaceError("trace was tracked without the integral")
    return trace.start.zeta / trace.end.zeta * cmath.exp(-trace.integral)


def g_value(family: VariationFamily, u: complex, zeta_u: complex) -> complex:
    """``(zeta/u - 1) prod(zeta/z_j - 1)``; its modulus is rho(Q(., u), zeta)."""
    u, z = complex(u), complex(zeta_u)
    if u == 0:
        raise SurfaceError("g is undefined at u = 0")
    g = z / u - 1
    for zj in family.fixed_roots:
        if zj == 0:
            raise SurfaceError("fixed roots must be nonzero")
        g *= z / zj - 1
    return g


def rho_identity_check(family: VariationFamily, trace: ContinuationTrace) -> float:
    """``|rho(Q(., u), zeta(u)) - rho(p, zeta_0) |f(u, zeta(u))||`` at the trace end."""
    start, end = trace.start, trace.end
    direct = rho_at(family.Q(end.u), end.zeta)
    base = rho_at(family.Q(start.u), start.zeta)
    f = f_closed_form(family, end.u, end.zeta, zeta_start=start.zeta)
    return abs(direct - base * abs(f))


# ----------------------------------------------------------------------------
# monodromy and infinity


@dataclass(frozen=True)
class Monodromy:
    permutation: tuple[int, ...]
    start_points: tuple[complex, ...]
    end_points: tuple[complex, ...]

    def compose(self, after: "Monodromy") -> tuple[int, ...]:
        """Permutation of this loop followed by ``after``."""
        return tuple(after.permutation[i] for i in self.permutation)

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.permutation))


def monodromy(family: VariationFamily, loop: PathSpec) -> Monodromy:
    """Sheet permutation from continuing every critical point around ``loop``.

    ``permutation[i] = j`` means the sheet starting at critical point i (in
    canonical order) ends at critical point j.
    """
    if abs(loop.end - loop.start) > 1e-9 * (1 + abs(loop.start)):
        raise SurfaceError("monodromy needs a closed loop")
    starts = _canonical_order(family.critical_points(family.base_u))
    traces = [
        continue_critical_point(family, loop, zeta_start=z, with_integral=False) for z in starts
    ]
    ends = [t.end.zeta for t in traces]
    gap = min(
        (abs(a - b) for i, a in enumerate(starts) for b in starts[i + 1 :]), default=math.inf
    )
    perm = []
    for e in ends:
        d = [abs(e - s) for s in starts]
        j = int(np.argmin(d))
        if d[j] > 0.25 * gap:
            raise ContinuationError("loop endpoint does not match any start critical point")
        perm.append(j)
    if sorted(perm) != list(range(len(starts))):
        raise ContinuationError(f"continuation produced a non-bijective map {perm}")
    return Monodromy(tuple(perm), tuple(starts), tuple(complex(e) for e in ends))


def _ray_to_infinity(family: VariationFamily, radius: float) -> PathSpec:
    base = family.base_u
    direction = base / abs(base) if base != 0 else 1.0
    for tilt in (0.0, 0.05, -0.05, 0.1, -0.1, 0.2, -0.2):
        d = direction * cmath.exp(1j * tilt)
        pts = [base]
        r = max(2.0, 2 * abs(base))
        while r < radius:
            pts.append(d * r)
            r *= 10
        pts.append(d * radius)
        path = PathSpec.polyline(pts)
        try:
            _check_path(family, path)
            return path
        except SurfaceError:
            continue
    raise SurfaceError("no admissible ray to infinity found")


def classify_sheets_at_infinity(family: VariationFamily, radius: float = 1e4) -> list[SheetInfo]:
    """Follow every sheet out to ``|u| = radius`` and identify its limit.

    The sheet whose critical point escapes is the pole sheet; every other sheet
    is matched to the critical point ``xi_k`` of q it converges to, with
    ``c_k = f(infinity_k) = prefactor * q(xi_k) / xi_k`` (from ``u q'(zeta) -> q(xi_k)``).
    """
    path = _ray_to_infinity(family, radius)
    traces = continue_all(family, path)
    ends = [t.end for t in traces]
    pole = int(np.argmax([abs(e.zeta) for e in ends]))
    xis = _canonical_order(all_roots(family.dq).roots) if family.degree_n > 2 else []
    K = family.prefactor()
    out = []
    used = {}
    for i, (tr, e) in enumerate(zip(traces, ends)):
        if i == pole:
            ratio = e.u / e.zeta
            growth = _growth_exponent(family, tr)
            log.info("pole sheet: u/zeta -> %.6f, |f| growth exponent %s (expected %d)",
                     ratio.real, growth, family.degree_n - 2)
            out.append(SheetInfo("pole_sheet", tr.start.zeta, e.zeta,
                                 u_over_zeta_limit=float(ratio.real), growth_exponent=growth))
            continue
        d = [abs(e.zeta - x) for x in xis]
        k = int(np.argmin(d))
        if k in used or d[k] > 1e-2 * (1 + abs(xis[k])):
            raise AmbiguousSheetError(f"sheet {i} does not converge to a distinct critical point of q")
        used[k] = i
        xi = xis[k]
        out.append(SheetInfo("finite_sheet", tr.start.zeta, e.zeta, xi=xi, c=sheet_limit(family, xi)))
    return out


def sheet_limit(family: VariationFamily, xi: complex) -> complex:
    """Value of f at infinity on the finite sheet whose critical point tends to ``xi``."""
    return complex(family.prefactor() * evaluate(family.q, xi) / xi)


def _growth_exponent(family: VariationFamily, trace: ContinuationTrace) -> Optional[float]:
    # slope of log|f| against log|u| over the outer decade of the trace
    pts = [s for s in trace.samples if abs(s.u) >= 0.1 * abs(trace.end.u)]
    a, b = pts[0], pts[-1]
    if abs(b.u) <= abs(a.u):
        return None
    fa = f_closed_form(family, a.u, a.zeta)
    fb = f_closed_form(family, b.u, b.zeta)
    return math.log(abs(fb) / abs(fa)) / math.log(abs(b.u) / abs(a.u))
