"""The associated number rho(p) and the quantities built on it.

For ``p`` with ``p(0) = 0`` and ``p'(0) != 0``::

    rho(p, zeta) = |p(zeta) / (zeta * p'(0))|
    rho(p)       = min over critical points zeta of rho(p, zeta)

The conjectured sharp bound is ``(n - 1) / n``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .polycore import Polynomial, PolynomialError, derivative, evaluate, translate_to_origin
from .rootfind import MAX_SWEEPS, _roots_kernel, critical_points

ESSENTIAL_RTOL = 1e-9
SIMPLE_TOL = 1e-9
MONIC_TOL = 1e-12
CLASS_VALUE_TOL = 1e-10
SMALE_K = 4.0


class SmaleError(ValueError):
    """Precondition failure for a rho computation."""


class SmaleBoundViolation(AssertionError):
    """A computed quotient reached Smale's proven constant 4: a bug, not a finding."""


def conjectured_bound(n: int) -> float:
    return (n - 1) / n


def _critical_tol(p: Polynomial) -> float:
    return 1e-9 * (1.0 + derivative(p).max_abs_coeff())


def _value_over_zeta(p: Polynomial, zeta: complex) -> complex:
    # p(0) == 0, so p(z)/z is the Horner value of the shifted coefficients
    return evaluate(Polynomial(p.coeffs[1:]), zeta)


def rho_at(p: Polynomial, zeta: complex) -> float:
    """``|p(zeta) / (zeta p'(0))|`` at a critical point ``zeta`` of ``p``."""
    zeta = complex(zeta)
    c = p.coeffs
    if p.degree() < 2 or c[0] != 0:
        raise SmaleError("rho_at needs degree >= 2 and p(0) == 0")
    if c[1] == 0:
        raise SmaleError("rho_at needs p'(0) != 0")
    if zeta == 0:
        raise SmaleError("rho_at needs zeta != 0")
    res = abs(evaluate(derivative(p), zeta))
    if res > _critical_tol(p):
        raise SmaleError(f"{zeta!r} is not a critical point (|p'| = {res:.3e})")
    return abs(_value_over_zeta(p, zeta)) / abs(c[1])


@dataclass(frozen=True)
class CriticalPointRecord:
    zeta: complex
    derivative_residual: float
    rho: float
    essential: bool
    second_derivative: complex
    value: complex  # p(zeta), kept for the class check


@dataclass(frozen=True)
class ClassCheck:
    ok: bool
    violations: tuple[str, ...] = ()

    def __bool__(self):
        return self.ok


@dataclass(frozen=True)
class RhoReport:
    records: tuple[CriticalPointRecord, ...]
    rho: float
    essential_indices: tuple[int, ...]
    in_class: bool
    simple: bool
    margin: float
    degree: int
    diagnostics: tuple[str, ...] = ()

    @property
    def essential(self) -> tuple[CriticalPointRecord, ...]:
        return tuple(self.records[i] for i in self.essential_indices)


def is_in_class(p: Polynomial) -> ClassCheck:
    """Membership in F_n, naming every violated clause."""
    c = p.coeffs
    bad = []
    n = p.degree()
    if n < 2:
        return ClassCheck(False, ("degree < 2",))
    if abs(p.leading - 1) > MONIC_TOL:
        bad.append(f"not monic (leading coefficient {p.leading!r})")
    if c[0] != 0:
        bad.append(f"p(0) != 0 (p(0) = {complex(c[0])!r})")
    if abs(c[1]) <= MONIC_TOL:
        bad.append("p'(0) vanishes")
    for z in critical_points(p).roots:
        v = abs(evaluate(p, z))
        if v <= CLASS_VALUE_TOL:
            bad.append(f"p vanishes at critical point {z!r} (|p| = {v:.3e})")
    return ClassCheck(not bad, tuple(bad))


def rho(p: Polynomial) -> RhoReport:
    """Full report on ``rho(p)``: every critical point, the essential set, simplicity.

    Non-monic input is divided by its leading coefficient first (rho does not
    change).  Class violations are reported in ``in_class``/``diagnostics``
    rather than raised; only ``p(0) != 0`` and ``p'(0) == 0`` are fatal.
    """
    notes = []
    n = p.degree()
    if n < 2:
        raise SmaleError("rho needs degree >= 2")
    if p.coeffs[0] != 0:
        raise SmaleError("rho needs p(0) == 0")
    if abs(p.leading - 1) > MONIC_TOL:
        notes.append(f"normalized to monic (leading coefficient was {p.leading!r})")
        p = Polynomial(p.coeffs / p.leading)
    if abs(p.coeffs[1]) <= MONIC_TOL:
        raise SmaleError("rho needs p'(0) != 0")
    check = is_in_class(p)
    notes.extend(check.violations)

    dp = derivative(p)
    d2p = derivative(dp)
    a1 = abs(p.coeffs[1])
    raw = []
    for z in critical_points(p).roots:
        val = evaluate(p, z)
        r = abs(_value_over_zeta(p, z)) / a1
        raw.append((z, abs(evaluate(dp, z)), r, evaluate(d2p, z), val))
    best = min(r for _, _, r, _, _ in raw)
    cut = best * (1 + ESSENTIAL_RTOL) + 1e-300
    records = tuple(
        CriticalPointRecord(
            zeta=complex(z), derivative_residual=float(res), rho=float(r),
            essential=bool(r <= cut), second_derivative=complex(d2), value=complex(val),
        )
        for z, res, r, d2, val in raw
    )
    essential = tuple(i for i, rec in enumerate(records) if rec.essential)
    simple = all(abs(records[i].second_derivative) > SIMPLE_TOL for i in essential)
    return RhoReport(
        records=records,
        rho=float(best),
        essential_indices=essential,
        in_class=check.ok,
        simple=bool(simple),
        margin=float(conjectured_bound(n) - best),
        degree=n,
        diagnostics=tuple(notes),
    )


def smale_quotient(p: Polynomial, z0: complex) -> float:
    """``min_zeta |D(zeta, z0)| / |p'(z0)|`` over the critical points of ``p``."""
    z0 = complex(z0)
    d1 = evaluate(derivative(p), z0)
    if abs(d1) <= 1e-12 * (1.0 + p.max_abs_coeff()):
        raise SmaleError(f"p'(z0) vanishes at z0 = {z0!r}")
    shifted = translate_to_origin(p, z0)
    value = min(
        abs(_value_over_zeta(shifted, w)) / abs(shifted.coeffs[1])
        for w in critical_points(shifted).roots
    )
    if not value < SMALE_K:
        raise SmaleBoundViolation(f"quotient {value} >= 4 at z0 = {z0!r} for {p!r}")
    return float(value)


@njit(cache=True, nogil=True)
def _rho_of_roots(r):
    """(rho, in_class) for monic p = z * prod(z - r_j); r holds the nonzero roots."""
    m = r.size
    for j in range(m):
        if r[j] == 0:
            return 0.0, False
    s = np.zeros(m + 1, dtype=np.complex128)
    s[0] = 1.0
    for j in range(m):
        for k in range(j + 1, 0, -1):
            s[k] = s[k - 1] - r[j] * s[k]
        s[0] = -r[j] * s[0]
    # s is prod(z - r) in ascending order; p' coefficients are (k + 1) s[k]
    dp = np.empty(m + 1, dtype=np.complex128)
    for k in range(m + 1):
        dp[k] = (k + 1) * s[k]
    zs, _, _ = _roots_kernel(dp, MAX_SWEEPS)
    best = np.inf
    smallest_value = np.inf
    for i in range(zs.size):
        z = zs[i]
        prod = 1.0
        pv = abs(z)
        for j in range(m):
            prod *= abs(1.0 - z / r[j])
            pv *= abs(z - r[j])
        if prod < best:
            best = prod
        if pv < smallest_value:
            smallest_value = pv
    return best, smallest_value > 1e-10


@njit(cache=True, nogil=True)
def _batch_rho(R):
    b = R.shape[0]
    out = np.empty(b)
    ok = np.empty(b, dtype=np.bool_)
    for i in range(b):
        out[i], ok[i] = _rho_of_roots(R[i])
    return out, ok


def rho_of_roots(roots) -> tuple[float, bool]:
    """Fast ``rho`` for ``z * prod(z - r)`` given its nonzero roots."""
    r = np.ascontiguousarray(roots, dtype=np.complex128)
    value, ok = _rho_of_roots(r)
    return float(value), bool(ok)


def batch_rho(roots: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``rho`` and class flags for each row of nonzero roots."""
    R = np.ascontiguousarray(roots, dtype=np.complex128)
    if R.ndim != 2 or R.shape[1] < 1:
        raise PolynomialError("batch_rho needs a (batch, n - 1) root matrix")
    return _batch_rho(R)
