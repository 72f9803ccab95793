"""All roots of a complex polynomial by Aberth-Ehrlich iteration.

The inner loops are compiled with numba (``nogil`` so thread pools get real
parallelism).  ``all_roots`` is the user-facing entry point; the ``batch_*``
helpers work on stacks of same-degree polynomials and back the Monte Carlo
sweeps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .polycore import Polynomial, PolynomialError, derivative

MAX_SWEEPS = 200
EPS = np.finfo(float).eps
DEFAULT_CLUSTER_TOL = 1e-7


class RootFindError(ArithmeticError):
    """Root iteration failed to converge even after the restart."""


@dataclass(frozen=True)
class RootFindReport:
    roots: tuple[complex, ...]
    residuals: tuple[float, ...]
    iterations: int
    converged: bool

    @property
    def degree(self) -> int:
        return len(self.roots)


@njit(cache=True, nogil=True)
def _horner2(c, z):
    p = c[-1]
    dp = 0j
    for k in range(c.size - 2, -1, -1):
        dp = dp * z + p
        p = p * z + c[k]
    return p, dp


@njit(cache=True, nogil=True)
def _abs_horner(c, r):
    s = 0.0
    for k in range(c.size - 1, -1, -1):
        s = s * r + abs(c[k])
    return s


@njit(cache=True, nogil=True)
def _aberth_core(c, z, conv, max_sweeps):
    """Gauss-Seidel Aberth sweeps in place; returns sweeps used."""
    d = z.size
    for sweep in range(max_sweeps):
        done = True
        for i in range(d):
            if conv[i]:
                continue
            zi = z[i]
            p, dp = _horner2(c, zi)
            if abs(p) <= 8.0 * 2.220446049250313e-16 * _abs_horner(c, abs(zi)):
                conv[i] = True
                continue
            s = 0j
            for j in range(d):
                if j != i:
                    diff = zi - z[j]
                    if diff != 0:
                        s += 1.0 / diff
            if dp == 0:
                w = p / (1e-300 + abs(p)) * 1e-8 * (1.0 + abs(zi))
            else:
                ratio = p / dp
                w = ratio / (1.0 - ratio * s)
            z[i] = zi - w
            if abs(w) <= 2.220446049250313e-16 * (1.0 + abs(z[i])):
                conv[i] = True
            else:
                done = False
        if done:
            return sweep + 1
    return max_sweeps


@njit(cache=True, nogil=True)
def _polish(c, z):
    for i in range(z.size):
        zi = z[i]
        p, dp = _horner2(c, zi)
        for _ in range(8):
            if dp == 0 or p == 0:
                break
            step = p / dp
            cand = zi - step
            pc, dpc = _horner2(c, cand)
            if abs(pc) > abs(p):
                break
            zi, p, dp = cand, pc, dpc
            if abs(step) <= 1e-14 * (1.0 + abs(zi)):
                break
        z[i] = zi


@njit(cache=True, nogil=True)
def _roots_kernel(c, max_sweeps):
    """Roots of ascending coefficients ``c`` (leading nonzero, degree >= 1).

    Returns (roots, sweeps, converged).  Exact zero roots are split off first.
    """
    n = c.size - 1
    roots = np.zeros(n, dtype=np.complex128)
    nzero = 0
    while nzero < n and c[nzero] == 0:
        nzero += 1
    if nzero == n:
        return roots, 0, True
    a = c[nzero:] / c[-1]
    d = a.size - 1
    bound = 0.0
    for k in range(d):
        if abs(a[k]) > bound:
            bound = abs(a[k])
    radius = 1.0 + bound
    centre = -a[d - 1] / d
    total = 0
    ok = False
    for attempt in range(2):
        # restart: rotated and slightly enlarged circle
        rot = 0.4 + attempt * 1.3
        rad = radius * (1.0 + 0.25 * attempt)
        z = np.empty(d, dtype=np.complex128)
        for k in range(d):
            ang = 2.0 * np.pi * k / d + rot
            z[k] = centre + rad * (np.cos(ang) + 1j * np.sin(ang))
        conv = np.zeros(d, dtype=np.bool_)
        used = _aberth_core(a, z, conv, max_sweeps)
        total += used
        ok = True
        for k in range(d):
            if not conv[k]:
                ok = False
        if ok:
            break
    _polish(a, z)
    roots[nzero:] = z
    return roots, total, ok


@njit(cache=True, nogil=True)
def _batch_roots(C, max_sweeps):
    m, k = C.shape
    out = np.empty((m, k - 1), dtype=np.complex128)
    ok = np.empty(m, dtype=np.bool_)
    for i in range(m):
        r, _, conv = _roots_kernel(C[i], max_sweeps)
        out[i] = r
        ok[i] = conv
    return out, ok


def _residual_limit(c: np.ndarray, z: complex) -> float:
    # absolute contract for moderate roots, backward-error scale for large ones
    absc = np.abs(c)
    scale = float(np.polyval(absc[::-1], abs(z)))
    return max(1e-10 * (1.0 + float(absc.max())), 64 * EPS * scale)


def all_roots(p: Polynomial, *, strict: bool = False) -> RootFindReport:
    """All complex roots of ``p`` with multiplicity.

    ``strict=True`` raises :class:`RootFindError` instead of returning a
    report with ``converged=False``.
    """
    if p.is_zero():
        raise PolynomialError("the zero polynomial has no finite root set")
    if p.degree() < 1:
        raise PolynomialError("root finding needs degree >= 1")
    c = np.ascontiguousarray(p.coeffs)
    roots, sweeps, ok = _roots_kernel(c, MAX_SWEEPS)
    residuals = np.abs(np.polyval(c[::-1], roots))
    if ok:
        ok = all(res <= _residual_limit(c, z) for res, z in zip(residuals, roots))
    if strict and not ok:
        raise RootFindError(f"root iteration did not converge for {p!r}")
    return RootFindReport(
        roots=tuple(complex(z) for z in roots),
        residuals=tuple(float(r) for r in residuals),
        iterations=int(sweeps),
        converged=bool(ok),
    )


def critical_points(p: Polynomial, *, strict: bool = False) -> RootFindReport:
    if p.degree() < 2:
        raise PolynomialError("critical points need degree >= 2")
    return all_roots(derivative(p), strict=strict)


def batch_roots(coeffs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Roots of each row of an ascending coefficient matrix (same degree per row)."""
    C = np.ascontiguousarray(coeffs, dtype=np.complex128)
    if C.ndim != 2 or C.shape[1] < 2:
        raise PolynomialError("batch_roots needs a 2-D matrix with degree >= 1")
    if np.any(C[:, -1] == 0):
        raise PolynomialError("every row needs a nonzero leading coefficient")
    return _batch_roots(C, MAX_SWEEPS)


@dataclass(frozen=True)
class RootCluster:
    root: complex
    multiplicity: int


def cluster_multiplicities(report: RootFindReport, tol: float = DEFAULT_CLUSTER_TOL) -> list[RootCluster]:
    """Merge roots lying within ``tol`` of each other (single linkage).

    Multiple roots come back from the iteration spread at roughly
    ``eps**(1/m)``, so callers working with multiplicity m should pick ``tol``
    accordingly.
    """
    roots = list(report.roots)
    parent = list(range(len(roots)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(roots)):
        for j in range(i + 1, len(roots)):
            if abs(roots[i] - roots[j]) <= tol:
                parent[find(i)] = find(j)
    groups: dict[int, list[complex]] = {}
    for i, z in enumerate(roots):
        groups.setdefault(find(i), []).append(z)
    clusters = [RootCluster(complex(np.mean(g)), len(g)) for g in groups.values()]
    clusters.sort(key=lambda c: (round(c.root.real, 12), round(c.root.imag, 12)))
    return clusters
