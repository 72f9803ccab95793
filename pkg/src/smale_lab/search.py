"""Multi-start Nelder-Mead search for polynomials maximizing rho.

The free search moves all n - 1 nonzero roots (2(n - 1) real parameters);
the circle search keeps them on the unit circle and moves only their angles.
Each start draws from its own generator seeded by ``(seed, start_index)`` so
results do not depend on how starts are scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numba import njit

from .parallel import ordered_map
from .polycore import Polynomial, from_roots
from .smale import _rho_of_roots, conjectured_bound, rho


@dataclass(frozen=True)
class SearchConfig:
    degree: int
    starts: int = 64
    max_iterations: int = 4000
    seed: int = 0
    simplex_tolerance: float = 1e-8
    circle_only: bool = False
    extremal_tol: float = 1e-3
    restarts: int = 6
    polish_count: int = 4
    polish_rounds: int = 300

    def __post_init__(self):
        if self.degree < 2:
            raise ValueError("degree must be >= 2")
        if self.starts < 1:
            raise ValueError("starts must be >= 1")


@dataclass(frozen=True)
class SearchResult:
    degree: int
    best_rho: float
    best_roots: tuple[complex, ...]
    objective_evaluations: int
    extremal_form: bool
    gap_to_bound: float
    best_start: int
    circle_only: bool


@dataclass(frozen=True)
class NelderMeadResult:
    x: np.ndarray
    fun: float
    nfev: int
    nit: int
    converged: bool


@njit(cache=True, nogil=True)
def _nelder_mead(mode, x0, basis, step, tol, max_iter, alpha, gamma, rho_c, sigma):
    dim = x0.size
    simplex = np.empty((dim + 1, dim))
    values = np.empty(dim + 1)
    for i in range(dim + 1):
        simplex[i] = x0
        if i > 0:
            simplex[i] += step * basis[i - 1]
        values[i] = _objective(mode, simplex[i])
    nfev = dim + 1
    it = 0
    converged = False
    while it < max_iter:
        order = np.argsort(values, kind="mergesort")
        simplex = simplex[order]
        values = values[order]
        diam = 0.0
        for i in range(1, dim + 1):
            d = np.sqrt(np.sum((simplex[i] - simplex[0]) ** 2))
            if d > diam:
                diam = d
        if diam < tol:
            converged = True
            break
        it += 1
        centroid = np.zeros(dim)
        for i in range(dim):
            centroid += simplex[i]
        centroid /= dim
        worst = simplex[dim].copy()
        xr = centroid + alpha * (centroid - worst)
        fr = _objective(mode, xr)
        nfev += 1
        if fr < values[0]:
            xe = centroid + gamma * (xr - centroid)
            fe = _objective(mode, xe)
            nfev += 1
            if fe < fr:
                simplex[dim] = xe
                values[dim] = fe
            else:
                simplex[dim] = xr
                values[dim] = fr
            continue
        if fr < values[dim - 1]:
            simplex[dim] = xr
            values[dim] = fr
            continue
        if fr < values[dim]:
            xc = centroid + rho_c * (xr - centroid)
            fc = _objective(mode, xc)
            nfev += 1
            if fc <= fr:
                simplex[dim] = xc
                values[dim] = fc
                continue
        else:
            xc = centroid + rho_c * (worst - centroid)
            fc = _objective(mode, xc)
            nfev += 1
            if fc < values[dim]:
                simplex[dim] = xc
                values[dim] = fc
                continue
        for i in range(1, dim + 1):
            simplex[i] = simplex[0] + sigma * (simplex[i] - simplex[0])
            values[i] = _objective(mode, simplex[i])
        nfev += dim
    best = np.argmin(values)
    return simplex[best].copy(), values[best], nfev, it, converged


OBJECTIVES = {"rho": 0, "rho_circle": 1, "rosenbrock": 2, "sphere": 3}


def nelder_mead(
    objective: str,
    x0,
    *,
    step: float = 0.1,
    basis=None,
    tol: float = 1e-8,
    max_iter: int = 4000,
    alpha: float = 1.0,
    gamma: float = 2.0,
    rho_c: float = 0.5,
    sigma: float = 0.5,
) -> NelderMeadResult:
    """Minimize one of the compiled ``OBJECTIVES`` from ``x0``.

    ``"rho"`` and ``"rho_circle"`` are minus rho of the roots encoded in x
    (interleaved real/imaginary parts, resp. angles on the unit circle); the
    other two are smooth test functions.  The initial simplex is ``x0`` plus
    ``step`` times each row of ``basis`` (default: the coordinate axes).
    Stops when every vertex lies within ``tol`` of the best one, or after
    ``max_iter`` iterations.
    """
    mode = OBJECTIVES[objective]
    x0 = np.ascontiguousarray(x0, dtype=float)
    basis = np.eye(x0.size) if basis is None else np.ascontiguousarray(basis, dtype=float)
    x, f, nfev, nit, conv = _nelder_mead(mode, x0, basis, float(step), float(tol), int(max_iter),
                                         alpha, gamma, rho_c, sigma)
    return NelderMeadResult(x, float(f), int(nfev), int(nit), bool(conv))


@njit(cache=True, nogil=True)
def _objective(mode, x):
    if mode == 0:
        m = x.size // 2
        r = np.empty(m, dtype=np.complex128)
        scale = 0.0
        for j in range(m):
            r[j] = x[2 * j] + 1j * x[2 * j + 1]
            scale = max(scale, abs(r[j]))
        if scale == 0.0 or not np.isfinite(scale):
            return 0.0
        # rho is scale invariant; evaluate on the unit-disk representative
        value, ok = _rho_of_roots(r / scale)
        return -value if ok else 0.0
    if mode == 1:
        value, ok = _rho_of_roots(np.exp(1j * x))
        return -value if ok else 0.0
    if mode == 2:
        s = 0.0
        for i in range(x.size - 1):
            s += 100.0 * (x[i + 1] - x[i] ** 2) ** 2 + (1.0 - x[i]) ** 2
        return s
    return np.sum(x * x)


def _roots_from_params(x: np.ndarray, circle_only: bool) -> np.ndarray:
    if circle_only:
        return np.exp(1j * x)
    return x[0::2] + 1j * x[1::2]


def _start_point(config: SearchConfig, index: int) -> np.ndarray:
    rng = np.random.default_rng([config.seed, index])
    m = config.degree - 1
    if config.circle_only:
        if index == 0:
            base = 2 * math.pi * np.arange(m) / m
            return base + 0.1 * rng.uniform(-1, 1, m)
        return rng.uniform(0, 2 * math.pi, m)
    if index == 0:
        # roots of z^(n-1) = 1, i.e. p = z^n - z, perturbed by 10%
        roots = np.exp(2j * math.pi * np.arange(m) / m)
        roots = roots * (1 + 0.1 * _disk(rng, m))
    else:
        roots = 1.5 * _disk(rng, m)
    x = np.empty(2 * m)
    x[0::2], x[1::2] = roots.real, roots.imag
    return x


def _disk(rng, m: int) -> np.ndarray:
    return np.sqrt(rng.uniform(0, 1, m)) * np.exp(2j * math.pi * rng.uniform(0, 1, m))


def _restarts(fun, x: np.ndarray, value: float, rng, rounds: int, budget: int, tol: float):
    """Rotated-simplex restarts around the incumbent; stops after a full quiet cycle."""
    nfev = 0
    quiet = 0
    for k in range(rounds):
        if budget <= 0 or quiet >= 2 * len(_RESTART_STEPS):
            break
        basis = np.linalg.qr(rng.normal(size=(x.size, x.size)))[0]
        step = _RESTART_STEPS[k % len(_RESTART_STEPS)]
        res = nelder_mead(fun, x, step=step, basis=basis, tol=min(tol, 0.1 * step), max_iter=budget)
        nfev += res.nfev
        budget -= max(res.nit, 1)
        if res.fun < value:
            quiet = 0 if res.fun < value - 1e-15 else quiet + 1
            x, value = _rescale(fun, res.x), res.fun
        else:
            quiet += 1
    return x, value, nfev


def _rescale(fun: str, x: np.ndarray) -> np.ndarray:
    if fun != "rho":
        return x
    s = float(np.max(np.hypot(x[0::2], x[1::2])))
    return x / s if s > 0 else x


_RESTART_STEPS = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6)


def _run_start(config: SearchConfig, index: int) -> tuple[float, np.ndarray, int]:
    fun = "rho_circle" if config.circle_only else "rho"
    x = _start_point(config, index)
    res = nelder_mead(fun, x, step=0.1, tol=config.simplex_tolerance, max_iter=config.max_iterations)
    rng = np.random.default_rng([config.seed, index, 1])
    x, value, nfev = _restarts(fun, _rescale(fun, res.x), res.fun, rng, config.restarts,
                               config.max_iterations, config.simplex_tolerance)
    return -value, x, res.nfev + nfev


def _polish(config: SearchConfig, index: int, x: np.ndarray, value: float) -> tuple[float, np.ndarray, int]:
    fun = "rho_circle" if config.circle_only else "rho"
    rng = np.random.default_rng([config.seed, index, 2])
    x, v, nfev = _restarts(fun, x, -value, rng, config.polish_rounds,
                           config.polish_rounds * config.max_iterations, config.simplex_tolerance)
    return -v, x, nfev


def _normalize_roots(roots: np.ndarray) -> tuple[complex, ...]:
    s = float(np.max(np.abs(roots)))
    if s > 0:
        roots = roots / s
    return tuple(complex(z) for z in roots)


def maximize_rho(config: SearchConfig, *, workers: Optional[int] = None) -> SearchResult:
    """Best rho over ``config.starts`` Nelder-Mead runs (objective 0 outside the class)."""
    runs = ordered_map(lambda i: _run_start(config, i), range(config.starts), workers)
    # stable sort: equal values keep start order
    top = sorted(range(config.starts), key=lambda i: -runs[i][0])[: config.polish_count]
    polished = ordered_map(lambda i: _polish(config, i, runs[i][1], runs[i][0]), top, workers)
    nfev = sum(r[2] for r in runs) + sum(r[2] for r in polished)
    j = int(np.argmax([r[0] for r in polished]))  # first maximal wins ties
    k = top[j]
    _, x, _ = polished[j]
    roots = _normalize_roots(_roots_from_params(x, config.circle_only))
    poly = from_roots(roots, 1.0)
    best = rho(poly).rho
    n = config.degree
    return SearchResult(
        degree=n,
        best_rho=float(best),
        best_roots=roots,
        objective_evaluations=int(nfev),
        extremal_form=is_extremal_form(poly, config.extremal_tol),
        gap_to_bound=float(conjectured_bound(n) - best),
        best_start=k,
        circle_only=config.circle_only,
    )


def maximize_rho_circle(config: SearchConfig, *, workers: Optional[int] = None) -> SearchResult:
    """Search restricted to roots on the unit circle."""
    if not config.circle_only:
        raise ValueError("maximize_rho_circle needs circle_only=True")
    return maximize_rho(config, workers=workers)


def is_extremal_form(p: Polynomial, tol: float = 1e-6) -> bool:
    """True when ``p`` is ``a_1 z + a_n z^n`` up to middle coefficients below ``tol`` (relative)."""
    c = np.abs(p.coeffs)
    if c[0] != 0:
        return False
    if c.size < 3:
        return True
    return bool(np.all(c[2:-1] < tol * max(c[1], c[-1])))
