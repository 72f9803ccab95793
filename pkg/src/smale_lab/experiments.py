"""Seeded random experiments over the class of normalized polynomials.

Samples are ``z * prod(z - r_j)`` with the ``r_j`` uniform in the unit disk.
Every chunk of samples draws from its own generator keyed by
``(seed, degree, chunk)``, and means are summed with ``math.fsum``, so a
summary does not depend on how many threads produced it.
"""

from __future__ import annotations

import dataclasses
import math
import time
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .deform import _nonzero_roots, circle_saturate
from .io import dumps
from .parallel import ordered_map
from .polycore import Polynomial, from_roots
from .smale import SMALE_K, batch_rho, conjectured_bound, rho_of_roots

CHUNK = 1000
DEFAULT_TOL = 1e-9


def random_roots(rng: np.random.Generator, count: int, m: int) -> np.ndarray:
    """``count`` rows of ``m`` points uniform in the unit disk."""
    radius = np.sqrt(rng.uniform(0.0, 1.0, (count, m)))
    angle = rng.uniform(0.0, 2 * math.pi, (count, m))
    return radius * np.exp(1j * angle)


@dataclass(frozen=True)
class Violation:
    kind: str  # "bound" | "smale"
    degree: int
    rho: float
    roots: tuple[complex, ...]  # nonzero roots; the sample is z * prod(z - r)
    poly: Polynomial


@dataclass(frozen=True)
class DegreeStats:
    degree: int
    samples: int
    out_of_class: int
    bound: float
    rho_min: float
    rho_max: float
    rho_mean: float
    margin_min: float
    margin_max: float
    margin_mean: float
    exceedances: int


@dataclass(frozen=True)
class ExperimentSummary:
    command: str
    seed: int
    sample_count: int
    degree_min: int
    degree_max: int
    tol: float
    rho_min: float
    rho_max: float
    rho_mean: float
    margin_min: float
    margin_max: float
    margin_mean: float
    per_degree: tuple[DegreeStats, ...]
    violations: tuple[Violation, ...]
    wall_time: float = 0.0

    def fingerprint(self) -> str:
        """Serialized summary without the timing field."""
        return dumps(dataclasses.replace(self, wall_time=0.0))


def reverify(v: Violation, tol: float = DEFAULT_TOL) -> bool:
    """Recompute rho from the stored roots and confirm the violation."""
    value, ok = rho_of_roots(np.array(v.roots, dtype=np.complex128))
    if not ok:
        return False
    if v.kind == "smale":
        return value >= SMALE_K
    return value > conjectured_bound(v.degree) + tol


def _chunk(seed: int, n: int, index: int, size: int):
    rng = np.random.default_rng([seed, n, index])
    R = random_roots(rng, size, n - 1)
    vals, ok = batch_rho(R)
    return R, vals, ok


def _degree_run(n: int, samples: int, seed: int, tol: float, workers: Optional[int]):
    sizes = [min(CHUNK, samples - s) for s in range(0, samples, CHUNK)]
    parts = ordered_map(lambda k: _chunk(seed, n, k, sizes[k]), range(len(sizes)), workers)
    R = np.concatenate([p[0] for p in parts])
    vals = np.concatenate([p[1] for p in parts])
    ok = np.concatenate([p[2] for p in parts])
    good = vals[ok]
    bound = conjectured_bound(n)
    margins = bound - good
    violations = []
    for i in np.flatnonzero(ok):
        v = float(vals[i])
        kind = "smale" if v >= SMALE_K else "bound" if v > bound + tol else None
        if kind:
            roots = tuple(complex(z) for z in R[i])
            violations.append(Violation(kind, n, v, roots, from_roots(roots, 1.0)))
    if good.size == 0:
        nan = math.nan
        stats = DegreeStats(n, samples, int(samples), bound, nan, nan, nan, nan, nan, nan, 0)
    else:
        stats = DegreeStats(
            degree=n,
            samples=samples,
            out_of_class=int(np.count_nonzero(~ok)),
            bound=bound,
            rho_min=float(good.min()),
            rho_max=float(good.max()),
            rho_mean=math.fsum(good.tolist()) / good.size,
            margin_min=float(margins.min()),
            margin_max=float(margins.max()),
            margin_mean=math.fsum(margins.tolist()) / margins.size,
            exceedances=int(np.count_nonzero(good > bound + tol)),
        )
    return stats, violations, good, margins


def verify(
    degrees: Sequence[int],
    samples: int,
    seed: int = 0,
    *,
    tol: float = DEFAULT_TOL,
    workers: Optional[int] = None,
) -> ExperimentSummary:
    """rho of ``samples`` random class members per degree against the bound."""
    degrees = tuple(int(n) for n in degrees)
    if not degrees or min(degrees) < 2:
        raise ValueError("degrees must be >= 2")
    if samples < 1:
        raise ValueError("samples must be >= 1")
    t0 = time.perf_counter()
    runs = [_degree_run(n, samples, seed, tol, workers) for n in degrees]
    rhos = np.concatenate([r[2] for r in runs])
    margins = np.concatenate([r[3] for r in runs])
    if rhos.size == 0:
        raise ValueError("no sample landed in the class")
    return ExperimentSummary(
        command="verify",
        seed=seed,
        sample_count=samples * len(degrees),
        degree_min=min(degrees),
        degree_max=max(degrees),
        tol=tol,
        rho_min=float(rhos.min()),
        rho_max=float(rhos.max()),
        rho_mean=math.fsum(rhos.tolist()) / rhos.size,
        margin_min=float(margins.min()),
        margin_max=float(margins.max()),
        margin_mean=math.fsum(margins.tolist()) / margins.size,
        per_degree=tuple(r[0] for r in runs),
        violations=tuple(v for r in runs for v in r[1]),
        wall_time=time.perf_counter() - t0,
    )


# ----------------------------------------------------------------------------
# circle saturation over random samples


@dataclass(frozen=True)
class SaturationFinding:
    degree: int
    sample: int
    step: int
    roots: tuple[complex, ...]  # nonzero roots of the normalized polynomial before the step
    moved_root: complex
    rho_before: float
    rho_after: float
    poly: Polynomial


@dataclass(frozen=True)
class SaturationDegree:
    degree: int
    samples: int
    certified: int
    on_circle: int
    final_rho_max: float
    bound_exceedances: int


@dataclass(frozen=True)
class SaturationSummary:
    seed: int
    samples_per_degree: int
    boundary_samples: int
    per_degree: tuple[SaturationDegree, ...]
    findings: tuple[SaturationFinding, ...]
    wall_time: float = 0.0

    @property
    def uncertified(self) -> int:
        return sum(d.samples - d.certified for d in self.per_degree)

    def fingerprint(self) -> str:
        return dumps(dataclasses.replace(self, wall_time=0.0))


def _saturate_one(n: int, i: int, seed: int, boundary: int, tol: float):
    rng = np.random.default_rng([seed, n, i])
    roots = random_roots(rng, 1, n - 1)[0]
    rep = circle_saturate(from_roots(roots, 1.0), boundary, workers=1)
    findings = []
    for k, step in enumerate(rep.steps):
        if not step.certificate_ok:
            before = tuple(complex(z) for z in _nonzero_roots(step.before))
            findings.append(SaturationFinding(
                n, i, k, before, step.moved_root_from, step.rho_before, step.rho_after, step.before))
    final = rep.rho_trajectory[-1]
    return rep.certified, rep.all_on_circle, final, final > conjectured_bound(n) + tol, findings


def saturation_probe(
    degrees: Sequence[int],
    samples: int,
    seed: int = 0,
    *,
    boundary_samples: int = 720,
    tol: float = DEFAULT_TOL,
    workers: Optional[int] = None,
) -> SaturationSummary:
    """Run :func:`circle_saturate` on random samples and collect uncertified steps."""
    t0 = time.perf_counter()
    rows, findings = [], []
    for n in degrees:
        res = ordered_map(lambda i: _saturate_one(n, i, seed, boundary_samples, tol), range(samples), workers)
        rows.append(SaturationDegree(
            degree=n,
            samples=samples,
            certified=sum(r[0] for r in res),
            on_circle=sum(r[1] for r in res),
            final_rho_max=max(r[2] for r in res),
            bound_exceedances=sum(r[3] for r in res),
        ))
        findings.extend(f for r in res for f in r[4])
    return SaturationSummary(seed, samples, boundary_samples, tuple(rows), tuple(findings),
                             time.perf_counter() - t0)
