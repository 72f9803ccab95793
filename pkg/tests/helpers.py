"""Random families and admissible paths shared by the surface and acceptance tests."""

import math

import numpy as np

from smale_lab.surface import (
    ContinuationError,
    PathSpec,
    SurfaceError,
    continue_critical_point,
    family_from_roots,
)

Z3_FIXED = (1.0 + 0j,)  # q = z^2 - z
Z3_ANCHOR = -1 / math.sqrt(3)


def z3_family(anchor: float = Z3_ANCHOR):
    """z^3 - z with the root -1 moving."""
    return family_from_roots(Z3_FIXED, -1.0, anchor)


def random_family(rng, n: int):
    """Family of degree n with fixed roots and base point uniform in the unit disk."""
    while True:
        pts = np.sqrt(rng.uniform(0.2, 1, n - 1)) * np.exp(2j * np.pi * rng.uniform(0, 1, n - 1))
        if min(abs(a - b) for i, a in enumerate(pts) for b in pts[i + 1 :]) < 0.1:
            continue
        fixed, base = pts[:-1], complex(pts[-1])
        proto = family_from_roots(fixed, base, 0)
        cps = proto.critical_points(base)
        anchor = complex(cps[rng.integers(len(cps))])
        return family_from_roots(fixed, base, anchor)


def random_traces(rng, family, count: int, max_tries: int = 200):
    """``count`` traces along random admissible polylines (tries again on rejected paths)."""
    out = []
    tries = 0
    while len(out) < count:
        tries += 1
        if tries > max_tries:
            raise RuntimeError("could not find admissible paths")
        k = rng.integers(1, 4)
        pts = [family.base_u] + list(1.5 * np.sqrt(rng.uniform(0, 1, k)) * np.exp(2j * np.pi * rng.uniform(0, 1, k)))
        try:
            out.append(continue_critical_point(family, PathSpec.polyline(pts)))
        except (SurfaceError, ContinuationError):
            continue
    return out
