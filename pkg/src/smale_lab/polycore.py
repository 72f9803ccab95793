"""Complex polynomials in ascending-coefficient form.

A :class:`Polynomial` wraps a read-only ``complex128`` array where
``coeffs[k]`` multiplies ``z**k``.  All operations are pure and return new
objects.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class PolynomialError(ValueError):
    """Raised when a polynomial operation's precondition is violated."""


def _as_complex(value, what: str = "value") -> complex:
    z = complex(value)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise PolynomialError(f"{what} must be finite, got {z!r}")
    return z


class Polynomial:
    """Immutable complex polynomial, coefficients in ascending degree."""

    __slots__ = ("_c",)

    def __init__(self, coeffs: Iterable[complex]):
        c = np.array(list(coeffs) if not isinstance(coeffs, np.ndarray) else coeffs,
                     dtype=np.complex128).ravel()
        if c.size == 0:
            raise PolynomialError("polynomial needs at least one coefficient")
        if not np.all(np.isfinite(c)):
            raise PolynomialError("coefficients must be finite")
        nz = np.flatnonzero(c)
        c = c[: nz[-1] + 1].copy() if nz.size else np.zeros(1, dtype=np.complex128)
        c.flags.writeable = False
        self._c = c

    @classmethod
    def monomial(cls, k: int, a: complex = 1.0) -> "Polynomial":
        c = np.zeros(k + 1, dtype=np.complex128)
        c[k] = a
        return cls(c)

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    def degree(self) -> int:
        """Degree; the zero polynomial reports 0 (see :meth:`is_zero`)."""
        return self._c.size - 1

    def is_zero(self) -> bool:
        return self._c.size == 1 and self._c[0] == 0

    @property
    def leading(self) -> complex:
        return complex(self._c[-1])

    def __call__(self, z):
        return evaluate(self, z)

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self._c.shape == other._c.shape and bool(np.all(self._c == other._c))

    def __hash__(self):
        return hash(self._c.tobytes())

    def __repr__(self):
        terms = ", ".join(repr(complex(a)) for a in self._c)
        return f"Polynomial([{terms}])"

    def __add__(self, other: "Polynomial") -> "Polynomial":
        a, b = self._c, other._c
        out = np.zeros(max(a.size, b.size), dtype=np.complex128)
        out[: a.size] += a
        out[: b.size] += b
        return Polynomial(out)

    def __neg__(self) -> "Polynomial":
        return Polynomial(-self._c)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return Polynomial(np.convolve(self._c, other._c))
        return Polynomial(self._c * complex(other))

    __rmul__ = __mul__

    def max_abs_coeff(self) -> float:
        return float(np.max(np.abs(self._c)))


@dataclass(frozen=True)
class RootConfiguration:
    """Nonzero roots ``z_2..z_n`` plus the (usually forced) root at the origin."""

    roots: tuple[complex, ...]
    includes_origin: bool = True

    def __post_init__(self):
        object.__setattr__(self, "roots", tuple(_as_complex(r, "root") for r in self.roots))

    @property
    def all_roots(self) -> tuple[complex, ...]:
        return ((0j,) if self.includes_origin else ()) + self.roots


def from_roots(config: RootConfiguration | Sequence[complex], leading: complex = 1.0) -> Polynomial:
    """Expand ``leading * prod(z - r)`` by repeated linear-factor multiplication.

    A plain sequence of roots is taken as a configuration with the origin
    included.  The origin factor is applied as an exact shift so ``p(0) == 0``
    holds bitwise.
    """
    if not isinstance(config, RootConfiguration):
        config = RootConfiguration(tuple(config), True)
    lead = _as_complex(leading, "leading coefficient")
    if lead == 0:
        raise PolynomialError("leading coefficient must be nonzero")
    c = np.array([lead], dtype=np.complex128)
    for r in config.roots:
        nxt = np.zeros(c.size + 1, dtype=np.complex128)
        nxt[1:] = c
        nxt[:-1] -= r * c
        c = nxt
    if config.includes_origin:
        c = np.concatenate(([0j], c))
    return Polynomial(c)


def evaluate(p: Polynomial, z):
    """Horner evaluation; accepts a scalar or an array of points."""
    c = p.coeffs
    if np.ndim(z) == 0:
        z = complex(z)
        acc = 0j
        for a in c[::-1]:
            acc = acc * z + a
        return acc
    z = np.asarray(z, dtype=np.complex128)
    acc = np.zeros_like(z)
    for a in c[::-1]:
        acc = acc * z + a
    return acc


def derivative(p: Polynomial) -> Polynomial:
    c = p.coeffs
    if c.size == 1:
        return Polynomial([0j])
    return Polynomial(c[1:] * np.arange(1, c.size))


def difference_quotient(p: Polynomial, zeta: complex, z: complex) -> complex:
    """``(p(zeta) - p(z)) / (zeta - z)``."""
    zeta, z = complex(zeta), complex(z)
    if zeta == z:
        raise PolynomialError("difference quotient needs distinct arguments")
    num = evaluate(p, zeta) - evaluate(p, z)
    if num == 0:
        return 0j
    return num / (zeta - z)


def blow_up(p: Polynomial, r: float) -> Polynomial:
    """``r**n * p(z / r)``: roots are multiplied by ``r``."""
    r = float(r)
    if not r > 0 or not math.isfinite(r):
        raise PolynomialError(f"blow-up radius must be positive, got {r}")
    n = p.degree()
    powers = r ** (n - np.arange(n + 1, dtype=float))
    return Polynomial(p.coeffs * powers)


def translate_to_origin(p: Polynomial, z0: complex) -> Polynomial:
    """``w -> p(z0 + w) - p(z0)`` via repeated synthetic division (Taylor shift)."""
    z0 = complex(z0)
    c = np.array(p.coeffs, dtype=np.complex128)
    if z0 != 0:
        n = c.size - 1
        for i in range(n):
            for k in range(n - 1, i - 1, -1):
                c[k] += z0 * c[k + 1]
    c[0] = 0
    return Polynomial(c)


def normalize_to_class(p: Polynomial) -> tuple[Polynomial, float]:
    """Make ``p`` monic and rescale so its largest root has modulus one.

    Returns the normalized polynomial and the scale ``s``; the result equals
    ``blow_up(p / lead, 1 / s)``.  Requires ``p(0) == 0``, ``p'(0) != 0`` and
    degree at least two.
    """
    from .rootfind import all_roots

    if p.degree() < 2:
        raise PolynomialError("normalization needs degree >= 2")
    if p.coeffs[0] != 0:
        raise PolynomialError("normalization needs p(0) == 0")
    if abs(p.coeffs[1]) <= 1e-12 * p.max_abs_coeff():
        raise PolynomialError("normalization needs p'(0) != 0")
    monic = Polynomial(p.coeffs / p.leading)
    report = all_roots(Polynomial(monic.coeffs[1:]))
    s = float(np.max(np.abs(report.roots)))
    if s == 1.0:
        return monic, s
    return blow_up(monic, 1.0 / s), s
