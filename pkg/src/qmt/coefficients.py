"""Harmonic numbers, Taylor coefficients and complete Bell polynomials.

The kernels here are written against plain arithmetic so that they accept
either Python floats or ``mpmath.mpf`` numbers; the caller decides the
precision.  Only :func:`log2` and :func:`inv_ln2` need to know the type.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import mpmath

from .errors import InsufficientInput, NonPositiveOrder, OrderOutOfRange, SingularGap
from .spectrum import SpectrumGroups

LN2 = math.log(2.0)


def log2(x):
    if isinstance(x, mpmath.mpf):
        return mpmath.log(x) / mpmath.ln2
    return math.log2(x)


def inv_ln2(like=None):
    if isinstance(like, mpmath.mpf):
        return 1 / mpmath.ln2
    return 1.0 / LN2


def to_number(q: Fraction, like=None):
    """Convert an exact rational to the numeric type of ``like``."""
    if isinstance(like, mpmath.mpf):
        return mpmath.mpf(q.numerator) / q.denominator
    return q.numerator / q.denominator


@lru_cache(maxsize=None)
def harmonic(n: int) -> Fraction:
    """Exact harmonic number ``1 + 1/2 + ... + 1/n`` (0 for ``n = 0``)."""
    if n < 0:
        raise NonPositiveOrder(f"harmonic number of negative order {n}")
    if n == 0:
        return Fraction(0)
    return harmonic(n - 1) + Fraction(1, n)


def eta(n: int) -> float:
    if n < 1:
        raise NonPositiveOrder(f"eta needs n >= 1, got {n}")
    return to_number(harmonic(n))


def information_ceiling(d: int, like=None):
    """``log2 d - (eta(d) - 1)/ln 2``: the largest possible single-outcome Q."""
    if isinstance(like, mpmath.mpf):
        return log2(mpmath.mpf(d)) - to_number(harmonic(d) - 1, like) / mpmath.ln2
    return math.log2(d) - float(harmonic(d) - 1) / LN2


def _check_order(d: int, n: int) -> None:
    if d < 1 or not 0 <= n <= d - 1:
        raise OrderOutOfRange(f"order n={n} outside 0..{d - 1} for d={d}")


@lru_cache(maxsize=None)
def _a_times_ln2(d: int, n: int) -> Fraction:
    return math.comb(d, n) * (harmonic(d) - harmonic(d - n))


def a_coeff(d: int, n: int, *, like=None):
    """Taylor coefficient of ``eps**n`` in ``(1 + eps)**d * log2(1 + eps)``."""
    _check_order(d, n)
    return to_number(_a_times_ln2(d, n), like) * inv_ln2(like)


def a_coeff_alt(d: int, n: int) -> float:
    """Same coefficient from the alternating sum of binomials, in floating point."""
    _check_order(d, n)
    terms = [(-1) ** (k + 1) * math.comb(d, n - k) / k for k in range(1, n + 1)]
    return math.fsum(terms) / LN2


def c_coeff_sq(d: int, n: int, x):
    """Coefficient of ``eps**n`` in ``(x + eps)**d * log2(x + eps)``, with ``x = lambda**2``."""
    _check_order(d, n)
    if x == 0:
        return x * 0
    return x ** (d - n) * (math.comb(d, n) * log2(x) + a_coeff(d, n, like=x))


def c_coeff(d: int, n: int, lam):
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    return c_coeff_sq(d, n, lam * lam)


def bell_sequence(xs: Sequence, n: int) -> list:
    """Complete Bell polynomials ``B_0 .. B_n`` evaluated at ``xs``.

    Uses ``B_{m+1} = sum_k C(m, k) B_{m-k} x_{k+1}``; integer input stays exact.
    """
    if n < 0:
        raise ValueError("order must be nonnegative")
    if len(xs) < n:
        raise InsufficientInput(f"need {n} arguments, got {len(xs)}")
    out = [1]
    for m in range(n):
        out.append(sum(math.comb(m, k) * out[m - k] * xs[k] for k in range(m + 1)))
    return out


def bell_complete(n: int, xs: Sequence):
    return bell_sequence(xs, n)[n]


def _partitions(n: int, largest: int | None = None):
    """Yield partitions of ``n`` as lists of parts in nonincreasing order."""
    if largest is None:
        largest = n
    if n == 0:
        yield []
        return
    for part in range(min(n, largest), 0, -1):
        for rest in _partitions(n - part, part):
            yield [part] + rest


def bell_by_partitions(n: int, xs: Sequence):
    """Reference evaluation by summing over all integer partitions of ``n``.

    Exponential in ``n``; meant for cross-checking :func:`bell_complete`.
    """
    if n < 0:
        raise ValueError("order must be nonnegative")
    if len(xs) < n:
        raise InsufficientInput(f"need {n} arguments, got {len(xs)}")
    total = 0
    for parts in _partitions(n):
        counts: dict[int, int] = {}
        for p in parts:
            counts[p] = counts.get(p, 0) + 1
        denom = 1
        term = 1
        for r, j in counts.items():
            denom *= math.factorial(j) * math.factorial(r) ** j
            term *= xs[r - 1] ** j
        total += (math.factorial(n) // denom) * term
    return total


def h_sequence(sq: Sequence, mults: Sequence[int], s: int, nmax: int) -> list:
    """``h_1 .. h_nmax`` for group ``s`` given squared group values ``sq``."""
    x = sq[s]
    others = [(sq[r], mults[r]) for r in range(len(sq)) if r != s]
    for y, _ in others:
        if y == x:
            raise SingularGap(f"group {s} coincides with another group")
    gaps = [(x - y, nr) for y, nr in others]
    out = []
    for n in range(1, nmax + 1):
        acc = sum(nr / g**n for g, nr in gaps) if gaps else x * 0
        out.append((-1) ** n * math.factorial(n - 1) * acc)
    return out


@dataclass(frozen=True)
class GroupContext:
    """One group ``s`` of a grouped spectrum, viewed against all the others."""

    groups: SpectrumGroups
    s: int

    def __post_init__(self) -> None:
        if not 0 <= self.s < len(self.groups):
            raise IndexError(f"group index {self.s} out of range")

    @property
    def d(self) -> int:
        return self.groups.d

    @property
    def squares(self) -> list[float]:
        return [v * v for v in self.groups.values]


def h_coeff(ctx: GroupContext, n: int) -> float:
    if n < 1:
        raise NonPositiveOrder(f"h needs n >= 1, got {n}")
    return h_sequence(ctx.squares, ctx.groups.multiplicities, ctx.s, n)[n - 1]


def b_sequence(hs: Sequence, nmax: int) -> list:
    """``b_0 .. b_nmax`` where ``b_n = B_n(h_1, ..., h_n) / n!``."""
    bells = bell_sequence(hs, nmax)
    return [b / math.factorial(n) for n, b in enumerate(bells)]


def b_coeff(ctx: GroupContext, n: int) -> float:
    if n < 0:
        raise ValueError("order must be nonnegative")
    if n == 0:
        return 1.0
    hs = h_sequence(ctx.squares, ctx.groups.multiplicities, ctx.s, n)
    return b_sequence(hs, n)[n]
