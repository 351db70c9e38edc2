"""Singular-value spectra of measurement operators and complete measurement sets.

A measurement operator enters every quantity in this package only through its
singular values, so a :class:`SingularSpectrum` is the sole physics input.
Spectra are immutable, sorted in nonincreasing order and bounded by 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import (
    AllZero,
    DimensionMismatch,
    IncompleteSet,
    NegativeValue,
    TooSmallDimension,
    ValueAboveOne,
)

DEFAULT_GROUP_TOL = 1e-9
GROUP_FLOOR = 1e-300
COMPLETENESS_TOL = 1e-9


@dataclass(frozen=True)
class SingularSpectrum:
    """Nonincreasing singular values ``lambda_1 >= ... >= lambda_d`` of one operator."""

    values: tuple[float, ...]

    @property
    def d(self) -> int:
        return len(self.values)

    @property
    def lam_max(self) -> float:
        return self.values[0]

    @property
    def lam_min(self) -> float:
        return self.values[-1]

    @property
    def squares(self) -> tuple[float, ...]:
        return tuple(v * v for v in self.values)

    @property
    def is_uniform(self) -> bool:
        """True when every singular value is exactly equal (identity up to scale)."""
        return max(self.values) == min(self.values)

    def scaled(self, c: float) -> "SingularSpectrum":
        """Multiply every value by ``c`` (``0 < c``); bound checks are not repeated."""
        if not c > 0:
            raise ValueError("scale factor must be positive")
        return SingularSpectrum(tuple(v * c for v in self.values))

    def __iter__(self):
        return iter(self.values)

    def __len__(self) -> int:
        return len(self.values)


def validate(values: Iterable[float], *, auto_rescale: bool = False) -> SingularSpectrum:
    """Build a sorted :class:`SingularSpectrum` from raw numbers.

    Values above 1 are rejected unless ``auto_rescale`` is set, in which case
    the spectrum is divided by its maximum.
    """
    vals = [float(v) for v in values]
    if len(vals) < 2:
        raise TooSmallDimension(f"dimension must be at least 2, got {len(vals)}")
    for i, v in enumerate(vals):
        if not math.isfinite(v):
            raise ValueError(f"value {i} is not finite: {v!r}")
        if v < 0:
            raise NegativeValue(f"value {i} is negative: {v!r}")
    top = max(vals)
    if top == 0:
        raise AllZero("at least one singular value must be positive")
    vals.sort(reverse=True)
    if top > 1:
        if not auto_rescale:
            raise ValueAboveOne(
                f"singular value {top!r} exceeds 1 (pass auto_rescale to normalise)"
            )
        vals = [v / top for v in vals]
    return SingularSpectrum(tuple(vals))


def rescale_to_unit_max(s: SingularSpectrum) -> SingularSpectrum:
    top = s.lam_max
    return SingularSpectrum(tuple(v / top for v in s.values))


def hs_norm_sq(s: SingularSpectrum) -> float:
    """Squared Hilbert-Schmidt norm, the sum of squared singular values."""
    return math.fsum(v * v for v in s.values)


def trace_norm(s: SingularSpectrum) -> float:
    return math.fsum(s.values)


@dataclass(frozen=True)
class SpectrumGroups:
    """Distinct values with multiplicities, strictly decreasing in value."""

    groups: tuple[tuple[float, int], ...]
    tolerance: float = DEFAULT_GROUP_TOL

    @property
    def d(self) -> int:
        return sum(n for _, n in self.groups)

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(v for v, _ in self.groups)

    @property
    def multiplicities(self) -> tuple[int, ...]:
        return tuple(n for _, n in self.groups)

    def flatten(self) -> tuple[float, ...]:
        return tuple(v for v, n in self.groups for _ in range(n))

    def __len__(self) -> int:
        return len(self.groups)


def make_groups(
    pairs: Sequence[tuple[float, int]], tolerance: float = DEFAULT_GROUP_TOL
) -> SpectrumGroups:
    """Build groups from explicit ``(value, multiplicity)`` pairs.

    Pairs are sorted by value; equal values are rejected.
    """
    ordered = sorted(((float(v), int(n)) for v, n in pairs), key=lambda p: -p[0])
    for v, n in ordered:
        if n < 1:
            raise ValueError("multiplicities must be positive")
        if v < 0:
            raise NegativeValue(f"group value {v!r} is negative")
    for (a, _), (b, _) in zip(ordered, ordered[1:]):
        if a == b:
            raise ValueError(f"duplicate group value {a!r}")
    return SpectrumGroups(tuple(ordered), tolerance)


def group(s: SingularSpectrum, rel_tol: float = DEFAULT_GROUP_TOL) -> SpectrumGroups:
    """Merge adjacent values whose squares agree within ``rel_tol``.

    A value joins the current group when its squared difference from the
    group's representative is at most ``rel_tol * max(rep**2, GROUP_FLOOR)``.
    The representative is the root of the mean of the members' squares.
    """
    if rel_tol < 0:
        raise ValueError("rel_tol must be nonnegative")
    members: list[list[float]] = []
    rep_sq = 0.0
    for v in s.values:
        sq = v * v
        if members and abs(rep_sq - sq) <= rel_tol * max(rep_sq, GROUP_FLOOR):
            members[-1].append(sq)
            rep_sq = math.fsum(members[-1]) / len(members[-1])
        else:
            members.append([sq])
            rep_sq = sq
    groups = tuple((math.sqrt(math.fsum(m) / len(m)), len(m)) for m in members)
    return SpectrumGroups(groups, rel_tol)


@dataclass(frozen=True)
class MeasurementSet:
    """Spectra of all outcomes of one measurement, sharing the dimension ``d``."""

    outcomes: tuple[SingularSpectrum, ...]

    def __post_init__(self) -> None:
        if not self.outcomes:
            raise ValueError("a measurement set needs at least one outcome")
        dims = {s.d for s in self.outcomes}
        if len(dims) != 1:
            raise DimensionMismatch(f"outcomes have different dimensions: {sorted(dims)}")

    @property
    def d(self) -> int:
        return self.outcomes[0].d

    def __len__(self) -> int:
        return len(self.outcomes)

    def __iter__(self):
        return iter(self.outcomes)


def measurement_set(spectra: Iterable[SingularSpectrum | Sequence[float]]) -> MeasurementSet:
    """Build a set from spectra or raw value lists.

    Unlike single spectra, outcomes in a set may be identically zero only if
    given as ready-made spectra; raw lists go through :func:`validate`.
    """
    outs = tuple(x if isinstance(x, SingularSpectrum) else validate(x) for x in spectra)
    return MeasurementSet(outs)


def completeness_defect(mset: MeasurementSet) -> float:
    """``|sum_m sigma_m^2 - d|``; zero for a complete measurement."""
    total = math.fsum(v * v for s in mset.outcomes for v in s.values)
    return abs(total - mset.d)


def check_complete(mset: MeasurementSet, tol: float | None = None) -> float:
    """Return the completeness defect, raising :class:`IncompleteSet` above ``tol``.

    The default tolerance is ``1e-9 * d``.
    """
    if tol is None:
        tol = COMPLETENESS_TOL * mset.d
    defect = completeness_defect(mset)
    if defect > tol:
        raise IncompleteSet(f"completeness defect {defect:.3e} exceeds tolerance {tol:.3e}")
    return defect
