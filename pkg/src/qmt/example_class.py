"""The ``(k, l, lambda)`` measurement family and projective measurements.

A family member has ``k`` unit singular values, ``l`` copies of ``lambda`` and
``d - k - l`` zeros.  Its information has a finite closed form whose two sums
carry powers of ``1/(1 - lambda^2)``; they cancel analytically as
``lambda -> 1``, so the closed form is evaluated in mpmath with the working
precision raised according to how close ``lambda^2`` is to 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import mpmath

from . import coefficients as co
from .errors import BadParams, RankOutOfRange
from .quantities import OutcomeReport, efficiencies, estimation_fidelity
from .spectrum import SingularSpectrum


@dataclass(frozen=True)
class ExampleParams:
    d: int
    k: int
    l: int
    lam: float

    def __post_init__(self) -> None:
        d, k, l, lam = self.d, self.k, self.l, self.lam
        if d < 2:
            raise BadParams(f"d must be at least 2, got {d}")
        if not 1 <= k <= d - 1:
            raise BadParams(f"k must lie in 1..{d - 1}, got {k}")
        if not 1 <= l <= d - k:
            raise BadParams(f"l must lie in 1..{d - k}, got {l}")
        if not 0 < lam < 1:
            raise BadParams(f"lambda must lie strictly between 0 and 1, got {lam}")

    @property
    def rank(self) -> int:
        return self.k + self.l


def spectrum_of(p: ExampleParams) -> SingularSpectrum:
    values = (1.0,) * p.k + (float(p.lam),) * p.l + (0.0,) * (p.d - p.k - p.l)
    return SingularSpectrum(values)


def _working_digits(lam: float, rank: int) -> int:
    gap = 1.0 - lam * lam
    lost = rank * max(0.0, -math.log10(gap)) if gap > 0 else 300.0
    return 30 + int(lost)


def information_ex(p: ExampleParams) -> float:
    """Closed-form information of a family member, in bits."""
    k, l, d, kl = p.k, p.l, p.d, p.rank
    with mpmath.workdps(_working_digits(p.lam, kl)):
        lam = mpmath.mpf(p.lam)
        x = lam * lam
        one = mpmath.mpf(1)
        j1 = sum(
            math.comb(kl - n - 2, l - 1) * co.a_coeff(kl, n, like=x) / (x - 1) ** (kl - n - 1)
            for n in range(k)
        )
        j2 = sum(
            math.comb(kl - n - 2, k - 1) * co.c_coeff_sq(kl, n, x) / (one - x) ** (kl - n - 1)
            for n in range(l)
        )
        j = (-1) ** l * j1 + (-1) ** k * j2
        sigma_sq = k + l * x
        info = co.information_ceiling(d, like=x) - co.log2(sigma_sq) + j / sigma_sq
        return float(info)


def fidelity_ex(p: ExampleParams) -> float:
    k, l, lam = p.k, p.l, p.lam
    num = k * (k + 1) + 2 * k * l * lam + l * (l + 1) * lam * lam
    return num / ((p.d + 1) * (k + l * lam * lam))


def reversibility_ex(p: ExampleParams) -> float:
    if p.rank != p.d:
        return 0.0
    lam_sq = p.lam * p.lam
    return p.d * lam_sq / (p.k + p.l * lam_sq)


def projective_information(d: int, r: int) -> float:
    """``log2(d/r) - (eta(d) - eta(r))/ln 2`` for a rank-``r`` projector."""
    if not 1 <= r <= d:
        raise RankOutOfRange(f"rank {r} outside 1..{d}")
    return math.log2(d / r) - float(co.harmonic(d) - co.harmonic(r)) / co.LN2


def projective(d: int, r: int) -> OutcomeReport:
    """Report for the projector with ``r`` unit and ``d - r`` zero singular values."""
    if not 1 <= r <= d:
        raise RankOutOfRange(f"rank {r} outside 1..{d}")
    info = projective_information(d, r)
    spec = SingularSpectrum((1.0,) * r + (0.0,) * (d - r))
    rep = OutcomeReport(
        d=d,
        sigma_sq=float(r),
        tau=float(r),
        info_bits=info,
        fidelity=(r + 1) / (d + 1),
        reversibility=1.0 if r == d else 0.0,
        estimation_fidelity=estimation_fidelity(spec),
        subentropy_q=co.information_ceiling(d) - info,
        eff_fidelity=None,
        eff_reversibility=None,
    )
    e_f, e_r = efficiencies(rep)
    return OutcomeReport(**{**rep.__dict__, "eff_fidelity": e_f, "eff_reversibility": e_r})


class IdentityExpansion(NamedTuple):
    """Leading terms of I, F, R for ``(k, l) = (d-1, 1)`` at ``lambda^2 = 1 - eps``."""

    info_eps2: float
    fid_eps2: float
    rev_eps1: float
    rev_eps2: float
    info: float
    fidelity: float
    reversibility: float


def identity_expansion(d: int, epsilon: float) -> IdentityExpansion:
    """Series coefficients near the identity and the truncated values at ``epsilon``.

    ``I ~ c_I eps^2``, ``F ~ 1 - c_F eps^2``, ``R ~ 1 - c_R1 eps - c_R2 eps^2``.
    """
    if d < 2:
        raise BadParams(f"d must be at least 2, got {d}")
    if not 0 < epsilon < 1:
        raise BadParams(f"epsilon must lie in (0, 1), got {epsilon}")
    ratio = (d - 1) / (d + 1)
    c_i = ratio / (2 * d * d * co.LN2)
    c_f = ratio / (4 * d)
    c_r1 = (d - 1) / d
    c_r2 = (d - 1) / d**2
    eps2 = epsilon * epsilon
    return IdentityExpansion(
        info_eps2=c_i,
        fid_eps2=c_f,
        rev_eps1=c_r1,
        rev_eps2=c_r2,
        info=c_i * eps2,
        fidelity=1 - c_f * eps2,
        reversibility=1 - c_r1 * epsilon - c_r2 * eps2,
    )


def valid_pairs(d: int) -> list[tuple[int, int]]:
    return [(k, l) for k in range(1, d) for l in range(1, d - k + 1)]
