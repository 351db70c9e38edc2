"""Single-outcome and outcome-averaged information, fidelity and reversibility.

Everything is a function of the singular values alone.  The only delicate
piece is the sum

    J = sum_i lambda_i^(2d) log2(lambda_i^2) / prod_{k != i} (lambda_i^2 - lambda_k^2),

which is a divided difference of ``x**d * log2(x)`` at the squared singular
values.  :func:`j_grouped` evaluates it from the degeneracy grouping and never
divides by a vanishing gap; :func:`j_naive` is the direct sum, kept as an
oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import mpmath

from . import coefficients as co
from .errors import DegenerateSpectrum
from .spectrum import (
    DEFAULT_GROUP_TOL,
    MeasurementSet,
    SingularSpectrum,
    SpectrumGroups,
    check_complete,
    group,
    hs_norm_sq,
    trace_norm,
)

NAIVE_GAP_TOL = 1e-6
# Largest tolerated ratio between the summed term magnitudes and sigma^2
# before j_grouped switches to extended precision.
CANCELLATION_LIMIT = 1e3


def _as_mp_squares(values: Sequence[float]) -> list:
    return [mpmath.mpf(v) ** 2 for v in values]


def _naive_sum(sq: Sequence, d: int, weight) -> object:
    total = sq[0] * 0
    for i, x in enumerate(sq):
        num = weight(x)
        if num == 0:
            continue
        den = 1
        for k, y in enumerate(sq):
            if k != i:
                den *= x - y
        total += num / den
    return total


def _min_nonzero_gap(sq: Sequence[float]) -> float:
    gaps = [
        abs(a - b)
        for i, a in enumerate(sq)
        for b in sq[i + 1 :]
        if a != 0 or b != 0
    ]
    return min(gaps) if gaps else math.inf


def j_naive(s: SingularSpectrum, *, dps: int | None = None) -> float:
    """Direct sum over singular values, dropping the vanishing ``lambda = 0`` terms.

    In double precision (``dps=None``) spectra whose smallest squared gap is
    below ``1e-6 * sigma^2`` are refused.  With ``dps`` the sum is taken in
    mpmath at that many digits and only an exact coincidence is refused.
    """
    d = s.d
    if dps is None:
        sq = list(s.squares)
        if _min_nonzero_gap(sq) < NAIVE_GAP_TOL * hs_norm_sq(s):
            raise DegenerateSpectrum("squared singular values too close; use j_grouped")
        return _naive_sum(sq, d, lambda x: x**d * math.log2(x) if x else 0.0)
    with mpmath.workdps(dps):
        sq = _as_mp_squares(s.values)
        if _min_nonzero_gap(sq) == 0:
            raise DegenerateSpectrum("repeated nonzero singular value")
        total = _naive_sum(sq, d, lambda x: x**d * co.log2(x) if x else x)
        return float(total)


def power_sum(s: SingularSpectrum, *, dps: int | None = None) -> float:
    """``sum_i lambda_i^(2d) / prod_{k != i}(lambda_i^2 - lambda_k^2)``; equals sigma^2."""
    d = s.d
    if dps is None:
        return _naive_sum(list(s.squares), d, lambda x: x**d)
    with mpmath.workdps(dps):
        return float(_naive_sum(_as_mp_squares(s.values), d, lambda x: x**d))


def _j_kernel(sq: Sequence, mults: Sequence[int], d: int):
    """Per-group contributions to J and a bound on everything that was summed."""
    zero = sq[0] * 0
    terms = []
    magnitude = zero
    for s, (x, ns) in enumerate(zip(sq, mults)):
        if x == 0:
            terms.append(zero)
            continue
        pref = 1
        for r, (y, nr) in enumerate(zip(sq, mults)):
            if r != s:
                pref *= (x - y) ** nr
        hs = co.h_sequence(sq, mults, s, ns - 1)
        bs = co.b_sequence(hs, ns - 1)
        bs_abs = co.b_sequence([abs(h) for h in hs], ns - 1)
        inner = zero
        inner_abs = zero
        for n in range(ns):
            c = co.c_coeff_sq(d, n, x)
            c_abs = x ** (d - n) * (
                math.comb(d, n) * abs(co.log2(x)) + co.a_coeff(d, n, like=x)
            )
            inner += c * bs[ns - 1 - n]
            inner_abs += c_abs * bs_abs[ns - 1 - n]
        terms.append(inner / pref)
        magnitude += inner_abs / abs(pref)
    return terms, magnitude


def _contributions(g: SpectrumGroups, d: int | None):
    """Group contributions as floats or, when cancellation demands it, as mpf.

    The double-precision result is accepted when the summed magnitudes stay
    within ``CANCELLATION_LIMIT * sigma^2``.  Otherwise (clusters of nearly
    equal but distinct groups) the same formula is re-evaluated in mpmath with
    enough digits to absorb the cancellation.
    """
    if d is None:
        d = g.d
    values = g.values
    mults = g.multiplicities
    sq = [v * v for v in values]
    sigma_sq = math.fsum(x * n for x, n in zip(sq, mults))
    try:
        terms, magnitude = _j_kernel(sq, mults, d)
        ratio = magnitude / sigma_sq
    except (ZeroDivisionError, OverflowError):
        terms, ratio = [math.nan], math.inf
    if math.isfinite(ratio) and ratio <= CANCELLATION_LIMIT and all(map(math.isfinite, terms)):
        return terms, None
    digits = 20
    while True:
        digits += 10 + (int(math.log10(ratio)) + 1 if math.isfinite(ratio) else 300)
        with mpmath.workdps(digits):
            msq = _as_mp_squares(values)
            mterms, mmag = _j_kernel(msq, mults, d)
            mratio = mmag / sum(x * n for x, n in zip(msq, mults))
            if mpmath.log10(mratio) < digits - 20:
                return mterms, digits
            ratio = float(mratio)


def j_contributions(g: SpectrumGroups, d: int | None = None) -> list[float]:
    """Contribution of each group to J, in the order of ``g.groups``."""
    terms, _ = _contributions(g, d)
    return [float(v) for v in terms]


def j_grouped(g: SpectrumGroups, d: int | None = None) -> float:
    """J from the degeneracy grouping; safe for repeated singular values."""
    terms, digits = _contributions(g, d)
    if digits is None:
        return math.fsum(terms)
    with mpmath.workdps(digits):
        return float(mpmath.fsum(terms))


def j_value(s: SingularSpectrum, group_tol: float = DEFAULT_GROUP_TOL) -> float:
    return j_grouped(group(s, group_tol), s.d)


def subentropy_q(s: SingularSpectrum, group_tol: float = DEFAULT_GROUP_TOL) -> float:
    """Spectrum-dependent part of the information: ``log2 sigma^2 - J / sigma^2``."""
    if s.is_uniform:
        return co.information_ceiling(s.d)
    sigma_sq = hs_norm_sq(s)
    return math.log2(sigma_sq) - j_value(s, group_tol) / sigma_sq


def information(s: SingularSpectrum, group_tol: float = DEFAULT_GROUP_TOL) -> float:
    """Information gain ``I(m)`` in bits; rounding noise below zero is clipped."""
    value = co.information_ceiling(s.d) - subentropy_q(s, group_tol)
    return max(value, 0.0)


def fidelity(s: SingularSpectrum) -> float:
    if s.is_uniform:
        return 1.0
    sigma_sq = hs_norm_sq(s)
    tau = trace_norm(s)
    return (sigma_sq + tau * tau) / ((s.d + 1) * sigma_sq)


def reversibility(s: SingularSpectrum) -> float:
    if s.is_uniform:
        return 1.0
    return s.d * s.lam_min**2 / hs_norm_sq(s)


def estimation_fidelity(s: SingularSpectrum) -> float:
    sigma_sq = hs_norm_sq(s)
    return (sigma_sq + s.lam_max**2) / ((s.d + 1) * sigma_sq)


def efficiency_limits(d: int) -> tuple[float, float]:
    """Limits of ``(E_F, E_R)`` when a spectrum approaches the identity."""
    return 2.0 / (d * co.LN2), 0.0


@dataclass(frozen=True)
class OutcomeReport:
    d: int
    sigma_sq: float
    tau: float
    info_bits: float
    fidelity: float
    reversibility: float
    estimation_fidelity: float
    subentropy_q: float
    eff_fidelity: float | None
    eff_reversibility: float | None

    def as_dict(self) -> dict:
        return {
            "d": self.d,
            "sigma_sq": self.sigma_sq,
            "tau": self.tau,
            "I_bits": self.info_bits,
            "F": self.fidelity,
            "R": self.reversibility,
            "G": self.estimation_fidelity,
            "Q": self.subentropy_q,
            "E_F": self.eff_fidelity,
            "E_R": self.eff_reversibility,
        }


def efficiencies(rep: OutcomeReport) -> tuple[float | None, float | None]:
    """``E_F = I/(1-F)`` and ``E_R = I/(1-R)``; ``None`` where the loss vanishes."""
    e_f = rep.info_bits / (1.0 - rep.fidelity) if rep.fidelity < 1.0 else None
    e_r = rep.info_bits / (1.0 - rep.reversibility) if rep.reversibility < 1.0 else None
    return e_f, e_r


def report(s: SingularSpectrum, group_tol: float = DEFAULT_GROUP_TOL) -> OutcomeReport:
    q = subentropy_q(s, group_tol)
    info = max(co.information_ceiling(s.d) - q, 0.0)
    rep = OutcomeReport(
        d=s.d,
        sigma_sq=hs_norm_sq(s),
        tau=trace_norm(s),
        info_bits=info,
        fidelity=fidelity(s),
        reversibility=reversibility(s),
        estimation_fidelity=estimation_fidelity(s),
        subentropy_q=q,
        eff_fidelity=None,
        eff_reversibility=None,
    )
    e_f, e_r = efficiencies(rep)
    return OutcomeReport(**{**rep.__dict__, "eff_fidelity": e_f, "eff_reversibility": e_r})


@dataclass(frozen=True)
class AverageReport:
    mutual_info_bits: float
    mean_fidelity: float
    mean_reversibility: float
    mean_estimation: float


def outcome_probabilities(mset: MeasurementSet) -> list[float]:
    """``p(m) = sigma_m^2 / d``."""
    return [hs_norm_sq(s) / mset.d for s in mset]


def averages(
    mset: MeasurementSet,
    *,
    tol: float | None = None,
    group_tol: float = DEFAULT_GROUP_TOL,
) -> AverageReport:
    """Outcome-averaged I, F, R, G from their closed forms.

    Raises :class:`~qmt.errors.IncompleteSet` if the set is not complete.
    """
    check_complete(mset, tol)
    d = mset.d
    terms = []
    for s in mset:
        sigma_sq = hs_norm_sq(s)
        terms.append(sigma_sq * math.log2(sigma_sq) - j_value(s, group_tol))
    info = co.information_ceiling(d) - math.fsum(terms) / d
    tau_sq = math.fsum(trace_norm(s) ** 2 for s in mset)
    rev = math.fsum(s.lam_min**2 for s in mset)
    lmax_sq = math.fsum(s.lam_max**2 for s in mset)
    return AverageReport(
        mutual_info_bits=max(info, 0.0),
        mean_fidelity=(d + tau_sq) / (d * (d + 1)),
        mean_reversibility=rev,
        mean_estimation=(d + lmax_sq) / (d * (d + 1)),
    )


def weighted_averages(
    mset: MeasurementSet, group_tol: float = DEFAULT_GROUP_TOL
) -> AverageReport:
    """Same averages as ``sum_m p(m) X(m)`` over single-outcome reports."""
    probs = outcome_probabilities(mset)
    reps = [report(s, group_tol) for s in mset]
    return AverageReport(
        mutual_info_bits=math.fsum(p * r.info_bits for p, r in zip(probs, reps)),
        mean_fidelity=math.fsum(p * r.fidelity for p, r in zip(probs, reps)),
        mean_reversibility=math.fsum(p * r.reversibility for p, r in zip(probs, reps)),
        mean_estimation=math.fsum(p * r.estimation_fidelity for p, r in zip(probs, reps)),
    )
