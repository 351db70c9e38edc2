"""Monte Carlo oracle over uniformly distributed pure states.

States are normalised complex Gaussian vectors, which are uniform on the unit
sphere of ``C^d``.  Samples are drawn in fixed-size chunks, each from its own
Philox stream spawned from the seed, so results depend only on
``(seed, n, chunk_size)`` and not on how many threads ran the chunks.
Per-chunk means and co-moments are merged in chunk order.

Conditional averages over the posterior ``p(a|m) ~ q_m(a)`` are formed as
ratios ``mean[q X] / mean[q]``; their standard errors come from the delta
method, or optionally from a nonparametric bootstrap.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from . import coefficients as co
from .quantities import (
    estimation_fidelity,
    fidelity,
    information,
    j_value,
    reversibility,
)
from .spectrum import SingularSpectrum, hs_norm_sq, trace_norm

CHUNK_SIZE = 1 << 16
BOOTSTRAP_RESAMPLES = 200
# Standard errors this small relative to the mean are floating-point noise on a
# deterministic quantity.
EXACT_REL_SE = 1e-12

FEATURES = ("q", "qlogq", "f2", "g", "c2", "c4", "c2c2")


@dataclass(frozen=True)
class PureStateSample:
    amplitudes: np.ndarray

    @property
    def d(self) -> int:
        return self.amplitudes.shape[-1]

    @property
    def weights(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    n_samples: int
    seed: int

    @property
    def exact(self) -> bool:
        return self.std_error == 0.0

    def z_score(self, target: float) -> float:
        if self.exact:
            return 0.0 if abs(self.mean - target) <= 1e-9 else math.inf
        return (self.mean - target) / self.std_error

    def agrees(self, target: float, n_sigma: float = 4.0) -> bool:
        return abs(self.z_score(target)) <= n_sigma


def thread_count() -> int:
    raw = os.environ.get("QMT_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    return n if n > 0 else (os.cpu_count() or 1)


def sample_states(d: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` uniformly distributed normalised states as an ``(n, d)`` complex array."""
    if d < 2:
        raise ValueError("dimension must be at least 2")
    z = rng.standard_normal((n, 2 * d))
    c = z[:, :d] + 1j * z[:, d:]
    c /= np.linalg.norm(c, axis=1, keepdims=True)
    return c


def sample_state(d: int, rng: np.random.Generator) -> PureStateSample:
    return PureStateSample(sample_states(d, 1, rng)[0])


def chunk_generators(seed: int, n: int, chunk_size: int = CHUNK_SIZE):
    """``(generator, size)`` per chunk; the layout is a pure function of its arguments."""
    n_chunks = max(1, -(-n // chunk_size))
    children = np.random.SeedSequence(seed).spawn(n_chunks)
    sizes = [chunk_size] * (n_chunks - 1) + [n - chunk_size * (n_chunks - 1)]
    return [(np.random.Generator(np.random.Philox(ss)), m) for ss, m in zip(children, sizes)]


@dataclass
class Moments:
    """Running count, mean vector and co-moment matrix of feature vectors."""

    count: int
    mean: np.ndarray
    comoment: np.ndarray

    @classmethod
    def from_samples(cls, x: np.ndarray) -> "Moments":
        mean = x.mean(axis=0)
        centred = x - mean
        return cls(x.shape[0], mean, centred.T @ centred)

    def merge(self, other: "Moments") -> "Moments":
        n = self.count + other.count
        delta = other.mean - self.mean
        mean = self.mean + delta * (other.count / n)
        comoment = (
            self.comoment
            + other.comoment
            + np.outer(delta, delta) * (self.count * other.count / n)
        )
        return Moments(n, mean, comoment)

    @property
    def covariance_of_mean(self) -> np.ndarray:
        """Sample covariance divided by the count."""
        return self.comoment / (self.count - 1) / self.count


def features(spectrum: SingularSpectrum, states: np.ndarray) -> np.ndarray:
    """Per-state columns in :data:`FEATURES` order.

    ``q`` is the outcome probability, ``f2`` the squared unnormalised overlap,
    ``g = q |c_l|^2`` with ``l`` the index of the largest singular value, and
    the last three are ``|c_1|^2``, ``|c_1|^4`` and ``|c_1|^2 |c_d|^2``.
    """
    lam = np.asarray(spectrum.values)
    w = np.abs(states) ** 2
    q = w @ (lam * lam)
    with np.errstate(divide="ignore", invalid="ignore"):
        qlogq = np.where(q > 0, q * np.log2(np.where(q > 0, q, 1.0)), 0.0)
    f = w @ lam
    l_idx = int(np.argmax(lam))
    return np.column_stack(
        [q, qlogq, f * f, q * w[:, l_idx], w[:, 0], w[:, 0] ** 2, w[:, 0] * w[:, -1]]
    )


def _run_chunks(work: Callable, items: list, threads: int | None):
    threads = thread_count() if threads is None else max(1, threads)
    if threads == 1 or len(items) == 1:
        return [work(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(work, items))


def feature_moments(
    spectrum: SingularSpectrum,
    n: int,
    seed: int,
    *,
    chunk_size: int = CHUNK_SIZE,
    threads: int | None = None,
) -> Moments:
    d = spectrum.d

    def work(item):
        rng, m = item
        return Moments.from_samples(features(spectrum, sample_states(d, m, rng)))

    parts = _run_chunks(work, chunk_generators(seed, n, chunk_size), threads)
    total = parts[0]
    for part in parts[1:]:
        total = total.merge(part)
    return total


def feature_samples(
    spectrum: SingularSpectrum, n: int, seed: int, *, chunk_size: int = CHUNK_SIZE
) -> np.ndarray:
    """All per-state feature rows, drawn from the same streams as :func:`feature_moments`."""
    d = spectrum.d
    rows = [features(spectrum, sample_states(d, m, rng)) for rng, m in chunk_generators(seed, n, chunk_size)]
    return np.vstack(rows)


# Estimators as functions of the feature mean vector, with analytic gradients.

def _est_plain(i):
    return lambda mu: mu[i], lambda mu: np.eye(len(mu))[i]


def _est_ratio(i, j):
    def value(mu):
        return mu[i] / mu[j]

    def grad(mu):
        g = np.zeros(len(mu))
        g[i] = 1 / mu[j]
        g[j] = -mu[i] / mu[j] ** 2
        return g

    return value, grad


def _est_information():
    q, ql = FEATURES.index("q"), FEATURES.index("qlogq")

    def value(mu):
        return mu[ql] / mu[q] - math.log2(mu[q])

    def grad(mu):
        g = np.zeros(len(mu))
        g[ql] = 1 / mu[q]
        g[q] = -mu[ql] / mu[q] ** 2 - 1 / (mu[q] * co.LN2)
        return g

    return value, grad


def _est_reversibility(lam_min_sq):
    q = FEATURES.index("q")

    def value(mu):
        return lam_min_sq / mu[q]

    def grad(mu):
        g = np.zeros(len(mu))
        g[q] = -lam_min_sq / mu[q] ** 2
        return g

    return value, grad


def _estimators(spectrum: SingularSpectrum) -> dict:
    idx = FEATURES.index
    return {
        "qbar": _est_plain(idx("q")),
        "qlogqbar": _est_plain(idx("qlogq")),
        "f2bar": _est_plain(idx("f2")),
        "I": _est_information(),
        "F": _est_ratio(idx("f2"), idx("q")),
        "R": _est_reversibility(spectrum.lam_min ** 2),
        "G": _est_ratio(idx("g"), idx("q")),
        "C": _est_plain(idx("c2")),
        "D": _est_plain(idx("c4")),
        "E": _est_plain(idx("c2c2")),
    }


def _finish(mean: float, se: float, n: int, seed: int) -> McEstimate:
    if se <= EXACT_REL_SE * max(1.0, abs(mean)):
        se = 0.0
    return McEstimate(float(mean), float(se), n, seed)


def estimate_all(
    spectrum: SingularSpectrum,
    n: int,
    seed: int,
    *,
    method: str = "delta",
    chunk_size: int = CHUNK_SIZE,
    threads: int | None = None,
) -> dict[str, McEstimate]:
    """Every Monte Carlo estimate for one spectrum from a single set of samples.

    ``method`` is ``"delta"`` (default) or ``"bootstrap"``.
    """
    ests = _estimators(spectrum)
    lam_min_zero = spectrum.lam_min == 0.0
    out: dict[str, McEstimate] = {}
    if method == "delta":
        mom = feature_moments(spectrum, n, seed, chunk_size=chunk_size, threads=threads)
        cov = mom.covariance_of_mean
        for name, (value, grad) in ests.items():
            g = grad(mom.mean)
            se = math.sqrt(max(float(g @ cov @ g), 0.0))
            out[name] = _finish(value(mom.mean), se, n, seed)
    elif method == "bootstrap":
        x = feature_samples(spectrum, n, seed, chunk_size=chunk_size)
        mu = x.mean(axis=0)
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, 1])))
        boot = np.empty((BOOTSTRAP_RESAMPLES, x.shape[1]))
        for b in range(BOOTSTRAP_RESAMPLES):
            counts = np.bincount(rng.integers(0, n, n), minlength=n)
            boot[b] = counts @ x / n
        for name, (value, _) in ests.items():
            reps = np.array([value(row) for row in boot])
            out[name] = _finish(value(mu), float(reps.std(ddof=1)), n, seed)
    else:
        raise ValueError(f"unknown error method {method!r}")
    if lam_min_zero:
        out["R"] = McEstimate(0.0, 0.0, n, seed)
    return out


class MomentConstants(NamedTuple):
    C: McEstimate
    D: McEstimate
    E: McEstimate


class StateAverages(NamedTuple):
    qbar: McEstimate
    qlogqbar: McEstimate
    f2bar: McEstimate


class McQuantities(NamedTuple):
    I: McEstimate
    F: McEstimate
    R: McEstimate
    G: McEstimate


def moment_constants(d: int, n: int, seed: int, **kw) -> MomentConstants:
    """Estimates of ``mean|c_i|^2``, ``mean|c_i|^4`` and ``mean|c_i|^2|c_j|^2``."""
    est = estimate_all(SingularSpectrum((1.0,) * d), n, seed, **kw)
    return MomentConstants(est["C"], est["D"], est["E"])


def mc_averages(spectrum: SingularSpectrum, n: int, seed: int, **kw) -> StateAverages:
    est = estimate_all(spectrum, n, seed, **kw)
    return StateAverages(est["qbar"], est["qlogqbar"], est["f2bar"])


def mc_quantities(spectrum: SingularSpectrum, n: int, seed: int, **kw) -> McQuantities:
    est = estimate_all(spectrum, n, seed, **kw)
    return McQuantities(est["I"], est["F"], est["R"], est["G"])


def moment_targets(d: int) -> dict[str, float]:
    return {"C": 1 / d, "D": 2 / (d * (d + 1)), "E": 1 / (d * (d + 1))}


def closed_form_targets(spectrum: SingularSpectrum) -> dict[str, float]:
    """Exact values that the Monte Carlo estimates of :func:`estimate_all` approach."""
    d = spectrum.d
    sigma_sq = hs_norm_sq(spectrum)
    tau = trace_norm(spectrum)
    targets = {
        "qbar": sigma_sq / d,
        "qlogqbar": j_value(spectrum) / d - float(co.harmonic(d) - 1) * sigma_sq / (d * co.LN2),
        "f2bar": (sigma_sq + tau * tau) / (d * (d + 1)),
        "I": information(spectrum),
        "F": fidelity(spectrum),
        "R": reversibility(spectrum),
        "G": estimation_fidelity(spectrum),
    }
    targets.update(moment_targets(d))
    return targets


class CheckRow(NamedTuple):
    label: str
    quantity: str
    target: float
    estimate: McEstimate

    @property
    def z(self) -> float:
        return self.estimate.z_score(self.target)

    @property
    def status(self) -> str:
        if not self.estimate.agrees(self.target):
            return "FAIL"
        return "exact" if self.estimate.exact else "pass"


def check_spectrum(
    spectrum: SingularSpectrum, n: int, seed: int, label: str = "", **kw
) -> list[CheckRow]:
    est = estimate_all(spectrum, n, seed, **kw)
    targets = closed_form_targets(spectrum)
    return [CheckRow(label, name, targets[name], est[name]) for name in targets]


def default_suite() -> list[tuple[str, SingularSpectrum]]:
    """Identity, rank-1 projector and one spectrum with a repeated value, for each d."""
    mixed = {
        2: (1.0, 0.5),
        3: (1.0, 0.6, 0.6),
        4: (1.0, 0.5, 0.5, 0.2),
        6: (0.75, 0.5, 0.5, 0.5, 0.25, 0.25),
    }
    suite = []
    for d, vals in mixed.items():
        suite.append((f"d{d}-identity", SingularSpectrum((1.0,) * d)))
        suite.append((f"d{d}-rank1", SingularSpectrum((1.0,) + (0.0,) * (d - 1))))
        suite.append((f"d{d}-mixed", SingularSpectrum(vals)))
    return suite
