import numpy as np

from qmt.spectrum import MeasurementSet, SingularSpectrum


def random_measurement_set(rng: np.random.Generator, d: int, outcomes: int) -> MeasurementSet:
    """Random complete measurement: M_m = A_m S^(-1/2) with S = sum_m A_m^dag A_m."""
    mats = [rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)) for _ in range(outcomes)]
    s = sum(a.conj().T @ a for a in mats)
    w, v = np.linalg.eigh(s)
    inv_sqrt = v @ np.diag(w**-0.5) @ v.conj().T
    spectra = []
    for a in mats:
        sv = np.linalg.svd(a @ inv_sqrt, compute_uv=False)
        sv = np.clip(sv, 0.0, 1.0)
        spectra.append(SingularSpectrum(tuple(sorted(map(float, sv), reverse=True))))
    return MeasurementSet(tuple(spectra))


def random_distinct_spectrum(rng: np.random.Generator, d: int) -> SingularSpectrum:
    vals = rng.uniform(0.0, 1.0, d)
    while len(set(vals)) < d:
        vals = rng.uniform(0.0, 1.0, d)
    vals /= vals.max()
    return SingularSpectrum(tuple(sorted(map(float, vals), reverse=True)))
