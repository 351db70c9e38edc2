import numpy as np
import pytest

from qmt.oracle_mc import (
    McEstimate,
    Moments,
    chunk_generators,
    check_spectrum,
    closed_form_targets,
    default_suite,
    estimate_all,
    mc_averages,
    mc_quantities,
    moment_constants,
    moment_targets,
    sample_state,
    sample_states,
)
from qmt.spectrum import SingularSpectrum


def test_norm():
    rng = np.random.default_rng(3)
    for d in (2, 3, 6):
        states = sample_states(d, 1000, rng)
        assert np.max(np.abs(np.sum(np.abs(states) ** 2, axis=1) - 1)) < 1e-12
    s = sample_state(4, rng)
    assert s.d == 4 and abs(s.weights.sum() - 1) < 1e-12


def test_sample_state_deterministic():
    a = sample_state(2, np.random.Generator(np.random.Philox(42)))
    b = sample_state(2, np.random.Generator(np.random.Philox(42)))
    assert a.amplitudes.tobytes() == b.amplitudes.tobytes()


def test_chunk_layout():
    chunks = chunk_generators(0, 150_000, 65536)
    assert [m for _, m in chunks] == [65536, 65536, 150_000 - 131072]


def test_moments_merge_matches_direct():
    x = np.random.default_rng(0).normal(size=(1000, 3))
    merged = Moments.from_samples(x[:300]).merge(Moments.from_samples(x[300:]))
    direct = Moments.from_samples(x)
    assert merged.count == 1000
    assert np.allclose(merged.mean, direct.mean, rtol=0, atol=1e-14)
    assert np.allclose(merged.comoment, direct.comoment, rtol=1e-12)


def test_targets():
    assert moment_targets(2) == pytest.approx({"C": 1 / 2, "D": 1 / 3, "E": 1 / 6})
    assert moment_targets(4) == pytest.approx({"C": 1 / 4, "D": 1 / 10, "E": 1 / 20})
    t = closed_form_targets(SingularSpectrum((1.0, 0.5)))
    assert t["qbar"] == pytest.approx(0.625)
    assert t["f2bar"] == pytest.approx(3.5 / 6)
    assert t["I"] == pytest.approx(0.0900577, abs=1e-6)
    assert t["F"] == pytest.approx(14 / 15)
    assert t["R"] == pytest.approx(0.4)
    assert t["G"] == pytest.approx(0.6)


def test_identity_qbar_zero_variance():
    qbar, _, _ = mc_averages(SingularSpectrum((1.0,) * 3), 20_000, 1)
    assert qbar.std_error == 0.0 and qbar.exact
    assert qbar.mean == pytest.approx(1.0, abs=1e-14)


def test_rank_one_reversibility_exact():
    q = mc_quantities(SingularSpectrum((1.0, 0.0, 0.0)), 20_000, 2)
    assert q.R.mean == 0.0 and q.R.std_error == 0.0


def test_determinism_and_thread_independence():
    s = SingularSpectrum((1.0, 0.6, 0.6))
    a = estimate_all(s, 200_000, 42, threads=1)
    b = estimate_all(s, 200_000, 42, threads=1)
    c = estimate_all(s, 200_000, 42, threads=4)
    assert a == b == c


def test_seed_changes_estimate():
    s = SingularSpectrum((1.0, 0.5))
    assert estimate_all(s, 20_000, 1)["I"].mean != estimate_all(s, 20_000, 2)["I"].mean


@pytest.mark.parametrize("d", [2, 4])
def test_moment_constants(d):
    est = moment_constants(d, 1_000_000, 7)
    targets = moment_targets(d)
    for name, e in zip("CDE", est):
        assert e.agrees(targets[name]), (name, e, targets[name])


def test_bootstrap_close_to_delta():
    s = SingularSpectrum((1.0, 0.5))
    delta = estimate_all(s, 30_000, 5)
    boot = estimate_all(s, 30_000, 5, method="bootstrap")
    for name in ("I", "F", "G", "qbar"):
        assert boot[name].mean == pytest.approx(delta[name].mean, rel=1e-12)
        assert 0.6 < boot[name].std_error / delta[name].std_error < 1.6
    with pytest.raises(ValueError):
        estimate_all(s, 30_000, 5, method="jackknife")


def test_z_score_exact():
    e = McEstimate(1.0, 0.0, 10, 0)
    assert e.z_score(1.0) == 0.0 and e.agrees(1.0)
    assert not e.agrees(1.1)


def test_check_rows_small_suite():
    rows = check_spectrum(SingularSpectrum((1.0, 0.5)), 100_000, 3, label="x")
    assert {r.quantity for r in rows} == {
        "qbar", "qlogqbar", "f2bar", "I", "F", "R", "G", "C", "D", "E"
    }
    assert all(r.status != "FAIL" for r in rows)


def test_default_suite_shape():
    suite = default_suite()
    assert len(suite) == 12
    for label, s in suite:
        if label.endswith("mixed") and s.d > 2:
            assert len(set(s.values)) < s.d
