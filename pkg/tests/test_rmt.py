import numpy as np
import pytest

from freeconv import measures as ms, rect as rc, rmt


def test_haar_unitary_is_unitary():
    U = rmt.haar_unitary(64, seed=1)
    assert np.max(np.abs(U @ U.conj().T - np.eye(64))) < 1e-12


def test_haar_unitary_n1_is_phase():
    rng = np.random.default_rng(2)
    vals = np.array([rmt.haar_unitary(1, rng)[0, 0] for _ in range(500)])
    assert np.max(np.abs(np.abs(vals) - 1.0)) < 1e-12
    assert abs(np.mean(vals)) < 0.1               # phases average out


def test_haar_trace_moment():
    # E |tr U|^2 = 1 for Haar on U(n)
    rng = np.random.default_rng(3)
    vals = [abs(np.trace(rmt.haar_unitary(8, rng))) ** 2 for _ in range(1500)]
    assert np.mean(vals) == pytest.approx(1.0, abs=0.1)


def test_square_model_delta0_is_iid():
    sc = ms.Semicircle(1.0)
    spec = rmt.square_model_spectrum(sc, ms.DiracMass(0.0), 400, trials=1, seed=5)
    rng = np.random.default_rng(np.random.SeedSequence(5).spawn(1)[0])
    direct = np.sort(sc.sample(rng, 400))
    assert np.max(np.abs(spec.samples - direct)) < 1e-8


def test_square_model_semicircle_addition():
    sc = ms.Semicircle(1.0)
    spec = rmt.square_model_spectrum(sc, sc, 1000, trials=5, seed=7)
    ks = rmt.ks_distance(spec, ms.Semicircle(2.0))
    assert ks < 0.02


def test_square_model_bernoulli_arcsine():
    b = ms.SymmetricBernoulli(1.0)
    spec = rmt.square_model_spectrum(b, b, 1000, trials=5, seed=8)
    ks = rmt.ks_distance(spec, ms.Arcsine(2.0))
    assert ks < 0.02


def test_rect_model_delta0_symmetrizes():
    b = ms.SymmetricBernoulli(1.5)
    spec = rmt.rect_model_spectrum(b, ms.DiracMass(0.0), 200, lam=0.5,
                                   trials=1, seed=6)
    assert spec.kind == "singular-symmetrized"
    assert spec.samples.size == 2 * 200
    assert np.allclose(np.sort(-spec.samples), spec.samples)  # symmetric set
    assert np.max(np.abs(np.abs(spec.samples) - 1.5)) < 1e-12


def test_rect_model_gaussians_give_mp_sqrt():
    rg = ms.RectStable(2.0, 1.0, 0.5)
    spec = rmt.rect_model_spectrum(rg, rg, 400, lam=0.5, trials=4, seed=9)
    ks = rmt.ks_distance(spec, ms.RectStable(2.0, 2.0, 0.5))
    assert ks < 0.03


def test_rect_model_stable_semigroup():
    s1 = ms.RectStable(1.0, 0.5, 0.5)
    spec = rmt.rect_model_spectrum(s1, s1, 500, lam=0.5, trials=4, seed=10)
    ks = rmt.ks_distance(spec, ms.RectStable(1.0, 1.0, 0.5))
    assert ks < 0.03


def test_ks_distance_basics():
    xs = np.linspace(-1, 1, 1001)
    curve_samples = rmt.EmpiricalSpectrum(xs, 1, (1001,), "eigenvalues")
    assert rmt.ks_distance(curve_samples, lambda x: (np.asarray(x) + 1) / 2) < 1e-3
    d0 = rmt.EmpiricalSpectrum(np.zeros(100), 1, (100,), "eigenvalues")
    assert rmt.ks_distance(d0, ms.DiracMass(1.0).cdf) == pytest.approx(1.0)


def test_ks_self_sampling():
    sc = ms.Semicircle(1.0)
    rng = np.random.default_rng(11)
    s = rmt.EmpiricalSpectrum(sc.sample(rng, 100_000), 1, (0,), "eigenvalues")
    assert rmt.ks_distance(s, sc) < 0.01


def test_convergence_in_N():
    # mean KS decreases from N = 200 to N = 1000 over seeds
    sc = ms.Semicircle(1.0)
    target = ms.Semicircle(2.0)
    ks_small, ks_big = [], []
    for seed in range(6):
        ks_small.append(rmt.ks_distance(
            rmt.square_model_spectrum(sc, sc, 200, trials=1, seed=seed), target))
        ks_big.append(rmt.ks_distance(
            rmt.square_model_spectrum(sc, sc, 1000, trials=1, seed=seed), target))
    assert np.mean(ks_big) < np.mean(ks_small)


def test_atom_reproduction_rect():
    lam = 0.5
    mu = ms.RectIDLaw(ms.AtomicMeasure([(-1, 0.1), (1, 0.1)],
                                       require_probability=False), lam)
    nu = ms.RectIDLaw(ms.AtomicMeasure([(-1, 0.075), (1, 0.075)],
                                       require_probability=False), lam)
    muS = rc.realize_rect_id(mu)
    nuS = rc.realize_rect_id(nu)
    spec = rmt.rect_model_spectrum(muS, nuS, 600, lam=lam, trials=3, seed=12)
    assert spec.mass_near(0.0, tol=1e-9) == pytest.approx(0.3, abs=0.02)


def test_hole_reproduction_rect():
    rg = ms.RectStable(2.0, 1.0, 0.5)
    spec = rmt.rect_model_spectrum(rg, rg, 1000, lam=0.5, trials=2, seed=13)
    hole = np.sqrt(2.0) * (1 - np.sqrt(0.5))
    inside = spec.mass_in(-0.9 * hole, 0.9 * hole)
    assert inside < 0.005


def test_reproducibility_and_workers():
    sc = ms.Semicircle(1.0)
    a = rmt.square_model_spectrum(sc, sc, 100, trials=4, seed=3, workers=1)
    b = rmt.square_model_spectrum(sc, sc, 100, trials=4, seed=3, workers=4)
    assert np.array_equal(a.samples, b.samples)


def test_summary_roundtrip(tmp_path):
    sc = ms.Semicircle(1.0)
    spec = rmt.square_model_spectrum(sc, sc, 50, trials=1, seed=4)
    p = tmp_path / "spec.json"
    spec.write_summary(p, ks=0.01)
    import json
    payload = json.loads(p.read_text())
    assert payload["n"] == 50 and payload["ks"] == 0.01
    spec.write_csv(tmp_path / "spec.csv")
    assert (tmp_path / "spec.csv").read_text().startswith("sample")
