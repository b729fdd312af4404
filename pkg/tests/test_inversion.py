import json

import numpy as np
import pytest

from freeconv import inversion as inv, measures as ms, square as sq
from freeconv.inversion import CuspClass


def test_stieltjes_density_examples():
    d0 = ms.DiracMass(0.0)
    d, e = inv.stieltjes_density(d0.cauchy, 1.0)
    assert d == pytest.approx(0.0, abs=1e-10)

    c = ms.CauchyLaw(1.0)
    d, e = inv.stieltjes_density(c.cauchy, 0.0)
    assert d == pytest.approx(1 / np.pi, abs=1e-10)

    sc = ms.Semicircle(1.0)
    d, e = inv.stieltjes_density(sc.cauchy, 0.0)
    assert d == pytest.approx(1 / np.pi, abs=1e-8)


def test_stieltjes_density_grid_matches_family():
    # closed-form families rendered to curves reproduce the analytic density
    for m in (ms.Semicircle(1.0), ms.FreePoisson(2.0), ms.Arcsine(1.0)):
        lo, hi = m.support()
        width = hi - lo
        xs = np.linspace(lo + 0.08 * width, hi - 0.08 * width, 101)
        d, e = inv.stieltjes_density_grid(m.cauchy, xs)
        assert np.max(np.abs(d - m.density(xs))) < np.maximum(1e-5, e).max()


def test_atom_mass_examples():
    assert inv.atom_mass(ms.DiracMass(0.0).cauchy, 0.0) == pytest.approx(1.0, abs=1e-10)
    b = ms.SymmetricBernoulli(1.0)
    assert inv.atom_mass(b.cauchy, 1.0) == pytest.approx(0.5, abs=1e-10)
    assert inv.atom_mass(ms.Semicircle(1.0).cauchy, 0.0) == pytest.approx(0.0, abs=1e-6)


def test_atom_mass_full_reports_residual():
    mass, err, imres = inv.atom_mass_full(ms.DiracMass(0.0).cauchy, 0.0)
    assert mass == pytest.approx(1.0, abs=1e-10)
    assert imres < 1e-8


def test_richardson_nonmonotone_fallback():
    ladder = np.geomspace(1e-3, 1e-5, 5)
    noisy = np.array([1.0, 1.01, 0.99, 1.05, 0.7])
    val, err = inv.richardson(noisy, ladder)
    assert val == pytest.approx(0.7)
    assert err > 0.1


def test_support_scan_and_hole():
    st = ms.RectStable(1.0, 1.0, 0.5)
    xs = np.linspace(-3, 3, 601)
    curve = inv.DensityCurve(xs, st.density(xs), np.zeros_like(xs))
    holes = curve.hole()
    assert holes is not None
    lo, hi = holes
    assert lo == pytest.approx(-0.25, abs=0.02)
    assert hi == pytest.approx(0.25, abs=0.02)

    sc = ms.Semicircle(1.0)
    curve2 = inv.DensityCurve(xs, sc.density(xs), np.zeros_like(xs))
    assert len(curve2.support) == 1
    a, b = curve2.support[0]
    assert a == pytest.approx(-2.0, abs=0.02)
    assert b == pytest.approx(2.0, abs=0.02)
    assert curve2.hole() is None


def test_support_scan_atomic_curve_is_empty():
    xs = np.linspace(-2, 2, 101)
    curve = inv.DensityCurve(xs, np.zeros_like(xs), np.zeros_like(xs),
                             atoms=[(-1.0, 0.5), (1.0, 0.5)])
    assert curve.support == []
    assert curve.total_mass() == pytest.approx(1.0)


def _convolution_curve(a, halfwidth=0.75, n=301):
    h = sq.SquareConvHandle(ms.Semicircle(1.0), ms.SymmetricBernoulli(a))
    grid = np.linspace(-halfwidth, halfwidth, n)
    curve = sq.density_curve_square(h, grid)
    # widen the fitting context: support of the full law
    curve.support = [[-1 - a, 1 + a]]
    return curve


def test_cusp_detect_three_regimes():
    assert inv.cusp_detect(_convolution_curve(0.5), 0.0) is CuspClass.POSITIVE
    assert inv.cusp_detect(_convolution_curve(1.0), 0.0) is CuspClass.CUSP
    assert inv.cusp_detect(_convolution_curve(2.0), 0.0) is CuspClass.ZERO_FINITE_SLOPE


def test_cusp_detect_undecided_without_data():
    xs = np.linspace(-1, 1, 7)
    curve = inv.DensityCurve(xs, np.abs(xs), np.zeros_like(xs))
    assert inv.cusp_detect(curve, 0.0) is CuspClass.UNDECIDED


def test_counterexample_pair_zero_finite_slope():
    # mu = semicircle with transform z -> 1/(2z) (variance one half)
    from freeconv.specparse import parse_measure_spec
    nu = parse_measure_spec('transform{which:"F", expr:"z + i - 1 + (z-i)/(z+i) - 1/z"}')
    h = sq.SquareConvHandle(ms.Semicircle(0.5), nu)
    grid = np.linspace(-0.6, 0.6, 241)
    curve = sq.density_curve_square(h, grid, detect_atoms=False)
    assert curve.density_at(0.0) < 1e-6
    curve.support = [[-2.0, 2.0]]
    assert inv.cusp_detect(curve, 0.0) is CuspClass.ZERO_FINITE_SLOPE


def test_mass_conservation_with_atoms():
    # point-mass shift keeps nu intact: atom mass + density integral = 1
    nu = ms.AtomicMeasure([(-1.0, 0.5), (1.0, 0.5)])
    h = sq.SquareConvHandle(ms.DiracMass(0.0), nu)
    curve = sq.density_curve_square(h, np.linspace(-2, 2, 101))
    assert curve.atom_mass_total() + curve.integral() == pytest.approx(1.0, abs=2e-3)


def test_csv_and_sidecar_roundtrip(tmp_path):
    xs = np.linspace(-1, 1, 11)
    curve = inv.DensityCurve(xs, np.abs(xs), 0.01 * np.ones_like(xs),
                             atoms=[(0.0, 0.25)])
    csv_path = tmp_path / "curve.csv"
    json_path = tmp_path / "curve.json"
    curve.write_csv(csv_path)
    curve.write_sidecar(json_path)
    rows = csv_path.read_text().strip().splitlines()
    assert rows[0] == "x,density,error_bar,flag"
    assert len(rows) == 12
    payload = json.loads(json_path.read_text())
    assert payload["atoms"] == [{"position": 0.0, "mass": 0.25}]
    assert all(len(iv) == 2 for iv in payload["support"])


def test_negative_density_clipped_and_flagged():
    xs = np.linspace(-1, 1, 5)
    curve = inv.DensityCurve(xs, np.array([0.1, -5e-7, 0.2, -1e-9, 0.1]),
                             np.zeros(5))
    assert np.all(curve.density >= 0)
    assert curve.flags[1] == int(inv.PointFlag.CLIPPED)
    assert curve.flags[3] == 0     # within the noise floor, silently clipped
