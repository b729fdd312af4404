import numpy as np
import pytest

from freeconv import measures as ms
from freeconv.errors import DomainError, PoleError

try:
    from scipy import integrate
    HAVE_SCIPY = True
except ImportError:
    HAVE_SCIPY = False


def quad_cauchy(density, a, b, z, **kw):
    """Independent quadrature oracle for G(z) of a density on [a, b]."""
    re, _ = integrate.quad(lambda x: density(x) * ((z - x).real / abs(z - x) ** 2),
                           a, b, limit=400, **kw)
    im, _ = integrate.quad(lambda x: density(x) * (-(z - x).imag / abs(z - x) ** 2),
                           a, b, limit=400, **kw)
    return re + 1j * im


# ---------------------------------------------------------------------------
# construction invariants
# ---------------------------------------------------------------------------

def test_atomic_mass_must_sum_to_one():
    with pytest.raises(DomainError):
        ms.AtomicMeasure([(0.0, 0.5), (1.0, 0.6)])
    ms.AtomicMeasure([(0.0, 0.5), (1.0, 0.6)], require_probability=False)


def test_atomic_rejects_duplicates_and_nonpositive():
    with pytest.raises(DomainError):
        ms.AtomicMeasure([(0.0, 0.5), (0.0, 0.5)])
    with pytest.raises(DomainError):
        ms.AtomicMeasure([(0.0, 1.0), (1.0, 0.0)], require_probability=False)


def test_grid_mass_invariant():
    x = np.linspace(-1, 1, 11)
    v = np.ones_like(x) * 0.5
    ms.GridDensityMeasure(x, v)  # mass exactly 1
    with pytest.raises(DomainError):
        ms.GridDensityMeasure(x, v * 1.01)


def test_parameter_domains():
    for bad in (lambda: ms.Semicircle(0.0), lambda: ms.CauchyLaw(-1.0),
                lambda: ms.SymmetricBernoulli(0.0), lambda: ms.FreePoisson(0.0),
                lambda: ms.RectStable(2.5, 1.0, 0.5),
                lambda: ms.RectStable(1.0, 1.0, 0.0),
                lambda: ms.MarchenkoPastur(1.5)):
        with pytest.raises(DomainError):
            bad()


# ---------------------------------------------------------------------------
# Cauchy transform values (oracle-frozen)
# ---------------------------------------------------------------------------

def test_cauchy_transform_point_mass():
    assert ms.DiracMass(0.0).cauchy(1j) == pytest.approx(-1j)


def test_cauchy_transform_semicircle_frozen():
    # independent adaptive-quadrature oracle gives i (1 - sqrt 2); the value
    # -0.5858i sometimes quoted drops the division by two in (z - sqrt(..))/2
    val = ms.Semicircle(1.0).cauchy(2j)
    assert val == pytest.approx(1j * (1.0 - np.sqrt(2.0)), abs=1e-12)


@pytest.mark.skipif(not HAVE_SCIPY, reason="oracle needs scipy")
def test_cauchy_transform_semicircle_quadrature():
    sc = ms.Semicircle(1.0)
    for z in (2j, 0.7 + 0.4j, -1.2 + 0.9j):
        assert sc.cauchy(z) == pytest.approx(
            quad_cauchy(sc.density, -2, 2, z), abs=1e-8)


def test_cauchy_law_transform():
    c = ms.CauchyLaw(1.0)
    for y in (0.5, 1.0, 3.0):
        assert c.cauchy(1j * y) == pytest.approx(-1j / (y + 1.0))


def test_two_atom_reciprocal_frozen():
    # hand-checkable two-atom sum: G(i) = (1/(i-1) + 1/(i+1))/2 = -i/2
    b = ms.SymmetricBernoulli(1.0)
    assert b.cauchy(1j) == pytest.approx(-0.5j)
    assert b.reciprocal_cauchy(1j) == pytest.approx(2j)


@pytest.mark.skipif(not HAVE_SCIPY, reason="oracle needs scipy")
def test_free_poisson_and_mp_quadrature():
    fp = ms.FreePoisson(2.0)
    z = 1.5 + 0.7j
    assert fp.cauchy(z) == pytest.approx(
        quad_cauchy(fp.density, fp.edge_lo, fp.edge_hi, z), abs=1e-7)
    mp = ms.MarchenkoPastur(0.5, 1.3)
    z = 0.4 + 0.3j
    assert mp.cauchy(z) == pytest.approx(
        quad_cauchy(mp.density, mp.edge_lo, mp.edge_hi, z), abs=1e-7)


def test_free_poisson_atom_comes_out_of_transform():
    fp = ms.FreePoisson(0.5)
    eps = 1e-7
    mass = (1j * eps * fp.cauchy(1j * eps)).real
    assert mass == pytest.approx(0.5, abs=1e-5)


def test_pole_errors():
    with pytest.raises(PoleError):
        ms.DiracMass(1.0).cauchy(1.0 + 0j)
    with pytest.raises(PoleError):
        ms.FreePoisson(2.0).cauchy(0.0 + 0j)


def test_grid_quadrature_matches_closed_form():
    # spec tolerance: 1e-6 at distance >= 0.1 from the axis
    sc = ms.Semicircle(1.0)
    x = np.linspace(-2, 2, 20001)
    g = ms.GridDensityMeasure(x, sc.density(x), normalize=True)
    zs = np.array([0.3 + 0.1j, -1.0 + 0.5j, 1.7 + 0.1j, 2.4 + 0.1j])
    assert np.max(np.abs(g.cauchy(zs) - sc.cauchy(zs))) < 1e-6


def test_grid_refuses_points_on_axis_over_support():
    x = np.linspace(-1, 1, 101)
    g = ms.GridDensityMeasure(x, np.full_like(x, 0.5))
    with pytest.raises(DomainError):
        g.cauchy(0.2 + 1e-9j)
    # but evaluates off the support on the axis
    assert np.isfinite(g.cauchy(5.0 + 0j).real)


# ---------------------------------------------------------------------------
# properties: conjugate symmetry, Nevanlinna bound, psi identity
# ---------------------------------------------------------------------------

MEASURES = [
    ms.AtomicMeasure([(-1.0, 0.25), (0.3, 0.5), (2.0, 0.25)]),
    ms.Semicircle(1.4),
    ms.CauchyLaw(0.7),
    ms.SymmetricBernoulli(1.0),
    ms.FreePoisson(2.0),
    ms.Arcsine(1.5),
    ms.MarchenkoPastur(0.5),
]


@pytest.mark.parametrize("m", MEASURES, ids=lambda m: type(m).__name__)
def test_conjugate_symmetry(m):
    rng = np.random.default_rng(5)
    z = rng.uniform(-3, 3, 50) + 1j * rng.uniform(0.05, 2.0, 50)
    assert np.max(np.abs(m.cauchy(np.conj(z)) - np.conj(m.cauchy(z)))) < 1e-12


@pytest.mark.parametrize("m", MEASURES, ids=lambda m: type(m).__name__)
def test_nevanlinna_bound(m):
    rng = np.random.default_rng(6)
    z = rng.uniform(-3, 3, 50) + 1j * rng.uniform(0.05, 2.0, 50)
    F = 1.0 / np.asarray(m.cauchy(z))
    assert np.all(F.imag >= z.imag - 1e-12)


def test_nevanlinna_equality_iff_point_mass():
    z = np.array([0.5 + 0.3j, -1 + 1j, 2 + 0.08j])
    F = 1.0 / np.asarray(ms.DiracMass(1.3).cauchy(z))
    assert np.max(np.abs(F.imag - z.imag)) < 1e-12
    F2 = 1.0 / np.asarray(ms.Semicircle(1.0).cauchy(z))
    assert np.all(F2.imag > z.imag + 1e-6)


@pytest.mark.parametrize("m", MEASURES, ids=lambda m: type(m).__name__)
def test_psi_identity(m):
    rng = np.random.default_rng(7)
    z = rng.uniform(-2, 2, 40) + 1j * rng.uniform(0.05, 1.5, 40)
    lhs = np.asarray(ms.psi_transform(m, z))
    rhs = np.asarray(m.cauchy(1.0 / z)) / z - 1.0
    assert np.max(np.abs(lhs - rhs)) < 1e-10


def test_psi_at_zero_and_delta0():
    assert ms.psi_transform(ms.Semicircle(1.0), 0.0) == 0.0
    z = np.array([0.3 + 0.2j, -1 + 1j])
    assert np.max(np.abs(np.asarray(ms.psi_transform(ms.DiracMass(0.0), z)))) < 1e-14


@pytest.mark.skipif(not HAVE_SCIPY, reason="oracle needs scipy")
def test_psi_semicircle_real_point_quadrature():
    # psi(-1/3) by direct quadrature of zt/(1-zt); the point -1 itself sits
    # inside the support of the reciprocal and is excluded by the contract
    sc = ms.Semicircle(1.0)
    z = -1.0 / 3.0
    ref, _ = integrate.quad(
        lambda t: sc.density(t) * z * t / (1.0 - z * t), -2, 2, limit=400)
    assert complex(ms.psi_transform(sc, z)).real == pytest.approx(ref, abs=1e-9)
    assert abs(complex(ms.psi_transform(sc, z)).imag) < 1e-12


# ---------------------------------------------------------------------------
# push-forward and symmetric square root
# ---------------------------------------------------------------------------

def test_push_forward_square_atomic():
    assert ms.push_forward_square(ms.SymmetricBernoulli(1.0)).atoms() == [(1.0, 1.0)]
    assert ms.push_forward_square(ms.DiracMass(0.0)).atoms() == [(0.0, 1.0)]


def test_push_forward_square_semicircle_closed_form():
    pf = ms.push_forward_square(ms.Semicircle(1.0))
    u = np.linspace(0.05, 3.95, 41)
    ref = np.sqrt(4.0 - u) / (2.0 * np.pi * np.sqrt(u))
    assert np.max(np.abs(pf.density(u) - ref)) < 1e-12


def test_push_forward_requires_symmetry():
    with pytest.raises(DomainError):
        ms.push_forward_square(ms.DiracMass(1.0))


def test_symmetric_sqrt_atomic():
    out = ms.symmetric_sqrt(ms.DiracMass(1.0))
    assert out.atoms() == [(-1.0, 0.5), (1.0, 0.5)]
    assert ms.symmetric_sqrt(ms.DiracMass(0.0)).atoms() == [(0.0, 1.0)]


def test_symmetric_sqrt_mp_is_rect_gaussian():
    out = ms.symmetric_sqrt(ms.MarchenkoPastur(0.5, 1.0))
    assert isinstance(out, ms.RectStable) and out.alpha == 2.0
    back = ms.push_forward_square(out)
    assert isinstance(back, ms.MarchenkoPastur)
    assert back.ratio == 0.5


def test_sqrt_roundtrip_on_grid():
    fp = ms.FreePoisson(2.0)
    sym = ms.symmetric_sqrt(fp)
    back = ms.push_forward_square(sym)
    xs = np.linspace(fp.edge_lo + 0.1, fp.edge_hi - 0.1, 21)
    assert np.max(np.abs(back.density(xs) - fp.density(xs))) < 2e-3


def test_negative_support_rejected_for_sqrt():
    with pytest.raises(DomainError):
        ms.symmetric_sqrt(ms.Semicircle(1.0))


# ---------------------------------------------------------------------------
# ID law representations
# ---------------------------------------------------------------------------

def test_semicircle_phi():
    law = ms.as_square_id(ms.Semicircle(0.8))
    z = np.array([2j, 1 + 1j, -0.5 + 0.25j])
    assert np.max(np.abs(np.asarray(law.phi(z)) - 0.8 / z)) < 1e-14


def test_cauchy_phi_constant():
    law = ms.as_square_id(ms.CauchyLaw(0.5))
    z = np.array([2j, 1 + 1j])
    assert np.max(np.abs(np.asarray(law.phi(z)) + 0.5j)) == 0.0
    assert law.sigma_mass() == np.inf


def test_free_poisson_phi():
    law = ms.as_square_id(ms.FreePoisson(1.0))
    for z in (2j, 3.0 + 1.0j):
        assert law.phi(z) == pytest.approx(1.0 + 1.0 / (z - 1.0))


def test_id_law_distribution_interface():
    # F of the law itself comes from the internal fixed point
    sc = ms.Semicircle(1.0)
    law = ms.as_square_id(sc)
    z = np.array([2j, 0.5 + 0.8j, -1.4 + 0.3j])
    assert np.max(np.abs(np.asarray(law.cauchy(z)) - np.asarray(sc.cauchy(z)))) < 1e-11


def test_semigroup_power_scales_phi():
    law = ms.as_square_id(ms.Semicircle(1.0))
    law2 = law.semigroup_power(2.0)
    assert law2.phi(2j) == pytest.approx(2.0 * law.phi(2j))
    z0 = law.semigroup_power(0.0)
    assert z0.phi(1j) == pytest.approx(0.0)
    with pytest.raises(DomainError):
        law.semigroup_power(-1.0)


def test_rect_id_c_transform_and_atoms():
    levy = ms.AtomicMeasure([(-1.0, 0.1), (1.0, 0.1)], require_probability=False)
    law = ms.RectIDLaw(levy, 0.5)
    w = -3.0 + 0j
    assert law.c_transform(w) == pytest.approx(w * 0.2 * 2.0 / (1.0 - w))
    assert law.mass_at_zero() == pytest.approx(0.6, abs=1e-6)
    # semigroup scaling of C
    law2 = law.semigroup_power(2.0)
    assert law2.c_transform(w) == pytest.approx(2.0 * law.c_transform(w))


def test_rect_id_requires_symmetric_levy():
    with pytest.raises(DomainError):
        ms.RectIDLaw(ms.DiracMass(1.0), 0.5)


def test_rect_stable_c_closed_form():
    st = ms.RectStable(1.0, 1.0, 0.5)
    law = ms.RectIDLaw.from_measure(st, 0.5)
    z = np.array([-4.0 + 0j, -0.25 + 0j, 1 + 2j])
    ref = -np.sqrt(-z + 0j)
    assert np.max(np.abs(np.asarray(law.c_transform(z)) - ref)) < 1e-14


def test_rect_stable_c_vs_levy_grid_quadrature():
    # the Levy-measure integral form of C checked against the closed form:
    # density (t/pi) |x|^(1-alpha) / (1+x^2) discretized on a graded grid
    t = 1.0
    xs = np.tan(np.linspace(1e-4, np.pi / 2 - 1e-4, 30001))
    dens = (t / np.pi) / (1.0 + xs**2)
    grid = np.concatenate([-xs[::-1], xs])
    vals = np.concatenate([dens[::-1], dens])
    glev = ms.GridDensityMeasure(grid, vals, expected_total=None)
    law_grid = ms.RectIDLaw(glev, 0.5)
    law_cf = ms.RectIDLaw.from_measure(ms.RectStable(1.0, t, 0.5), 0.5)
    for w in (-0.5 + 0j, -4.0 + 0j, 1 + 2j):
        # limited by the grid truncation of the heavy Levy tails
        assert law_grid.c_transform(w) == pytest.approx(
            law_cf.c_transform(w), abs=1e-3)


def test_rect_stable_density_formula_values():
    st = ms.RectStable(1.0, 1.0, 0.5)
    assert st.density(0.25) == 0.0                       # support edge
    assert st.density(0.5) == pytest.approx((1.0 / (0.75 * np.pi)) * np.sqrt(0.75))
    assert st.hole_radius() == pytest.approx(0.25)


def test_c_properties_on_probes():
    law = ms.RectIDLaw.from_measure(ms.RectStable(1.0, 0.7, 0.5), 0.5)
    rng = np.random.default_rng(3)
    z = rng.uniform(-3, 3, 30) + 1j * rng.uniform(0.05, 2, 30)
    C = np.asarray(law.c_transform(z))
    assert np.all(C.imag > 0)                            # C(C+) in C+
    xs = np.linspace(-5.0, -0.01, 40).astype(complex)
    Cx = np.asarray(law.c_transform(xs)).real
    assert np.all(Cx <= 1e-12)
    assert np.all(np.diff(Cx) > 0)                       # increasing to 0
    assert law.c_transform(-1e-9 + 0j) == pytest.approx(0.0, abs=1e-4)


# ---------------------------------------------------------------------------
# transform-defined measures
# ---------------------------------------------------------------------------

def _counterexample():
    from freeconv.specparse import parse_measure_spec
    return parse_measure_spec('transform{which:"F", expr:"z + i - 1 + (z-i)/(z+i) - 1/z"}')


def test_counterexample_imag_G_formula():
    nu = _counterexample()
    rng = np.random.default_rng(11)
    rs = rng.uniform(-4, 4, 100)
    rs = rs[np.abs(rs) > 1e-3]
    G = np.asarray(nu.cauchy(rs.astype(complex)))
    ref = -rs**2 * (rs - 1) ** 2 / (rs**2 * (rs**2 - 2) ** 2 + (2 * rs**2 - 2 * rs - 1) ** 2)
    assert np.max(np.abs(G.imag - ref)) < 1e-12


def test_transform_defined_slope_validation():
    from freeconv.specparse import parse_measure_spec
    from freeconv.errors import SpecSemanticError
    with pytest.raises(SpecSemanticError):
        parse_measure_spec('transform{which:"F", expr:"2*z + i"}')


def test_transform_defined_positivity_warns_not_raises():
    # slope 1 but Im F < 0 on the probe grid: flagged as a warning only
    from freeconv.specparse import parse_measure_spec
    with pytest.warns(UserWarning, match="Im F"):
        parse_measure_spec('transform{which:"F", expr:"z - 3*i"}')


# ---------------------------------------------------------------------------
# distances and sampling
# ---------------------------------------------------------------------------

def test_wasserstein_equality():
    sc = ms.Semicircle(1.0)
    x = np.linspace(-2, 2, 30001)
    g = ms.GridDensityMeasure(x, sc.density(x), normalize=True)
    assert ms.wasserstein1(sc, g) < 1e-6
    assert ms.measures_close(sc, g)
    assert not ms.measures_close(sc, ms.Semicircle(1.5))


@pytest.mark.parametrize("m", [m for m in MEASURES
                               if not isinstance(m, ms.AtomicMeasure)],
                         ids=lambda m: type(m).__name__)
def test_sampling_matches_cdf(m):
    rng = np.random.default_rng(13)
    s = m.sample(rng, 40_000)
    qs = np.quantile(s, [0.2, 0.5, 0.8])
    for q, p in zip(qs, [0.2, 0.5, 0.8]):
        assert m.cdf(q) == pytest.approx(p, abs=0.02)


def test_sampling_atomic_frequencies():
    m = ms.AtomicMeasure([(-1.0, 0.25), (0.3, 0.5), (2.0, 0.25)])
    rng = np.random.default_rng(14)
    s = m.sample(rng, 40_000)
    for pos, mass in m.atoms():
        assert np.mean(s == pos) == pytest.approx(mass, abs=0.01)
