import numpy as np
import pytest

from freeconv import measures as ms
from freeconv.errors import SpecSemanticError, SpecSyntaxError
from freeconv.specparse import parse_expression, parse_measure_spec


def test_parse_atomic():
    m = parse_measure_spec("atomic{ -1:0.5, 1:0.5 }")
    assert isinstance(m, ms.AtomicMeasure)
    assert m.atoms() == [(-1.0, 0.5), (1.0, 0.5)]


def test_parse_families():
    assert isinstance(parse_measure_spec("semicircle{variance:1}"), ms.Semicircle)
    assert isinstance(parse_measure_spec("cauchy{t:0.5}"), ms.CauchyLaw)
    assert isinstance(parse_measure_spec("bernoulli{a:2}"), ms.SymmetricBernoulli)
    assert isinstance(parse_measure_spec("free_poisson{rate:1}"), ms.FreePoisson)
    assert isinstance(parse_measure_spec("arcsine{radius:2}"), ms.Arcsine)
    assert isinstance(parse_measure_spec("marchenko_pastur{ratio:0.5}"),
                      ms.MarchenkoPastur)
    st = parse_measure_spec("rect_stable{alpha:1, t:1, lambda:0.5}")
    assert isinstance(st, ms.RectStable) and st.ratio == 0.5


def test_parse_nested_rect_id():
    m = parse_measure_spec("rect_id{lambda:0.5, levy: atomic{-1:0.5,1:0.5}}")
    assert isinstance(m, ms.RectIDLaw)
    assert m.ratio == 0.5
    assert m.levy.atoms() == [(-1.0, 0.5), (1.0, 0.5)]


def test_parse_square_id_with_free_levy_mass():
    m = parse_measure_spec("square_id{gamma:0.25, levy: atomic{1:0.5}}")
    assert isinstance(m, ms.SquareIDLaw)
    assert m.levy.total_mass == 0.5     # Levy measures need not be probabilities
    assert m.gamma == 0.25


def test_parse_grid_csv_arrays():
    m = parse_measure_spec('grid{x:"-1,0,1", density:"0.5,0.5,0.5", atom_at_zero:0}')
    assert isinstance(m, ms.GridDensityMeasure)
    assert m.total_mass == pytest.approx(1.0)


def test_round_trip_equivalence():
    specs = [
        "atomic{-1:0.5, 1:0.5}",
        "semicircle{variance:1.5}",
        "cauchy{t:0.25}",
        "rect_stable{alpha:1, t:2, lambda:0.25}",
        "rect_id{lambda:0.5, levy: atomic{-2:0.1,2:0.1}}",
        'transform{which:"F", expr:"z + i - 1 + (z-i)/(z+i) - 1/z"}',
    ]
    for spec in specs:
        m1 = parse_measure_spec(spec)
        m2 = parse_measure_spec(m1.to_spec())
        assert type(m1) is type(m2)
        if isinstance(m1, ms.RectIDLaw):
            z = -1.3 + 0.4j
            assert m1.c_transform(z) == pytest.approx(m2.c_transform(z))
        elif isinstance(m1, (ms.TransformDefinedMeasure, ms.RectStable)):
            pass
        else:
            z = 0.4 + 0.9j
            assert m1.cauchy(z) == pytest.approx(m2.cauchy(z))


def test_syntax_error_location():
    with pytest.raises(SpecSyntaxError) as e:
        parse_measure_spec("semicircle{variance:}")
    assert e.value.line == 1
    assert e.value.col is not None
    with pytest.raises(SpecSyntaxError):
        parse_measure_spec("semicircle{variance:1")
    with pytest.raises(SpecSyntaxError):
        parse_measure_spec("blah{x:1}")


def test_semantic_errors():
    with pytest.raises(SpecSemanticError):
        parse_measure_spec("atomic{0:0.5, 1:0.6}")     # mass != 1
    with pytest.raises(SpecSemanticError):
        parse_measure_spec("semicircle{variance:-1}")  # bad parameter domain
    with pytest.raises(SpecSemanticError):
        parse_measure_spec("semicircle{}")             # missing key
    with pytest.raises(SpecSemanticError):
        parse_measure_spec("rect_id{lambda:2, levy: atomic{-1:0.5,1:0.5}}")


# ---------------------------------------------------------------------------
# expression DSL
# ---------------------------------------------------------------------------

def test_expression_literals_and_ops():
    e = parse_expression("2+3i")
    assert e.eval(np.array([0j]))[0] == pytest.approx(2 + 3j)
    e = parse_expression("1/(z+i) - z^2")
    z = np.array([0.3 + 0.4j])
    assert e.eval(z)[0] == pytest.approx(1 / (z[0] + 1j) - z[0] ** 2)
    e = parse_expression("-z * (z - 0.5)")
    assert e.eval(np.array([2.0 + 0j]))[0] == pytest.approx(-3.0)


def test_expression_sqrt_branches():
    up = parse_expression("sqrt_upper(z)")
    pr = parse_expression("sqrt_principal(z)")
    assert up.eval(np.array([-1.0 + 0j]))[0] == pytest.approx(1j)
    assert pr.eval(np.array([4.0 + 0j]))[0] == pytest.approx(2.0)
    # they disagree in the lower half-plane
    z = np.array([0.5 - 0.5j])
    assert abs(up.eval(z)[0] - pr.eval(z)[0]) > 0.1


def test_expression_integer_power_enforced():
    with pytest.raises(SpecSyntaxError):
        parse_expression("z^0.5")
    with pytest.raises(SpecSyntaxError):
        parse_expression("z^z")


def test_expression_errors():
    with pytest.raises(SpecSyntaxError):
        parse_expression("z +")
    with pytest.raises(SpecSyntaxError):
        parse_expression("foo(z)")
    with pytest.raises(SpecSyntaxError):
        parse_expression("(z")
