from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dtangent.poly import (
    NotOnLocusError,
    ParseError,
    PointedModel,
    Polynomial,
    evaluate,
    format_rational,
    jacobian_at,
    parse_polynomial,
    parse_rational,
    translate_to_origin,
)

XY = ("x", "y")
XYZ = ("x", "y", "z")


def P(text, variables=XY):
    return parse_polynomial(text, variables)


def test_canonical_printing_is_grevlex_descending():
    assert str(P("y^2 + x^3 + x*y + 1 + x")) == "x^3 + x*y + y^2 + x + 1"
    assert str(P("x*y - y^2*x", XY)) == "-x*y^2 + x*y"
    assert str(P("1/2*x - 3/4")) == "1/2*x - 3/4"
    assert str(P("x - x")) == "0"


def test_grevlex_breaks_ties_on_last_variable():
    # x*z < y^2 in grevlex with x > y > z
    assert str(P("x*z + y^2", XYZ)) == "y^2 + x*z"


def test_parser_accepts_parentheses_powers_and_rationals():
    assert P("(x + y)^2") == P("x^2 + 2*x*y + y^2")
    assert P("y*(x - 1)") == P("x*y - y")
    assert P("-(x)^3") == -P("x^3")
    assert P("2/4*x") == P("1/2*x")


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("x**2", "'^'"),
        ("2x", "juxtaposition"),
        ("x y", "juxtaposition"),
        ("w + 1", "unknown variable"),
        ("x +", "offset"),
        ("(x", "offset"),
        ("x^y", "offset"),
    ],
)
def test_parser_rejects(text, fragment):
    with pytest.raises(ParseError) as err:
        P(text)
    assert fragment in str(err.value)


def test_parse_error_reports_offset():
    with pytest.raises(ParseError) as err:
        P("x + x**2")
    assert err.value.offset == 5


def test_rationals():
    assert parse_rational("3/6") == Fraction(1, 2)
    assert parse_rational("-2") == Fraction(-2)
    with pytest.raises(ValueError):
        parse_rational("0.5")
    assert format_rational(Fraction(-3, 4)) == "-3/4"


def test_floats_are_refused_as_coefficients():
    with pytest.raises(TypeError):
        Polynomial.constant(XY, 0.5)


def test_derivative_and_evaluation():
    f = P("x^3*y - 2*y")
    assert f.diff("x") == P("3*x^2*y")
    assert f.diff(1) == P("x^3 - 2")
    assert evaluate(f, (2, 1)) == 6


def test_point_off_locus_is_rejected():
    m = PointedModel.from_strings(XY, ["x*y"], ["1", "1"])
    with pytest.raises(NotOnLocusError, match="point not on zero locus"):
        m.check_on_locus()


def test_translation_moves_point_to_origin():
    m = PointedModel.from_strings(XY, ["y - x^2"], ["1", "1"])
    t = translate_to_origin(m)
    assert t.at_origin()
    assert t.generators[0] == P("y - x^2 - 2*x")
    assert jacobian_at(m) == jacobian_at(t) == [[-2, 1]]


coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=4)
monos = st.tuples(st.integers(0, 3), st.integers(0, 3))
polys = st.dictionaries(monos, coeffs, max_size=5).map(lambda t: Polynomial(XY, t))


@settings(max_examples=60, deadline=None)
@given(polys, polys, polys)
def test_ring_axioms(a, b, c):
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert a - a == Polynomial.zero(XY)


@settings(max_examples=60, deadline=None)
@given(polys)
def test_print_parse_round_trip(p):
    assert P(str(p)) == p


@settings(max_examples=40, deadline=None)
@given(polys, polys)
def test_leibniz_rule(a, b):
    assert (a * b).diff(0) == a.diff(0) * b + a * b.diff(0)


@settings(max_examples=40, deadline=None)
@given(polys, st.tuples(coeffs, coeffs))
def test_substitution_agrees_with_evaluation(p, pt):
    images = [Polynomial.constant(XY, c) for c in pt]
    assert p.substitute(images).constant_term() == evaluate(p, pt)
