import pytest
from hypothesis import given
from hypothesis import strategies as st

from cbasim.distributions import Gamma, Normal, Point, Triangular, Uniform, fit_from_range
from cbasim.expr import ExpressionError, format_number, format_value_expr, parse_value_expr


def test_point():
    assert parse_value_expr("point(2244)") == Point(2244)


def test_gamma_range():
    g = parse_value_expr("gamma(min=10000, max=100000)")
    assert g == fit_from_range("gamma", 10_000, 100_000)
    assert (round(g.shape, 3), round(g.scale, 3)) == (13.444, 4090.909)


@pytest.mark.parametrize(
    "text, expected",
    [
        ("normal(min=10000,max=100000)", Normal(55_000, 15_000, bounds=(10_000, 100_000))),
        ("normal(mean=5, sd=2)", Normal(5, 2)),
        ("uniform(min=1, max=2)", Uniform(1, 2)),
        ("triangular(min=1, mode=2, max=4)", Triangular(1, 2, 4)),
        ("gamma(shape=2.5, scale=10)", Gamma(2.5, 10)),
        ("  Gamma ( max = 9 , min = 3 )  ", fit_from_range("gamma", 3, 9)),
        ("point(-0.5e3)", Point(-500)),
        ("point(.25)", Point(0.25)),
    ],
)
def test_forms(text, expected):
    assert parse_value_expr(text) == expected


def test_trailing_comma_position():
    with pytest.raises(ExpressionError) as err:
        parse_value_expr("gamma(min=5,)")
    assert err.value.column == 13
    assert err.value.offset == 12
    assert "column 13" in str(err.value)


def test_positional_gamma_rejected_with_explanation():
    with pytest.raises(ExpressionError) as err:
        parse_value_expr("gamma(10000,100000)")
    msg = str(err.value)
    assert "named arguments" in msg and "min=" in msg and "ambiguous" in msg


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("beta(min=1, max=2)", "unknown distribution"),
        ("gamma(min=1, max=2", "')'"),
        ("gamma(min=1, min=2)", "duplicate"),
        ("gamma(min=1)", "expected gamma(min"),
        ("normal(min=1, sd=2)", "expected normal"),
        ("point(10,000)", "')'"),
        ("point(1) extra", "end of input"),
        ("point(#)", "unexpected character"),
        ("gamma(min=100000, max=10000)", "min < max"),
        ("gamma(min=-1, max=10)", "min >= 0"),
        ("", "distribution name"),
    ],
)
def test_errors(text, fragment):
    with pytest.raises(ExpressionError) as err:
        parse_value_expr(text)
    assert fragment in str(err.value)


def test_format_number():
    assert format_number(2244.0) == "2244"
    assert format_number(0.1) == "0.1"
    assert float(format_number(1e20)) == 1e20


finite = st.floats(-1e12, 1e12, allow_nan=False, allow_infinity=False)
positive = st.floats(1e-6, 1e12, allow_nan=False, allow_infinity=False)


@st.composite
def specs(draw):
    form = draw(st.sampled_from(["point", "gamma-range", "gamma", "normal-range", "normal", "uniform", "triangular"]))
    a = draw(st.floats(0, 1e9))
    w = draw(positive)
    if a + w <= a:
        w = max(1.0, a)
    if form == "point":
        return Point(draw(finite))
    if form == "gamma-range":
        return fit_from_range("gamma", a, a + w)
    if form == "gamma":
        return Gamma(draw(positive), draw(positive))
    if form == "normal-range":
        return fit_from_range("normal", a - w, a + w)
    if form == "normal":
        return Normal(draw(finite), draw(positive))
    if form == "uniform":
        return Uniform(a, a + w)
    return Triangular(a, a + w * draw(st.floats(0, 1)), a + w)


@given(specs())
def test_round_trip(spec):
    text = format_value_expr(spec)
    assert parse_value_expr(text) == spec
    assert format_value_expr(parse_value_expr(text)) == text
