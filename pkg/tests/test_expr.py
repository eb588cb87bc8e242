from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gssym.errors import DomainError, ParseError
from gssym.expr import as_expr, diff, evaluate, parse, simplify, to_text


@pytest.mark.parametrize("text, value", [
    ("1 + 2*3", 7.0),
    ("2^3^2", 512.0),
    ("-2^2", -4.0),
    ("2**-1", 0.5),
    ("(1 + 2) * 3", 9.0),
    ("pi", np.pi),
    ("sqrt(4) + exp(0) + log(1)", 3.0),
])
def test_arithmetic(text, value):
    assert evaluate(parse(text), {}) == pytest.approx(value, rel=1e-15)


@pytest.mark.parametrize("text, pos", [("psi^(", 5), ("psi + * 2", 6), ("2 $ psi", 2), ("foo(psi)", 0)])
def test_parse_errors_carry_position(text, pos):
    with pytest.raises(ParseError) as info:
        parse(text)
    assert info.value.position == pos
    assert "^" in str(info.value)


def test_unknown_variable_is_a_parse_error():
    with pytest.raises(ParseError):
        parse("psi + r")


def test_exact_literals():
    e = parse("0.5*psi^3")
    assert Fraction(1, 2) in {getattr(n, "value", None) for n in (e.left,)}


def test_domain_error_index_points_at_subexpression():
    with pytest.raises(DomainError) as info:
        evaluate(parse("1 + sqrt(psi - 2)"), {"psi": 1.0})
    assert info.value.subexpr == "sqrt(psi - 2)"
    assert info.value.index == 2


@given(st.floats(0.5, 3.0))
def test_symbolic_derivative_matches_fd(x):
    e = parse("psi^3 * exp(-psi) + log(psi) / (1 + psi^2)")
    d = diff(e, "psi")
    h = 1e-6
    fd = (evaluate(e, {"psi": x + h}) - evaluate(e, {"psi": x - h})) / (2 * h)
    assert evaluate(d, {"psi": x}) == pytest.approx(fd, rel=1e-6, abs=1e-9)


@pytest.mark.parametrize("text", ["psi^3", "2 * (psi + 1)^(-7)", "3 + (1/2) * psi", "exp(2 * psi)", "-psi^(-3)"])
def test_text_round_trip(text):
    e = simplify(parse(text))
    assert to_text(simplify(parse(to_text(e)))) == to_text(e)


def test_as_expr_on_coordinates():
    e = as_expr("r^2 + z")
    assert evaluate(e, {"r": 2.0, "z": 1.0}) == 5.0
