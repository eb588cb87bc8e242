import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gssym.errors import ConstraintError, ParameterError, ParseError
from gssym.profiles import (
    ProfileSpec,
    classify,
    dshape_params_from,
    parse_profile,
    weak_family,
)


def tags(F, G):
    return [c.tag for c in classify(parse_profile(F, "F"), parse_profile(G, "G"))]


def first(F, G, tag):
    return next(c for c in classify(parse_profile(F, "F"), parse_profile(G, "G")) if c.tag == tag)


def test_parse_power():
    s = parse_profile("psi^3")
    assert s.form == "power_shifted" and (s.a, s.c, s.p) == (1, 0, 3)


def test_parse_shifted_power():
    s = parse_profile("2*(psi+1)^-7")
    assert s.form == "power_shifted" and (s.a, s.c, s.p) == (2, 1, -7)


def test_parse_affine():
    s = parse_profile("3 + 0.5*psi")
    assert s.form == "affine" and (s.k0, s.k1) == (3, Fraction(1, 2))


def test_power_zero_exponent_degrades_to_affine():
    s = ProfileSpec.power(4, 0)
    assert s.form == "affine" and s.k1 == 0 and s.k0 == 4


def test_other_forms():
    assert parse_profile("0").form == "zero"
    assert parse_profile("exp(2*psi)").form == "exponential"
    assert parse_profile("sin(psi)").form == "opaque"


def test_malformed_profile():
    with pytest.raises(ParseError) as info:
        parse_profile("psi^(")
    assert info.value.position == 5


coef = st.fractions(min_value=-20, max_value=20, max_denominator=8).filter(lambda x: x != 0)
expo = st.fractions(min_value=-9, max_value=9, max_denominator=4)


@given(coef, expo, st.fractions(min_value=0, max_value=5, max_denominator=4))
def test_round_trip_power(a, p, c):
    s = ProfileSpec.power(a, p, c)
    assert parse_profile(s.text()) == s


@given(st.sampled_from(["psi^3", "2*(psi+1)^-7", "3 + 0.5*psi", "-exp(psi/2)", "4*(psi - 0.25)^(1/3)",
                        "psi^2*psi", "(2*psi)^2", "psi*(psi+1)", "sin(psi)"]),
       st.lists(st.floats(1.0, 3.0), min_size=5, max_size=5))
def test_canonical_and_raw_agree(text, xs):
    s = parse_profile(text)
    for x in xs:
        raw, canon = s(x), s.canonical_value(x)
        assert abs(raw - canon) <= 4 * np.spacing(max(abs(raw), abs(canon), 1e-300)) * 4


def test_classify_case_a():
    c = first("psi^3", "psi^2", "a")
    assert tags("psi^3", "psi^2")[0] == "a" and c["q"] == 1


def test_classify_exceptional():
    c = first("2*(psi+1)^-7", "3*(psi+1)^-3", "a''")
    assert c["q"] == Fraction(-1, 4) and c["c"] == 1


def test_classify_conditional_kappa():
    c = first("-psi^-3", "-psi^-3", "conditional-kappa")
    assert c["kappa"] == pytest.approx(1.0, rel=1e-15)


def test_classify_rotation():
    c = first("0", "8*psi^3", "conditional-rotation")
    assert tags("0", "8*psi^3")[0] == "conditional-rotation" and c["beta"] == 3


def test_classify_exponential_and_linear():
    assert "b" in tags("exp(2*psi)", "3*exp(psi)")
    assert "d" in tags("1", "2")
    assert tags("psi^2", "psi^5") == ["none"]


@given(st.floats(0.1, 5.0), st.floats(-5, 5).filter(lambda x: abs(x) > 0.05))
def test_conditional_kappa_means_proportional(kappa, a):
    F = ProfileSpec.power(a, -3)
    G = ProfileSpec.power(a * kappa**2, -3)
    c = next(c for c in classify(F, G) if c.tag == "conditional-kappa")
    rng = np.random.default_rng(0)
    psi = rng.uniform(0.2, 4.0, 20)
    np.testing.assert_allclose(G(psi), c["kappa"] ** 2 * F(psi), rtol=1e-12)


def test_exceptional_tag_implies_quarter():
    for text in ["(psi+2)^-7", "-(psi)^-7"]:
        for c in classify(parse_profile(text, "F"), parse_profile("(psi+2)^-3" if "2" in text else "psi^-3", "G")):
            if c.tag == "a''":
                assert c["q"] == Fraction(-1, 4)


@pytest.mark.parametrize("q, A, sigma, a, b", [
    (Fraction(-1, 4), -1, -1, Fraction(-3, 2), Fraction(1, 4)),
    (Fraction(-1, 2), 1 / math.sqrt(2), 2, -1, 0),
    (Fraction(-1, 4), -1, -5, -22.5, Fraction(1, 4)),
])
def test_weak_family(q, A, sigma, a, b):
    _, _, ga, gb = weak_family(q, A, sigma)
    assert float(ga) == pytest.approx(float(a), rel=1e-15, abs=1e-15)
    assert float(gb) == pytest.approx(float(b), rel=1e-15, abs=1e-15)


def test_weak_family_rejects_degenerate():
    for args in [(0, 1, 2), (1, 0, 2), (1, 1, 0), (1, 1, 1)]:
        with pytest.raises(ParameterError):
            weak_family(*args)


@pytest.mark.parametrize("a, b, A, sigma", [(-1.5, 0.25, -1.0, -1.0), (-9 / 16, 0.25, -1.0, -0.5),
                                            (3 * 0.25**2, 0.25, -1.0, 0.5)])
def test_dshape_params_from(a, b, A, sigma):
    got = dshape_params_from(a, b)
    assert got[0] == pytest.approx(A, abs=1e-15) and got[1] == pytest.approx(sigma, abs=1e-15)


def test_dshape_params_from_rejects():
    with pytest.raises(ParameterError):
        dshape_params_from(1.0, 0.0)
    with pytest.raises(ConstraintError):
        dshape_params_from(1.0, 0.25)


@given(st.floats(-10, -0.01), st.floats(-10, -0.01))
def test_weak_dshape_round_trip(A, sigma):
    _, _, a, b = weak_family(Fraction(-1, 4), A, sigma)
    A2, s2 = dshape_params_from(a, b)
    assert A2 == pytest.approx(A, rel=1e-12) and s2 == pytest.approx(sigma, rel=1e-12, abs=1e-12)


@given(st.sampled_from([Fraction(-1, 4), Fraction(-1, 2), Fraction(1), Fraction(2), Fraction(-2, 3)]),
       st.floats(-4, 4).filter(lambda x: abs(x) > 0.1), st.floats(-4, 4).filter(lambda s: abs(s) > 0.1 and abs(s - 1) > 0.1))
def test_weak_family_classifies_as_power_case(q, A, sigma):
    F, G, a, b = weak_family(q, A, sigma)
    got = [c.tag for c in classify(F, G)]
    want = "a''" if q == Fraction(-1, 4) else "a"
    assert want in got
