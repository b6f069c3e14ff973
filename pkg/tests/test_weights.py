from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hypermoments import ParameterError, WeightMomentSeq
from hypermoments.weights import Constant, Gaussian, Sign, TwoPoint, parse_distribution

LAWS = [Constant(Fraction(3, 2)), TwoPoint(2, -1, Fraction(1, 3)), Sign(), Gaussian(Fraction(1, 2)), Gaussian(2)]


def test_exact_moment_formulas():
    assert [Sign().exact_moment(k) for k in range(1, 7)] == [0, 1, 0, 1, 0, 1]
    assert [Gaussian(2).exact_moment(k) for k in range(1, 7)] == [0, 4, 0, 48, 0, 960]
    assert Constant(-2).exact_moment(3) == -8
    assert TwoPoint(2, -1, Fraction(1, 3)).exact_moment(2) == Fraction(4, 3) + Fraction(2, 3)


@pytest.mark.parametrize("law", LAWS, ids=lambda d: d.spec)
def test_spec_round_trip(law):
    assert parse_distribution(law.spec) == law


@pytest.mark.parametrize("law", LAWS, ids=lambda d: d.spec)
def test_growth_bound(law):
    # X_{2m} <= (C m)^{2m}: bounded laws with C = max |value|, gaussians with C = 2 max(sigma, 1)
    if isinstance(law, Gaussian):
        C = 2 * max(law.sigma, 1)
    elif isinstance(law, TwoPoint):
        C = max(abs(law.a), abs(law.b), 1)
    elif isinstance(law, Constant):
        C = max(abs(law.c), 1)
    else:
        C = 1
    WeightMomentSeq(law.moments(16).moments, carleman_constant=C)


@pytest.mark.parametrize("law", LAWS, ids=lambda d: d.spec)
def test_sample_moments(law):
    x = law.sample(np.random.default_rng(3), 200_000)
    for k in (1, 2, 3, 4):
        target = float(law.exact_moment(k))
        se = np.std(x**k) / np.sqrt(x.size)
        assert abs(np.mean(x**k) - target) <= 5 * se + 1e-12


@given(
    a=st.fractions(-5, 5, max_denominator=4),
    b=st.fractions(-5, 5, max_denominator=4),
    pi=st.fractions(0, 1, max_denominator=9),
)
def test_two_point_moment_sequence_is_valid(a, b, pi):
    X = TwoPoint(a, b, pi).moments(8)
    assert X[2] >= X[1] ** 2
    assert all(X[k] >= 0 for k in range(2, 9, 2))


@pytest.mark.parametrize(
    "text, expected",
    [
        ("sign", Sign()),
        ("const:1", Constant(1)),
        ("const:-0.5", Constant(Fraction(-1, 2))),
        ("twopoint:2,-1,0.5", TwoPoint(2, -1, Fraction(1, 2))),
        ("gauss:1/3", Gaussian(Fraction(1, 3))),
    ],
)
def test_parse_distribution(text, expected):
    assert parse_distribution(text) == expected


@pytest.mark.parametrize("text", ["", "sign:1", "const", "const:x", "twopoint:1,2", "twopoint:1,2,3/2", "gauss:-1", "cauchy:1"])
def test_parse_distribution_rejects(text):
    with pytest.raises(ParameterError):
        parse_distribution(text)
