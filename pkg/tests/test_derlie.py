import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ncdisk.autgrp import NCAutomorphism, aut_compose
from ncdisk.derlie import NCDerivation, check_exponentiable, der_apply, der_bracket, der_exp, der_graded_dim
from ncdisk.errors import DimensionMismatch, NonNilpotentAtTruncation
from ncdisk.ncseries import NCSeries, random_series, series_parse

from strategies import series


def der(texts, n, N):
    return NCDerivation.from_strings(texts, n, N)


def random_derivation(rng, n, N, augmented=True):
    return NCDerivation([
        random_series(rng, n, N, min_degree=1 if augmented else 0, density=0.4) for _ in range(n)
    ])


class TestApply:
    def test_left_letter(self):
        assert der_apply(der(["1", "0"], 2, 3), series_parse("x1*x2", 2, 3)) == series_parse("x2", 2, 3)

    def test_square(self):
        assert der_apply(der(["x1^2"], 1, 4), series_parse("x1^2", 1, 4)) == series_parse("2*x1^3", 1, 4)

    def test_middle_letter_untouched(self):
        result = der_apply(der(["x2", "0"], 2, 3), series_parse("x1*x2*x1", 2, 3))
        assert result == series_parse("x2*x2*x1 + x1*x2*x2", 2, 3)

    def test_mismatch(self):
        with pytest.raises(DimensionMismatch):
            der_apply(der(["x1"], 1, 3), series_parse("x1", 1, 4))


class TestBracket:
    def test_self(self):
        d = der(["x1*x2", "1 + x1"], 2, 3)
        assert der_bracket(d, d) == NCDerivation.zero(2, 3)

    def test_weyl(self):
        assert der_bracket(der(["1"], 1, 3), der(["x1"], 1, 3)) == der(["1"], 1, 3)


class TestExp:
    def test_zero(self):
        assert der_exp(NCDerivation.zero(2, 3)) == NCAutomorphism.identity(2, 3)

    def test_square(self):
        assert der_exp(der(["x1^2"], 1, 4)).to_strings() == ["x1 + x1^2 + x1^3 + x1^4"]

    def test_nilpotent_linear_part(self):
        g = der_exp(der(["x2", "0"], 2, 3))
        assert g.to_strings() == ["x1 + x2", "x2"]

    def test_constant_rejected(self):
        with pytest.raises(NonNilpotentAtTruncation):
            der_exp(der(["1"], 1, 3))

    def test_semisimple_linear_rejected(self):
        with pytest.raises(NonNilpotentAtTruncation):
            check_exponentiable(der(["x1"], 1, 3))

    def test_inverse_pair(self):
        rng = random.Random(11)
        for _ in range(10):
            d = NCDerivation([random_series(rng, 2, 4, min_degree=2) for _ in range(2)])
            assert aut_compose(der_exp(d), der_exp(-d)) == NCAutomorphism.identity(2, 4)


class TestGradedDim:
    @pytest.mark.parametrize("n,m,expected", [(1, 0, 1), (2, 0, 4), (2, 1, 8), (3, 1, 27)])
    def test_values(self, n, m, expected):
        assert der_graded_dim(n, m) == expected

    def test_negative(self):
        with pytest.raises(ValueError):
            der_graded_dim(2, -1)


class TestWeights:
    def test_split(self):
        d = der(["1 + x1 + x1*x2", "x2^2"], 2, 3)
        assert d.weights() == [-1, 0, 1]
        assert d.weight_component(1) == der(["x1*x2", "x2^2"], 2, 3)
        assert not d.is_augmented()


@given(st.data())
def test_leibniz_rule(data):
    n, N = 2, 4
    d = NCDerivation([data.draw(series(n, N, min_degree=1)) for _ in range(n)])
    a, b = data.draw(series(n, N)), data.draw(series(n, N))
    assert der_apply(d, a * b) == der_apply(d, a) * b + a * der_apply(d, b)


@given(st.data())
def test_leibniz_rule_with_constants(data):
    # a constant image lowers degree by one, so only degrees below N are exact
    n, N = 2, 4
    d = NCDerivation([data.draw(series(n, N)) for _ in range(n)])
    a, b = data.draw(series(n, N)), data.draw(series(n, N))
    diff = der_apply(d, a * b) - (der_apply(d, a) * b + a * der_apply(d, b))
    assert all(len(w) == N for w, _ in diff.items())


@given(st.integers(0, 10**6))
def test_jacobi_augmented(seed):
    rng = random.Random(seed)
    d, e, f = (random_derivation(rng, 2, 4) for _ in range(3))
    total = der_bracket(der_bracket(d, e), f) + der_bracket(der_bracket(e, f), d) + der_bracket(der_bracket(f, d), e)
    assert total == NCDerivation.zero(2, 4)


@given(st.integers(0, 10**6))
def test_jacobi_with_constants_below_top_degree(seed):
    # constant terms lower degree, so the top retained degree sees truncation error
    rng = random.Random(seed)
    N = 4
    d, e, f = (random_derivation(rng, 2, N, augmented=False) for _ in range(3))
    total = der_bracket(der_bracket(d, e), f) + der_bracket(der_bracket(e, f), d) + der_bracket(der_bracket(f, d), e)
    for img in total.images:
        assert all(len(w) > N - 3 for w, _ in img.items())


@given(st.integers(0, 10**6))
def test_bracket_bilinear_antisymmetric(seed):
    rng = random.Random(seed)
    d, e, f = (random_derivation(rng, 2, 3, augmented=False) for _ in range(3))
    c = Fraction(rng.randint(-3, 3), rng.randint(1, 3))
    assert der_bracket(d, e) == -der_bracket(e, d)
    assert der_bracket(d.scale(c) + f, e) == der_bracket(d, e).scale(c) + der_bracket(f, e)


@given(st.integers(0, 10**6))
def test_augmented_subalgebra(seed):
    rng = random.Random(seed)
    d, e = random_derivation(rng, 2, 4), random_derivation(rng, 2, 4)
    assert der_bracket(d, e).is_augmented()


def test_graded_dim_formula():
    for n in range(1, 4):
        for m in range(0, 3):
            assert der_graded_dim(n, m) == n ** (m + 2)
