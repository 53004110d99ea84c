import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ncdisk.atiyah import BilinearMap, BilinearMapForm, cech_difference, coboundary_solve, omega2_extract
from ncdisk.chart import Gauge, gauge_gk, random_gauge, tautological_gk
from ncdisk.dga import BasePoly, dga_parse
from ncdisk.errors import CapExceeded, DimensionMismatch
from ncdisk.ncconn import connection_from_gk, perturb


def gauged(phi, tail, N=4, B=3):
    m = len(phi)
    g = Gauge.linear_lift([BasePoly.parse(p, m) for p in phi], [dga_parse(t, m) for t in tail])
    return connection_from_gk(gauge_gk(tautological_gk(m, N, B), g))


def poly(text, m=1):
    return BasePoly.parse(text, m)


class TestExtract:
    def test_tautological(self):
        assert omega2_extract(connection_from_gk(tautological_gk(2, 4, 3))).is_zero()

    def test_fiber_tail(self):
        # xi = xi' + xi'^2 forces D(xi') = db / (1 + 2 xi')
        w = omega2_extract(gauged(["b1"], ["x1^2"]))
        assert w.entries == {(1, (1, 1), 1): poly("4")}

    def test_polynomial_coefficient(self):
        # the coefficient is 8 / (1 + 2b)^2
        w = omega2_extract(gauged(["b1 + b1^2"], ["x1^2"]))
        assert w.entries == {(1, (1, 1), 1): poly("8 - 32*b1 + 96*b1^2 - 256*b1^3")}

    def test_linear_lift_only(self):
        assert omega2_extract(gauged(["b1 + b1^2"], ["0"])).is_zero()

    def test_additive_in_perturbations(self):
        base = connection_from_gk(tautological_gk(2, 3, 2))
        one = perturb(base, 1, (1, 2), 1)
        both = perturb(one, 2, (2, 2), 1, coeff=3)
        a = omega2_extract(one) - omega2_extract(base)
        b = omega2_extract(perturb(base, 2, (2, 2), 1, coeff=3)) - omega2_extract(base)
        assert omega2_extract(both) - omega2_extract(base) == a + b


class TestDifference:
    def test_equal(self):
        w = omega2_extract(gauged(["b1 + b1^2"], ["x1^2"]))
        assert cech_difference(w, w).is_zero()

    def test_against_tautological(self):
        w = omega2_extract(gauged(["b1 + b1^2"], ["x1^2"]))
        zero = omega2_extract(connection_from_gk(tautological_gk(1, 4, 3)))
        assert cech_difference(w, zero) == w

    def test_antisymmetry(self):
        a = omega2_extract(gauged(["b1 + b1^2"], ["x1^2"]))
        b = omega2_extract(gauged(["b1"], ["x1^2"]))
        assert cech_difference(a, b) == -cech_difference(b, a)

    def test_mismatch(self):
        with pytest.raises(DimensionMismatch):
            cech_difference(BilinearMapForm(1), BilinearMapForm(2))


class TestCoboundary:
    def test_zero(self):
        result = coboundary_solve(BilinearMapForm(2), 3)
        assert result and result.witness == BilinearMap(2)

    @given(st.dictionaries(
        st.tuples(st.tuples(st.integers(1, 2), st.integers(1, 2)), st.integers(1, 2)),
        st.dictionaries(st.tuples(st.integers(0, 2), st.integers(0, 2)), st.integers(-3, 3), max_size=4),
        max_size=3,
    ))
    def test_construct_then_solve(self, raw):
        g0 = BilinearMap(2, {key: BasePoly(2, terms) for key, terms in raw.items()})
        delta = g0.differential()
        result = coboundary_solve(delta, 4)
        assert result
        assert result.witness.differential() == delta

    def test_not_closed(self):
        # b2 db1 has no primitive at any degree
        delta = BilinearMapForm(2, {(1, (1, 1), 1): BasePoly.parse("b2", 2)})
        result = coboundary_solve(delta, 5)
        assert not result
        assert result.failures == (((1, 1), 1),)
        assert "5" in result.describe()

    def test_bound_too_small(self):
        delta = BilinearMapForm(1, {(1, (1, 1), 1): poly("b1^3")})
        assert not coboundary_solve(delta, 3)
        assert coboundary_solve(delta, 4).witness.entries == {((1, 1), 1): poly("1/4*b1^4")}

    @pytest.mark.parametrize("seed", range(5))
    def test_one_dimensional_gauges(self, seed):
        g = random_gauge(random.Random(seed), 1)
        w = omega2_extract(connection_from_gk(gauge_gk(tautological_gk(1, 4, 3), g)))
        result = coboundary_solve(w, w.max_base_degree() + 1)
        assert result and result.witness.differential() == w

    def test_cap(self):
        with pytest.raises(CapExceeded):
            coboundary_solve(BilinearMapForm(2), 200, cap=100)


class TestSerialization:
    def test_form_round_trip(self):
        w = omega2_extract(gauged(["b1 + b1*b2", "b2"], ["x1*x2", "b1*x2^2"], N=3, B=2))
        assert not w.is_zero()
        assert BilinearMapForm.from_json(w.to_json()) == w

    def test_map_round_trip(self):
        g = BilinearMap(2, {((1, 2), 1): BasePoly.parse("b1*b2 - 1/3", 2)})
        assert BilinearMap.from_dict(g.to_dict()) == g

    def test_format(self):
        w = BilinearMapForm(1, {(1, (1, 1), 1): poly("8 - 32*b1")})
        assert w.to_dict() == {
            "n": 1,
            "entries": [{"base": 1, "from": [1, 1], "to": 1, "coeff_poly": "8 - 32*b1"}],
        }
