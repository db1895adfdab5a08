import math
from fractions import Fraction

import pytest

from fdensity import density as ds
from fdensity import modulus as md
from fdensity.errors import DomainError, ParameterError

BUILTINS = [ds.squares, ds.evens, ds.odds, ds.powers_of_two]


class TestCounting:
    @pytest.mark.parametrize("ctor", BUILTINS)
    def test_closed_form_matches_brute_force(self, ctor):
        K = ctor()
        running = 0
        for n in range(0, 10_001):
            if n >= 1 and K.member(n):
                running += 1
            assert ds.count_upto(K, n) == running

    def test_examples(self):
        assert ds.count_upto(ds.squares(), 10_000) == 100
        assert ds.count_upto(ds.evens(), 7) == 3
        assert ds.count_upto(ds.finite([]), 50) == 0
        assert ds.count_upto(ds.powers_of_two(), 1024) == 10

    def test_enumeration_fallback(self):
        K = ds.from_predicate("threes", lambda k: k % 3 == 0)
        assert ds.count_upto(K, 100) == 33
        assert ds.nth_element(K, 5) == 15

    def test_negative_horizon(self):
        with pytest.raises(DomainError):
            ds.count_upto(ds.squares(), -1)

    def test_complement_and_union(self):
        C = ds.complement(ds.evens())
        assert ds.count_upto(C, 11) == 6
        assert ds.elements_upto(C, 7) == [1, 3, 5, 7]
        U = ds.union(ds.squares(), ds.evens())
        assert ds.elements_upto(U, 10) == [1, 2, 4, 6, 8, 9, 10]
        assert ds.count_upto(U, 100) == ds.brute_count(U, 100)

    def test_finite_set(self):
        K = ds.finite([5, 1, 3, 3])
        assert list(K) == [1, 3, 5]
        assert K.finite and 3 in K and 4 not in K
        with pytest.raises(IndexError):
            ds.nth_element(K, 4)
        with pytest.raises(DomainError):
            ds.finite([0, 1])

    def test_huge_power_rejected(self):
        with pytest.raises(OverflowError):
            ds.nth_element(ds.powers_of_two(), ds.MAX_EXPONENT + 1)


class TestRatios:
    def test_natural(self):
        assert ds.natural_density_ratio(ds.squares(), 10 ** 4) == 0.01
        assert ds.natural_density_ratio(ds.evens(), 10 ** 6) == 0.5
        assert ds.natural_density_ratio(ds.finite([1, 2, 3]), 10 ** 6) == 3e-6

    def test_natural_needs_positive_n(self):
        with pytest.raises(DomainError):
            ds.natural_density_ratio(ds.squares(), 0)

    def test_log_density_squares(self):
        r = ds.f_density_ratio(ds.squares(), md.log1p(), 10 ** 6)
        assert r == pytest.approx(0.5000723100501304, rel=1e-12)

    def test_log_density_evens(self):
        r = ds.f_density_ratio(ds.evens(), md.log1p(), 10 ** 6)
        assert r == pytest.approx(0.9498284100698472, rel=1e-12)

    @pytest.mark.parametrize("a", [0.5, 3, 7.25])
    def test_scale_reduces_to_natural(self, a):
        for n in (1, 17, 1000, 12345):
            r = ds.f_density_ratio(ds.squares(), md.scale(a), n)
            assert isinstance(r, Fraction)
            assert r == Fraction(ds.count_upto(ds.squares(), n), n)

    def test_bounded_modulus_rejected(self):
        with pytest.raises(ParameterError):
            ds.f_density_ratio(ds.squares(), md.bounded_ratio(), 10)

    def test_empty_count(self):
        assert ds.f_density_ratio(ds.finite([]), md.log1p(), 100) == 0.0


class TestTrend:
    def test_squares_natural(self):
        tr = ds.density_trend(ds.squares(), None, ds.geometric_grid(16, 10 ** 6, 2), limit=0)
        assert tr.verdict == "consistent"
        assert tr.consistent_with(0.0, 0.01)

    def test_squares_log(self):
        tr = ds.density_trend(ds.squares(), md.log1p(), ds.geometric_grid(16, 10 ** 6, 2),
                              limit=0.5)
        assert tr.verdict == "consistent"
        assert abs(tr.last - 0.5) <= 0.01

    def test_evens_log_slow(self):
        tr = ds.density_trend(ds.evens(), md.log1p(), limit=1.0, tol=0.01)
        assert tr.trend == 1
        assert tr.last >= 0.94
        assert tr.verdict == "inconclusive"

    def test_complement_symmetry(self):
        evens = ds.density_trend(ds.evens(), md.log1p())
        odds = ds.density_trend(ds.odds(), md.log1p())
        assert evens.trend == odds.trend == 1
        assert odds.last >= 0.94

    def test_finite_set_vanishes(self):
        for f in (md.log1p(), md.power(0.5), md.identity()):
            tr = ds.density_trend(ds.finite([1, 2, 3]), f)
            assert all(b <= a for a, b in zip(tr.values, tr.values[1:]))
            assert tr.last < 0.2

    def test_diverging(self):
        # blocks [4^j, 2*4^j) alternate the ratio between ~1/3 and ~2/3
        K = ds.from_predicate("blocks", lambda k: k.bit_length() % 2 == 1)
        tr = ds.density_trend(K, None, [2 ** j for j in range(4, 16)])
        assert tr.verdict == "diverging"

    def test_values_in_unit_interval(self):
        tr = ds.density_trend(ds.evens(), md.power(0.5))
        assert all(0 <= v <= 1 for v in tr.values)

    def test_short_grid_rejected(self):
        with pytest.raises(ParameterError):
            ds.density_trend(ds.squares(), grid=[1, 2, 3])

    def test_rows(self):
        tr = ds.density_trend(ds.squares(), None, [16, 64, 256, 1024])
        assert tr.header() == ["n", "count", "ratio"]
        assert tr.rows()[0] == [16, 4, 0.25]
        tr = ds.density_trend(ds.squares(), md.log1p(), [16, 64, 256, 1024])
        assert tr.header() == ["n", "count", "f_count", "f_n", "ratio"]
        assert tr.rows()[1][2] == pytest.approx(math.log(9))


def test_geometric_grid():
    assert ds.geometric_grid(16, 256, 2) == [16, 32, 64, 128, 256]
    assert ds.geometric_grid(1, 100, 1.5)[:4] == [1, 2, 3, 5]
    with pytest.raises(ParameterError):
        ds.geometric_grid(1, 10, 1)
