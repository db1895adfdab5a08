import math

import numpy as np
import pytest

from fdensity import wijsman as wj
from fdensity.errors import ParameterError


class TestClosedSets:
    def test_distances(self):
        assert wj.circle(1, 0.25).dist_to(0) == 0.75
        assert wj.singleton(0).dist_to(-3) == 3
        assert wj.finite_set([-1, 1]).dist_to(0) == 1
        assert wj.circle(0, 1).dist_to(2j) == 1

    def test_construction_errors(self):
        with pytest.raises(ParameterError):
            wj.finite_set([])
        with pytest.raises(ParameterError):
            wj.circle(0, 0)

    def test_lipschitz_bound(self):
        rng = np.random.default_rng(0)
        sets = [wj.singleton(0.3), wj.finite_set([-2, 1, 5]), wj.circle(1 + 1j, 0.5)]
        z = rng.normal(size=(1000, 2)) * 4
        pairs = [(complex(a, b), complex(c, d)) for (a, b), (c, d) in zip(z, z[::-1])]
        for A in sets:
            assert wj.lipschitz_violation(A, pairs) is None

    def test_lipschitz_violation_found(self):
        bad = wj.ClosedSet("bad", lambda x: 2 * abs(x))
        assert wj.lipschitz_violation(bad, [(0.0, 1.0)]) == (0.0, 1.0)


class TestMetricSpaces:
    @pytest.mark.parametrize("id", wj.PAPER_SEQUENCES)
    def test_witness_metric_axioms(self, id):
        assert wj.paper_sequence(id).space.metric_violation() is None

    def test_broken_metric(self):
        sp = wj.MetricSpace("abstract", lambda x, y: (x - y) ** 2, (0.0, 1.0, 2.0))
        assert sp.metric_violation()[0] == "triangle"

    def test_half_line_clamps(self):
        assert wj.half_line((-1.0, 2.0)).witness_points == (0.0, 2.0)
        assert wj.half_line().admit(-5) == 0.0


class TestBuiltinSequences:
    def test_witnesses(self):
        assert wj.paper_sequence("R03").witnesses == (0.0, 1.0, -2.5)
        assert wj.paper_sequence("E4").witnesses == (0.0, 2.0, -0.5)
        assert wj.paper_sequence("E3").witnesses == (0.0, 1.0, 10.0)
        assert wj.paper_sequence("E4").limit is None
        assert wj.paper_sequence("e2").space.kind == "real"

    def test_unknown(self):
        with pytest.raises(ParameterError):
            wj.paper_sequence("E9")

    def test_values(self):
        assert wj.paper_sequence("E2").sequence.at(9).dist_to(0) == 9
        assert wj.paper_sequence("E4").sequence.at(4).dist_to(2) == 3
        e3 = wj.paper_sequence("E3").sequence
        assert e3.at(8).dist_to(0) == 8 and e3.at(7).dist_to(0) == 0

    @pytest.mark.parametrize("id", wj.PAPER_SEQUENCES)
    def test_vectorized_matches_oracles(self, id):
        ex = wj.paper_sequence(id)
        for x in ex.witnesses + (0.7, 3.0):
            np.testing.assert_array_equal(ex.sequence.distances(x, 2000),
                                          ex.sequence.distances_by_index(x, 2000))

    def test_r03_off_squares(self):
        seq = wj.paper_sequence("R03").sequence
        for x in (0.0, 1.0, -2.5, 0.5 + 0.5j):
            d = seq.distances(x, 10_000)
            for k in range(1, 10_001):
                if math.isqrt(k) ** 2 != k:
                    assert d[k - 1] == abs(x)

    def test_deterministic(self):
        seq = wj.paper_sequence("R03").sequence
        assert seq.at(16).dist_to(0.3) == seq.at(16).dist_to(0.3)


class TestAlternatingMeans:
    @pytest.mark.parametrize("x", [0.0, 2.0, -0.5, 1.0, -1.0, 0.9, -3.2])
    def test_closed_form(self, x):
        seq = wj.paper_sequence("E4").sequence
        means = np.cumsum(seq.distances(x, 1000)) / np.arange(1, 1001)
        closed = [wj.alternating_cesaro_mean(x, k) for k in range(1, 1001)]
        np.testing.assert_allclose(means, closed, rtol=0, atol=1e-12)

    def test_odd_inside_branch_sign(self):
        # k = 1: A_1 = {1}, so the mean at x is |x - 1| = 1 - x on [-1, 1]
        assert wj.alternating_cesaro_mean(0.5, 1) == 0.5
        assert wj.alternating_cesaro_mean(0.5, 3) == pytest.approx(1 - 0.5 / 3)

    def test_limit(self):
        assert wj.alternating_cesaro_limit(0.3) == 1.0
        assert wj.alternating_cesaro_limit(-4.0) == 4.0


def test_custom_sequence():
    seq = wj.sequence_from_function("shrink", lambda k: wj.singleton(1 / k))
    np.testing.assert_allclose(seq.distances(0, 4), [1, 0.5, 1 / 3, 0.25])
    const = wj.constant_sequence(wj.singleton(2))
    np.testing.assert_array_equal(const.distances(0, 3), [2, 2, 2])
