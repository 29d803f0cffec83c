import math
from fractions import Fraction

import numpy as np
import pytest

from steercoh import ensemble, measures, states
from steercoh.errors import OutOfRange


def gamma_oracle(a, K):
    # Straight evaluation with the stdlib Gamma; fine away from the poles.
    num = {1: 1, 2: 13 - 22 * K, 3: 433 - 936 * K + 428 * K * K}[a]
    den = {1: 2, 2: 32, 3: 512}[a]
    shift = {1: 0.5, 2: 1.5, 3: 2.5}[a]
    return (-1) ** K * math.pi ** 1.5 * num / (den * math.factorial(K) * math.gamma(shift - K))


class TestClosedForm:
    @pytest.mark.parametrize("a, K, frac", [
        (1, 1, Fraction(1, 4)),
        (2, 1, Fraction(9, 32)),
        (3, 1, Fraction(75, 256)),
        (1, 2, Fraction(3, 16)),
        (2, 2, Fraction(31, 128)),
    ])
    def test_known_values(self, a, K, frac):
        assert ensemble.closed_form_coefficient(a, K) == frac
        assert ensemble.closed_form_mean(a, K) == pytest.approx(float(frac) * math.pi, rel=1e-15)

    @pytest.mark.parametrize("a", [1, 2, 3])
    @pytest.mark.parametrize("K", range(1, 16))
    def test_matches_gamma_oracle(self, a, K):
        assert ensemble.closed_form_mean(a, K) == pytest.approx(gamma_oracle(a, K), rel=1e-12)

    def test_gamma_half_ratio(self):
        for n in range(-5, 8):
            assert float(ensemble.gamma_half_ratio(n)) == pytest.approx(
                math.gamma(0.5 - n) / math.sqrt(math.pi), rel=1e-13)

    @pytest.mark.parametrize("a", [1, 2, 3])
    def test_range_and_monotone(self, a):
        vals = [ensemble.closed_form_mean(a, K) for K in range(1, 31)]
        assert all(0 < v <= 1 for v in vals)
        assert all(x > y for x, y in zip(vals[:10], vals[1:11]))

    def test_ordered_in_a(self):
        for K in range(1, 11):
            c1, c2, c3 = (ensemble.closed_form_mean(a, K) for a in (1, 2, 3))
            assert c1 <= c2 <= c3

    def test_c1_binomial_form(self):
        for K in range(1, 11):
            want = math.pi / 2 * math.comb(2 * K, K) / 4 ** K
            assert abs(ensemble.closed_form_mean(1, K) - want) <= 1e-12

    @pytest.mark.parametrize("a, K", [(0, 1), (4, 1), (1, 0), (2, 31)])
    def test_out_of_range(self, a, K):
        with pytest.raises(OutOfRange):
            ensemble.closed_form_mean(a, K)


class TestMonteCarlo:
    def test_deterministic(self):
        assert ensemble.monte_carlo_mean(1, 1, 100, 5) == ensemble.monte_carlo_mean(1, 1, 100, 5)

    def test_worker_independent(self):
        one = ensemble.sample_values(2, 3, 12_000, 8, workers=1)
        four = ensemble.sample_values(2, 3, 12_000, 8, workers=4)
        np.testing.assert_array_equal(one, four)

    def test_values_are_per_sample_measures(self):
        v = ensemble.sample_values(3, 2, 7, 21)
        for i in range(7):
            psi = states.haar_sample((3, 2, 2), states.sample_seed(21, i))
            assert v[i] == pytest.approx(measures.ca_trace_norm(psi), abs=1e-14)

    def test_a1_is_c1(self):
        v = ensemble.sample_values(1, 3, 5, 2)
        for i in range(5):
            psi = states.haar_sample((1, 2, 3), states.sample_seed(2, i))
            assert v[i] == pytest.approx(measures.c1(psi), abs=1e-15)

    def test_stderr(self):
        v = ensemble.sample_values(1, 2, 500, 3)
        mean, err = ensemble.monte_carlo_mean(1, 2, 500, 3)
        assert mean == pytest.approx(v.mean(), rel=1e-14)
        assert err == pytest.approx(v.std(ddof=1) / math.sqrt(500), rel=1e-12)

    def test_too_few_samples(self):
        with pytest.raises(OutOfRange):
            ensemble.monte_carlo_mean(1, 1, 99, 0)

    @pytest.mark.parametrize("a, K", [(1, 1), (2, 1)])
    def test_anchor_values(self, a, K):
        mean, err = ensemble.monte_carlo_mean(a, K, 100_000, 2024)
        assert abs(mean - ensemble.closed_form_mean(a, K)) <= 4 * err


class TestCompare:
    def test_plumbing(self):
        rep = ensemble.compare(2, 4, 10_000, 1)
        assert rep.closed_form == ensemble.closed_form_mean(2, 4)
        assert rep.z_score == pytest.approx((rep.mc_mean - rep.closed_form) / rep.mc_stderr)
        assert rep.mc_stderr > 0

    def test_c3_closed_form_field(self):
        rep = ensemble.compare(3, 1, 50_000, 7)
        assert rep.closed_form == pytest.approx(0.920388, abs=1e-6)

    def test_c1_k1(self):
        assert abs(ensemble.compare(1, 1, 100_000, 42).z_score) <= 4

    def test_tripartite_reading(self):
        rep = ensemble.compare(1, 1, 20_000, 3, alice_dim=2)
        assert rep.effective_K == 2
        assert rep.closed_form == ensemble.closed_form_mean(1, 2)
        assert abs(rep.z_score) <= 4

    def test_tripartite_reading_only_for_a1(self):
        with pytest.raises(OutOfRange):
            ensemble.compare(2, 1, 1000, 3, alice_dim=3)
