import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from steercoh import measures, states, steering
from steercoh.errors import NotOrthonormal, ShapeMismatch

from conftest import random_unitary

seeds = st.integers(min_value=0, max_value=2**63 - 1)

Z = steering.MeasurementBasis(np.eye(2))
X = steering.MeasurementBasis.from_vectors([[1, 1] / np.sqrt(2), [1, -1] / np.sqrt(2)])


def basis(rng, d):
    return steering.MeasurementBasis(random_unitary(rng, d))


class TestBasis:
    def test_rejects_non_orthonormal(self):
        with pytest.raises(NotOrthonormal):
            steering.MeasurementBasis(np.array([[1, 1], [0, 1]]))

    def test_rejects_non_square(self):
        with pytest.raises(ShapeMismatch):
            steering.MeasurementBasis(np.ones((2, 3)))


class TestAverageCoherence:
    def test_bell_diagonal_basis(self, bell):
        assert steering.average_coherence(bell, X) == pytest.approx(1.0, abs=1e-15)

    def test_bell_which_path(self, bell):
        assert steering.average_coherence(bell, Z) == 0.0

    def test_b_already_coherent(self, rng):
        t = np.zeros((2, 2, 3), dtype=complex)
        t[0, :, 1] = 1 / np.sqrt(2)
        psi = states.from_tensor(t)
        for _ in range(5):
            assert steering.average_coherence(psi, basis(rng, 2)) == pytest.approx(1.0, abs=1e-14)

    def test_dimension_mismatch(self, bell):
        with pytest.raises(ShapeMismatch):
            steering.average_coherence(bell, steering.MeasurementBasis(np.eye(3)))

    @settings(max_examples=60, deadline=None)
    @given(st.integers(1, 3), st.integers(1, 3), seeds)
    def test_bounded_by_trace_norm(self, dA, dE, seed):
        rng = np.random.default_rng(seed)
        psi = states.haar_sample((dA, 2, dE), seed)
        bound = measures.ca_trace_norm(psi)
        for _ in range(5):
            assert steering.average_coherence(psi, basis(rng, dA)) <= bound + 1e-9

    @settings(max_examples=40, deadline=None)
    @given(st.integers(2, 3), seeds)
    def test_permutation_and_phase_invariance(self, dA, seed):
        rng = np.random.default_rng(seed)
        psi = states.haar_sample((dA, 2, 2), seed)
        u = random_unitary(rng, dA)
        v = u[:, rng.permutation(dA)] * np.exp(1j * rng.uniform(0, 2 * np.pi, dA))
        a = steering.average_coherence(psi, steering.MeasurementBasis(u))
        b = steering.average_coherence(psi, steering.MeasurementBasis(v))
        assert a == pytest.approx(b, abs=1e-14)

    def test_batch_matches_literal_route(self, rng):
        psi = states.haar_sample((3, 2, 2), 17)
        chi = states.cross_matrix_from_tensor(psi.tensor)
        us = steering.haar_unitaries(rng, 20, 3)
        vals = steering.batch_average_coherence(chi, us)
        for u, v in zip(us, vals):
            assert v == pytest.approx(steering.average_coherence(psi, steering.MeasurementBasis(u)), abs=1e-14)

    def test_trivial_measurement_gives_c1(self, rng):
        # One outcome for dA = 1: nothing to steer with.
        psi = states.haar_sample((1, 2, 3), 2)
        got = steering.average_coherence(psi, steering.MeasurementBasis(np.eye(1)))
        assert got == pytest.approx(measures.c1(psi), abs=1e-15)


class TestOptimize:
    def test_bell(self, bell):
        res = steering.optimize_steering(bell, 10_000, 1)
        assert res.analytic_bound == pytest.approx(1.0)
        assert res.best_value >= 1 - 1e-3
        assert res.best_value <= res.analytic_bound + 1e-9

    def test_ghz(self, ghz):
        res = steering.optimize_steering(ghz, 1000, 1)
        assert res.best_value <= 1e-9 and res.analytic_bound == 0.0

    def test_haar_gap(self):
        psi = states.haar_sample((2, 2, 2), 123)
        res = steering.optimize_steering(psi, 20_000, 5)
        assert 0 <= res.analytic_bound - res.best_value <= 5e-3
        assert res.max_evaluated <= res.analytic_bound + 1e-9

    def test_qutrit_gap(self):
        psi = states.haar_sample((3, 2, 2), 321)
        res = steering.optimize_steering(psi, 20_000, 5)
        assert res.analytic_bound - res.best_value <= 5e-3

    def test_deterministic(self):
        psi = states.haar_sample((2, 2, 3), 9)
        a = steering.optimize_steering(psi, 500, 4)
        b = steering.optimize_steering(psi, 500, 4)
        assert a.best_value == b.best_value
        np.testing.assert_array_equal(a.best_basis.vectors, b.best_basis.vectors)

    def test_random_stage_monotone_in_budget(self):
        psi = states.haar_sample((3, 2, 2), 10)
        prev = -1.0
        for budget in (1, 10, 100, 1000, 5000, 9000):
            res = steering.optimize_steering(psi, budget, 3, refine_rounds=0)
            assert res.best_value >= prev - 1e-15
            prev = res.best_value

    def test_rejects_zero_budget(self, bell):
        with pytest.raises(ValueError):
            steering.optimize_steering(bell, 0, 1)
