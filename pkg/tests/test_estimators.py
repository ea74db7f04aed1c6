"""Scikit-learn estimator facade: params, cloning, and numeric agreement
with the underlying functions."""

import numpy as np
import pytest
from sklearn.base import clone

from subnyq import (
    DemodConfig,
    DemodulatorSensing,
    OMPSparseCoder,
    PNormSparseCoder,
    RandomSensing,
    SegmentedSensing,
    SmoothedL1SparseCoder,
    SparsityProfile,
    WindowPlan,
    acquire_pscs,
    acquire_serial,
    make_finger_bank,
    make_measurement_matrix,
    omp,
    sample_sparse_coefficients,
)


def _signals(n_signals=3, n=32, seed=0):
    return np.random.default_rng(seed).standard_normal((n_signals, n))


class TestTransformers:
    def test_random_sensing_matches_operator(self):
        X = _signals()
        t = RandomSensing(l=8, kind="gaussian", seed=5).fit(X)
        op = make_measurement_matrix("gaussian", 8, 32, 5)
        assert np.allclose(t.transform(X), X @ op.matrix.T, atol=1e-12)

    def test_random_sensing_clone_round_trip(self):
        t = RandomSensing(l=8, kind="bernoulli", seed=1)
        c = clone(t)
        assert c.get_params() == t.get_params()
        X = _signals()
        assert np.array_equal(c.fit(X).transform(X), t.fit(X).transform(X))

    def test_demodulator_sensing_matches_pipeline(self):
        X = _signals()
        t = DemodulatorSensing(decimation=4, chip_seed=3).fit(X)
        cfg = DemodConfig(n=32, m=4, chip_seed=3)
        expected = np.vstack([acquire_serial(row, cfg) for row in X])
        assert np.allclose(t.transform(X), expected, atol=1e-12)
        # transform agrees with the fitted pipeline matrix
        assert np.allclose(t.transform(X), X @ t.matrix_.T, atol=1e-12)

    def test_segmented_sensing_matches_pipeline(self):
        X = _signals()
        t = SegmentedSensing(num_segments=4, fingers=2, chip_seed=7).fit(X)
        plan = WindowPlan(num_segments=4, segment_len=8)
        bank = make_finger_bank(2, base_seed=7)
        expected = np.vstack([acquire_pscs(row, plan, bank).y_joint for row in X])
        assert np.allclose(t.transform(X), expected, atol=1e-12)

    def test_segmented_sensing_rejects_untileable(self):
        X = _signals(n=30)
        with pytest.raises(ValueError, match="tile"):
            SegmentedSensing(num_segments=4, fingers=2).fit(X)

    def test_transform_requires_fit(self):
        from sklearn.exceptions import NotFittedError

        with pytest.raises(NotFittedError):
            RandomSensing(l=4).transform(_signals())


class TestSparseCoders:
    def _instance(self):
        op = make_measurement_matrix("gaussian", 16, 48, 2)
        alpha = sample_sparse_coefficients(SparsityProfile(3), 48, 3)
        return op.matrix, alpha, op.matrix @ alpha

    def test_omp_coder_matches_function(self):
        A, alpha, y = self._instance()
        est = OMPSparseCoder(k_max=3, residual_tol=1e-10).fit(A, y)
        direct = omp(A, y, k_max=3, residual_tol=1e-10)
        assert np.array_equal(est.coef_, direct.alpha)
        assert est.n_iter_ == direct.iterations
        assert est.converged_
        assert np.allclose(est.predict(A), y, atol=1e-8)

    def test_smoothed_l1_coder_recovers_support(self):
        A, alpha, y = self._instance()
        est = SmoothedL1SparseCoder(continuation=True).fit(A, y)
        got = set(np.flatnonzero(np.abs(est.coef_) > 1e-2 * np.max(np.abs(est.coef_))))
        assert got == set(np.flatnonzero(alpha))

    def test_pnorm_coder_params_validated_at_fit(self):
        A, _, y = self._instance()
        with pytest.raises(ValueError, match="exceed 1"):
            PNormSparseCoder(p=0.9).fit(A, y)

    def test_clone_and_refit_identical(self):
        A, _, y = self._instance()
        est = OMPSparseCoder(k_max=3)
        c = clone(est)
        assert np.array_equal(est.fit(A, y).coef_, c.fit(A, y).coef_)

    def test_fit_rejects_mismatched_y(self):
        A, _, y = self._instance()
        with pytest.raises(ValueError):
            OMPSparseCoder().fit(A, y[:-1])
