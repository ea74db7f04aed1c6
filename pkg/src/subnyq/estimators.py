"""Scikit-learn style front end.

Acquisition pipelines are transformers (rows of signals in, rows of
measurements out) and sparse solvers are estimators whose ``fit(X, y)``
takes the design matrix as X and the measurement vector as y, leaving the
recovered coefficients in ``coef_`` -- so everything clones, grid-searches,
and pipelines like the rest of the ecosystem.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .demodulator import DemodConfig, DemodFilter, acquire_serial, build_v_matrix
from .pscs import WindowPlan, acquire_pscs, build_pscs_matrix, make_finger_bank
from .sensing import make_measurement_matrix
from .signals import make_basis
from .solvers import SolverConfig, omp, pnorm_gd, smooth_l1_gd


class _SensingTransformer(TransformerMixin, BaseEstimator):
    """Shared fit/transform plumbing: fit pins the signal length and builds
    the signal-domain pipeline matrix ``matrix_`` (one row per measurement)."""

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64)
        self.n_features_in_ = X.shape[1]
        self.matrix_ = self._build_matrix(self.n_features_in_)
        return self

    def transform(self, X):
        check_is_fitted(self, "matrix_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, but the transformer was fitted "
                f"with {self.n_features_in_}"
            )
        return X @ self.matrix_.T

    def _build_matrix(self, n: int) -> np.ndarray:
        raise NotImplementedError


class RandomSensing(_SensingTransformer):
    """Dense random projection: y = Phi x with a seeded Gaussian or
    Bernoulli matrix of shape (l, n_features)."""

    def __init__(self, l=16, kind="gaussian", seed=0):
        self.l = l
        self.kind = kind
        self.seed = seed

    def _build_matrix(self, n: int) -> np.ndarray:
        return make_measurement_matrix(self.kind, self.l, n, self.seed).matrix


class DemodulatorSensing(_SensingTransformer):
    """Serial random-demodulator front end: chip multiply, filter, decimate.

    ``decimation`` grid samples collapse into one output; n_features must be
    divisible by it. ``fir_taps=None`` selects integrate-and-dump.
    """

    def __init__(self, decimation=4, chip_seed=0, fir_taps=None):
        self.decimation = decimation
        self.chip_seed = chip_seed
        self.fir_taps = fir_taps

    def _config(self, n: int) -> DemodConfig:
        filt = (
            DemodFilter.integrate_and_dump()
            if self.fir_taps is None
            else DemodFilter.fir(np.asarray(self.fir_taps, dtype=np.float64))
        )
        return DemodConfig(n=n, m=self.decimation, filter=filt, chip_seed=self.chip_seed)

    def _build_matrix(self, n: int) -> np.ndarray:
        return build_v_matrix(make_basis("identity", n), self._config(n)).matrix

    def transform(self, X):
        check_is_fitted(self, "matrix_")
        X = check_array(X, dtype=np.float64)
        config = self._config(self.n_features_in_)
        return np.vstack([acquire_serial(row, config) for row in X])


class SegmentedSensing(_SensingTransformer):
    """Parallel segmented front end: windowed segments times finger banks.

    Segment length is derived from n_features, ``num_segments``, and
    ``overlap``; each finger integrates one chip-multiplied segment to a
    scalar, giving num_segments * fingers measurements per signal.
    """

    def __init__(self, num_segments=4, fingers=8, overlap=0,
                 window="rectangular", chip_seed=0):
        self.num_segments = num_segments
        self.fingers = fingers
        self.overlap = overlap
        self.window = window
        self.chip_seed = chip_seed

    def _plan_bank(self, n: int):
        total = n + (self.num_segments - 1) * self.overlap
        if total % self.num_segments != 0:
            raise ValueError(
                f"cannot tile {n} samples with {self.num_segments} segments "
                f"and overlap {self.overlap}"
            )
        plan = WindowPlan(
            num_segments=self.num_segments,
            segment_len=total // self.num_segments,
            overlap=self.overlap,
            window_kind=self.window,
        )
        bank = make_finger_bank(self.fingers, base_seed=self.chip_seed)
        return plan, bank

    def _build_matrix(self, n: int) -> np.ndarray:
        plan, bank = self._plan_bank(n)
        return build_pscs_matrix(make_basis("identity", n), plan, bank).matrix

    def transform(self, X):
        check_is_fitted(self, "matrix_")
        X = check_array(X, dtype=np.float64)
        plan, bank = self._plan_bank(self.n_features_in_)
        return np.vstack([acquire_pscs(row, plan, bank).y_joint for row in X])


class _SparseCoder(RegressorMixin, BaseEstimator):
    """Shared solver plumbing: fit(X, y) stores coef_ and diagnostics."""

    def fit(self, X, y):
        X = check_array(X, dtype=np.float64)
        y = check_array(y, dtype=np.float64, ensure_2d=False)
        if y.ndim != 1 or y.shape[0] != X.shape[0]:
            raise ValueError(
                f"y must be 1-D with length {X.shape[0]}, got shape {y.shape}"
            )
        self.n_features_in_ = X.shape[1]
        result = self._solve(X, y)
        self.coef_ = result.alpha
        self.n_iter_ = result.iterations
        self.residual_norm_ = result.residual_norm
        self.converged_ = result.converged
        self.objective_trace_ = result.objective_trace
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X, dtype=np.float64)
        return X @ self.coef_

    def _solve(self, X, y):
        raise NotImplementedError


class OMPSparseCoder(_SparseCoder):
    """Greedy orthogonal matching pursuit; ``k_max=None`` allows up to one
    atom per measurement."""

    def __init__(self, k_max=None, residual_tol=1e-6):
        self.k_max = k_max
        self.residual_tol = residual_tol

    def _solve(self, X, y):
        return omp(X, y, k_max=self.k_max, residual_tol=self.residual_tol)


class SmoothedL1SparseCoder(_SparseCoder):
    """Gradient descent on the smoothed one-norm surrogate.

    ``lam`` and ``epsilon`` default to 1e-3 * max|X^T y| when None;
    ``continuation`` tightens epsilon through two further stages.
    """

    def __init__(self, lam=None, epsilon=None, max_iters=4000, tol=1e-6,
                 step_rule="backtracking", continuation=False):
        self.lam = lam
        self.epsilon = epsilon
        self.max_iters = max_iters
        self.tol = tol
        self.step_rule = step_rule
        self.continuation = continuation

    def _solve(self, X, y):
        config = SolverConfig(
            kind="smooth_l1_gd",
            max_iters=self.max_iters,
            residual_tol=self.tol,
            epsilon=self.epsilon,
            lam=self.lam,
            step_rule=self.step_rule,
            continuation=self.continuation,
        )
        return smooth_l1_gd(X, y, config)


class PNormSparseCoder(_SparseCoder):
    """Gradient descent with the sum(|a|^p) penalty, 1 < p <= 1.5."""

    def __init__(self, p=1.1, lam=None, max_iters=4000, tol=1e-6,
                 step_rule="backtracking"):
        self.p = p
        self.lam = lam
        self.max_iters = max_iters
        self.tol = tol
        self.step_rule = step_rule

    def _solve(self, X, y):
        config = SolverConfig(
            kind="pnorm_gd",
            max_iters=self.max_iters,
            residual_tol=self.tol,
            p=self.p,
            lam=self.lam,
            step_rule=self.step_rule,
        )
        return pnorm_gd(X, y, config)
