"""Measurement matrices, acquisition, and operator composition."""

import math

import numpy as np
import pytest

from subnyq import (
    SparsityProfile,
    coherence,
    compose,
    make_basis,
    make_measurement_matrix,
    measure,
    omp,
    sample_sparse_coefficients,
    synthesize,
)

INV_SQRT2 = 0.7071067811865475


def test_bernoulli_entries_exact():
    op = make_measurement_matrix("bernoulli", 2, 4, seed=3)
    assert set(op.matrix.ravel()) <= {INV_SQRT2, -INV_SQRT2}


def test_bernoulli_two_absolute_values():
    op = make_measurement_matrix("bernoulli", 8, 32, seed=1)
    assert set(np.abs(op.matrix).ravel()) == {1.0 / math.sqrt(8)}


def test_gaussian_entry_variance():
    op = make_measurement_matrix("gaussian", 32, 256, seed=5)
    ratio = np.var(op.matrix) * 32
    assert 0.7 <= ratio <= 1.3


def test_rejects_l_not_below_n():
    with pytest.raises(ValueError, match="l < n"):
        make_measurement_matrix("gaussian", 4, 4, seed=1)
    with pytest.raises(ValueError):
        make_measurement_matrix("gaussian", 5, 4, seed=1)


def test_rejects_unknown_kind():
    with pytest.raises(ValueError):
        make_measurement_matrix("toeplitz", 2, 4, seed=0)


def test_full_row_rank():
    for seed in range(20):
        op = make_measurement_matrix("gaussian", 8, 24, seed)
        assert np.linalg.matrix_rank(op.matrix, tol=1e-10) == 8


def test_gaussian_column_norm_concentration():
    # Representative point of the l >= 32 regime; the bound tightens with l.
    lo, hi = np.inf, 0.0
    for seed in range(100):
        m = make_measurement_matrix("gaussian", 64, 128, seed).matrix
        norms = np.linalg.norm(m, axis=0)
        lo, hi = min(lo, norms.min()), max(hi, norms.max())
    assert 0.5 <= lo and hi <= 1.5


def test_measure_zero_signal():
    op = make_measurement_matrix("gaussian", 4, 8, seed=0)
    rec = measure(op, np.zeros(8))
    assert np.array_equal(rec.y, np.zeros(4))


def test_measure_unit_spike_selects_column():
    op = make_measurement_matrix("bernoulli", 2, 4, seed=3)
    f = np.zeros(4)
    f[1] = 1.0
    rec = measure(op, f)
    assert np.array_equal(rec.y, op.matrix[:, 1])


def test_measure_dimension_mismatch():
    op = make_measurement_matrix("gaussian", 4, 8, seed=0)
    with pytest.raises(ValueError):
        measure(op, np.zeros(7))


def test_measure_noise_seeded():
    op = make_measurement_matrix("gaussian", 4, 8, seed=0)
    f = np.ones(8)
    r1 = measure(op, f, noise_sigma=0.1, seed=9)
    r2 = measure(op, f, noise_sigma=0.1, seed=9)
    r3 = measure(op, f, noise_sigma=0.1, seed=10)
    assert np.array_equal(r1.y, r2.y)
    assert not np.array_equal(r1.y, r3.y)
    assert r1.noise_sigma == 0.1 and r1.noise_seed == 9


def test_measure_rejects_negative_sigma():
    op = make_measurement_matrix("gaussian", 4, 8, seed=0)
    with pytest.raises(ValueError):
        measure(op, np.zeros(8), noise_sigma=-1.0)


def test_planted_instance_recovered_end_to_end():
    # The operator feeding OMP returns the planted support.
    op = make_measurement_matrix("gaussian", 8, 16, seed=5)
    alpha = sample_sparse_coefficients(SparsityProfile(2), 16, seed=7)
    rec = measure(op, alpha)  # identity basis: f == alpha
    res = omp(op, rec.y, k_max=2, residual_tol=1e-10)
    assert np.array_equal(np.flatnonzero(res.alpha), np.flatnonzero(alpha))


def test_compose_identity_is_noop():
    op = make_measurement_matrix("bernoulli", 2, 4, seed=3)
    composed = compose(op, make_basis("identity", 4))
    assert np.array_equal(composed.matrix, op.matrix)
    assert composed.meta["composed_with"]["kind"] == "identity"


def test_compose_preserves_row_norms():
    op = make_measurement_matrix("bernoulli", 2, 4, seed=3)
    basis = make_basis("random_orthonormal", 4, 1)
    composed = compose(op, basis)
    before = np.linalg.norm(op.matrix, axis=1)
    after = np.linalg.norm(composed.matrix, axis=1)
    assert np.max(np.abs(before - after)) < 1e-10


def test_compose_dimension_mismatch():
    op = make_measurement_matrix("gaussian", 2, 4, seed=0)
    with pytest.raises(ValueError):
        compose(op, make_basis("identity", 5))


def test_measure_compose_associativity():
    # measure(compose(Phi, Psi), alpha) == measure(Phi, synthesize(Psi, alpha))
    rng = np.random.default_rng(11)
    for trial in range(100):
        kind = ("dft_real", "random_orthonormal")[trial % 2]
        basis = make_basis(kind, 32, trial)
        op = make_measurement_matrix("gaussian", 8, 32, trial)
        alpha = rng.standard_normal(32)
        y1 = measure(compose(op, basis), alpha).y
        y2 = measure(op, synthesize(basis, alpha)).y
        assert np.max(np.abs(y1 - y2)) < 1e-12


def test_coherence_diagnostic_bounds():
    op = make_measurement_matrix("gaussian", 8, 32, seed=2)
    c = coherence(op, make_basis("dft_real", 32))
    assert 0.0 < c <= 1.0 + 1e-12


def test_matrix_generation_bit_deterministic():
    for kind in ("gaussian", "bernoulli"):
        a = make_measurement_matrix(kind, 8, 24, 42).matrix
        b = make_measurement_matrix(kind, 8, 24, 42).matrix
        assert np.array_equal(a, b)


def test_operator_and_record_invariants():
    from subnyq.sensing import AcquisitionRecord, MeasurementOperator

    m = np.zeros((4, 8))
    with pytest.raises(ValueError):
        MeasurementOperator(matrix=m, kind="gaussian", l=4, n=4, seed=0)
    op = make_measurement_matrix("gaussian", 4, 8, 0)
    with pytest.raises(ValueError):
        AcquisitionRecord(y=np.zeros(5), operator=op)
