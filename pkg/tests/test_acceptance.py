"""Acceptance gate.

Each test runs one numbered criterion at its stated tolerance and prints a
single PASS/FAIL line (visible with ``pytest tests/test_acceptance.py -s``).
Everything is seeded, so the counts below are bit-reproducible.
"""

import json
import time

import numpy as np

from oracles import best_support_exhaustive, central_difference_gradient
from subnyq import (
    DemodConfig,
    EnergyModel,
    FingerBank,
    SolverConfig,
    SparsityProfile,
    WindowPlan,
    acquire_pscs,
    acquire_serial,
    build_pscs_matrix,
    build_v_matrix,
    estimate_energy,
    make_basis,
    make_finger_bank,
    make_measurement_matrix,
    omp,
    pnorm_gd,
    pnorm_penalty,
    pnorm_penalty_grad,
    sample_sparse_coefficients,
    score,
    smooth_l1,
    smooth_l1_gd,
    smooth_l1_grad,
    synthesize,
)
from subnyq.cli import main as cli_main

TRIALS = 100
COEFF_SEED_OFFSET = 1_000_003
CHIP_SEED_OFFSET = 3_000_003


def report(num, ok, detail):
    print(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"criterion {num}: {detail}"


def planted(n, k, seed):
    return sample_sparse_coefficients(
        SparsityProfile(k), n, seed + COEFF_SEED_OFFSET
    )


def test_criterion_01_discrete_recovery():
    t0 = time.perf_counter()
    wins = 0
    for t in range(TRIALS):
        op = make_measurement_matrix("gaussian", 64, 256, t)
        alpha = planted(256, 5, t)
        res = omp(op, op.matrix @ alpha, k_max=5, residual_tol=1e-10)
        exact = np.array_equal(np.flatnonzero(res.alpha), np.flatnonzero(alpha))
        wins += exact and np.max(np.abs(res.alpha - alpha)) < 1e-6
    dt = time.perf_counter() - t0
    report(1, wins >= 95 and dt < 10.0,
           f"OMP exact recovery {wins}/100 (need >=95), {dt:.2f}s (<10s)")


def test_criterion_02_brute_force_oracle():
    t0 = time.perf_counter()
    agree = 0
    for t in range(TRIALS):
        op = make_measurement_matrix("bernoulli", 8, 16, t)
        alpha = planted(16, 2, t)
        y = op.matrix @ alpha
        res = omp(op, y, k_max=2, residual_tol=1e-10)
        agree += set(np.flatnonzero(res.alpha)) == best_support_exhaustive(
            op.matrix, y, 2
        )
    dt = time.perf_counter() - t0
    report(2, agree >= 95 and dt < 5.0,
           f"OMP matches exhaustive oracle {agree}/100 (need >=95), {dt:.2f}s (<5s)")


def test_criterion_03_demodulator_end_to_end():
    t0 = time.perf_counter()
    basis = make_basis("dft_real", 512)
    good = 0
    for t in range(TRIALS):
        config = DemodConfig(n=512, m=8, chip_seed=t + CHIP_SEED_OFFSET)
        v = build_v_matrix(basis, config)
        alpha = planted(512, 5, t)
        y = acquire_serial(synthesize(basis, alpha), config)
        res = omp(v, y, k_max=5, residual_tol=1e-10)
        good += score(alpha, res, basis).reconstruction_snr_db >= 60.0
    dt = time.perf_counter() - t0
    report(3, good >= 90 and dt < 60.0,
           f"demodulator SNR>=60dB in {good}/100 (need >=90), {dt:.1f}s (<60s)")


def test_criterion_04_v_matrix_column_equivalence():
    worst = 0.0
    for kind in ("identity", "dft_real", "random_orthonormal"):
        basis = make_basis(kind, 128, 5)
        config = DemodConfig(n=128, m=4, chip_seed=9)
        v = build_v_matrix(basis, config)
        for i in range(128):
            col = acquire_serial(basis.matrix[:, i], config)
            worst = max(worst, float(np.max(np.abs(v.matrix[:, i] - col))))
    report(4, worst < 1e-12, f"max column deviation {worst:.2e} (<1e-12)")


def test_criterion_05_pipeline_linearity():
    config = DemodConfig(n=128, m=4, chip_seed=2)
    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(TRIALS):
        x1, x2 = rng.standard_normal(128), rng.standard_normal(128)
        a, b = rng.uniform(-2.0, 2.0, 2)
        lhs = acquire_serial(a * x1 + b * x2, config)
        rhs = a * acquire_serial(x1, config) + b * acquire_serial(x2, config)
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    report(5, worst < 1e-12, f"superposition error {worst:.2e} (<1e-12)")


def test_criterion_06_pscs_serial_equivalence():
    # Zero overlap, rectangular windows, one integrate-and-dump finger whose
    # chips are the matching slice of the serial pipeline's chip sequence.
    plan = WindowPlan(num_segments=8, segment_len=16)
    bank = FingerBank(chip_seeds=(321,))
    config = DemodConfig(n=128, m=16, chip_seed=321)
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(50):
        x = rng.standard_normal(128)
        diff = acquire_serial(x, config) - acquire_pscs(x, plan, bank).y_joint
        worst = max(worst, float(np.max(np.abs(diff))))
    report(6, worst < 1e-12, f"serial/parallel deviation {worst:.2e} (<1e-12)")


def test_criterion_07_pscs_joint_recovery():
    basis = make_basis("dft_real", 128)
    plan = WindowPlan(num_segments=4, segment_len=32)
    joint = single = 0
    for t in range(TRIALS):
        bank = make_finger_bank(8, base_seed=t + CHIP_SEED_OFFSET)
        op = build_pscs_matrix(basis, plan, bank)
        alpha = planted(128, 3, t)
        y = acquire_pscs(synthesize(basis, alpha), plan, bank).y_joint
        truth = np.flatnonzero(alpha)
        res = omp(op, y, k_max=3, residual_tol=1e-10)
        joint += np.array_equal(np.flatnonzero(res.alpha), truth)
        seg = t % 4
        rows = slice(seg * 8, seg * 8 + 8)
        res1 = omp(op.matrix[rows], y[rows], k_max=3, residual_tol=1e-10)
        single += np.array_equal(np.flatnonzero(res1.alpha), truth)
    report(7, joint >= 90 and single <= 20,
           f"joint {joint}/100 (need >=90), single-segment {single}/100 (need <=20)")


def test_criterion_08_smoothing_bound():
    rng = np.random.default_rng(2)
    violations = 0
    for _ in range(1000):
        x = rng.standard_normal(32)
        l1 = float(np.sum(np.abs(x)))
        for eps in (1e-1, 1e-2, 1e-3):
            gap = l1 - smooth_l1(x, eps)
            violations += not (0.0 <= gap <= 32 * eps)
    report(8, violations == 0, f"{violations} violations over 3000 checks (need 0)")


def test_criterion_09_gradient_checks():
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(TRIALS):
        x = rng.standard_normal(8)
        g = smooth_l1_grad(x, 0.05)
        fd = central_difference_gradient(lambda v: smooth_l1(v, 0.05), x)
        worst = max(worst, float(np.linalg.norm(g - fd) / np.linalg.norm(fd)))
    for _ in range(TRIALS):
        x = rng.standard_normal(8)
        x[np.abs(x) < 0.05] += 0.1
        g = pnorm_penalty_grad(x, 1.3)
        fd = central_difference_gradient(lambda v: pnorm_penalty(v, 1.3), x)
        worst = max(worst, float(np.linalg.norm(g - fd) / np.linalg.norm(fd)))
    report(9, worst < 1e-6, f"worst relative gradient error {worst:.2e} (<1e-6)")


def test_criterion_10_solver_agreement():
    t0 = time.perf_counter()
    support_wins = 0
    residual_ok = 0
    lam_grid = (1e-3, 1e-4, 1e-5, 1e-6)  # relative to max|A^T y|
    for t in range(TRIALS):
        op = make_measurement_matrix("gaussian", 64, 256, t)
        alpha = planted(256, 5, t)
        y = op.matrix @ alpha
        scale = float(np.max(np.abs(op.matrix.T @ y)))

        cfg = SolverConfig(kind="smooth_l1_gd", max_iters=4000, residual_tol=1e-6,
                           epsilon=1e-3, lam=lam_grid[0] * scale,
                           step_rule="backtracking", continuation=True)
        res = smooth_l1_gd(op, y, cfg)
        est = np.flatnonzero(np.abs(res.alpha) > 1e-2 * np.max(np.abs(res.alpha)))
        support_wins += np.array_equal(est, np.flatnonzero(alpha))

        cfg_small = SolverConfig(kind="smooth_l1_gd", max_iters=4000,
                                 residual_tol=1e-6, epsilon=1e-3,
                                 lam=lam_grid[-1] * scale,
                                 step_rule="backtracking", continuation=True)
        res_small = smooth_l1_gd(op, y, cfg_small)
        residual_ok += res_small.residual_norm <= 1e-4 * np.linalg.norm(y)
    dt = time.perf_counter() - t0
    report(10, support_wins >= 85 and residual_ok == TRIALS,
           f"support {support_wins}/100 (need >=85), residual<=1e-4||y|| at "
           f"smallest lambda {residual_ok}/100 (need 100), {dt:.0f}s")


def test_criterion_11_descent_property():
    worst = -np.inf
    for t in range(20):
        op = make_measurement_matrix("gaussian", 16, 48, 700 + t)
        alpha = planted(48, 3, 700 + t)
        y = op.matrix @ alpha
        for cfg in (
            SolverConfig(kind="smooth_l1_gd", max_iters=300,
                         step_rule="backtracking"),
            SolverConfig(kind="pnorm_gd", p=1.2, max_iters=300,
                         step_rule="backtracking"),
        ):
            res = smooth_l1_gd(op, y, cfg) if cfg.kind == "smooth_l1_gd" \
                else pnorm_gd(op, y, cfg)
            if res.objective_trace.shape[0] > 1:
                worst = max(worst, float(np.max(np.diff(res.objective_trace))))
    report(11, worst <= 1e-12,
           f"largest objective increase {worst:.2e} per step (<=1e-12)")


def test_criterion_12_energy_model():
    low = EnergyModel(current_ma=11.0)
    high = EnergyModel(current_ma=17.4)
    ratio = estimate_energy(1000, low) / estimate_energy(1000, high)
    ratio_ok = abs(ratio - 11.0 / 17.4) < 1e-12
    savings = 1.0 - estimate_energy(64, high) / estimate_energy(256, high)
    savings_ok = savings == 0.75
    report(12, ratio_ok and savings_ok,
           f"current ratio err {abs(ratio - 11.0/17.4):.1e} (<1e-12), "
           f"savings {savings} (exactly 0.75)")


def test_criterion_13_determinism(tmp_path):
    def run_experiment(base):
        sig, acq, rec, swp = base / "sig", base / "acq", base / "rec", base / "swp"
        assert cli_main(["generate", "--n", "128", "--k", "4", "--basis",
                         "dft_real", "--seed", "3", "--out", str(sig)]) == 0
        assert cli_main(["acquire", "--mode", "serial", "--m", "4", "--seed",
                         "5", "--in", str(sig), "--out", str(acq)]) == 0
        assert cli_main(["reconstruct", "--in", str(acq), "--solver", "omp",
                         "--kmax", "4", "--truth", str(sig / "truth.json"),
                         "--out", str(rec)]) == 0
        cfg = base / "sweep.json"
        cfg.write_text(json.dumps({"mode": "sweep", "n": 32, "k_list": [1, 2],
                                   "l_list": [8, 16], "trials": 5}))
        assert cli_main(["sweep", "--config", str(cfg), "--out", str(swp)]) == 0
        return {
            p.relative_to(base).as_posix(): p.read_bytes()
            for d in (sig, acq, rec, swp) for p in sorted(d.iterdir())
        }

    first = run_experiment(tmp_path / "one")
    second = run_experiment(tmp_path / "two")
    same = first == second
    report(13, same, f"rerun produced {'identical' if same else 'DIFFERENT'} "
           f"bytes across {len(first)} files")
