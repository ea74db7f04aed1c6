"""Experiment harness: recovery scoring, (k, l) sweeps, and the radio
energy model for transmission-rate reduction.

Sweeps are bit-deterministic: trial t of every (k, l) cell derives all of
its randomness from ``base_seed + t`` plus fixed role offsets, so any row
can be reproduced in isolation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .demodulator import DemodConfig, acquire_serial, build_v_matrix
from .pscs import WindowPlan, acquire_pscs, build_pscs_matrix, make_finger_bank
from .sensing import compose, make_measurement_matrix, measure
from .signals import Basis, SparsityProfile, make_basis, sample_sparse_coefficients, synthesize
from .solvers import ReconstructionResult, SolverConfig, omp, solve
from .validation import check_nonnegative, check_positive_int, check_seed

PIPELINES = ("discrete", "serial_demod", "pscs")

_SUPPORT_REL_TOL = 1e-6
_SUCCESS_COEFF_TOL = 1e-6

# Role offsets applied to the per-trial seed (mod 2^64) so the matrix, the
# planted coefficients, and the noise draw use distinct PCG64 streams.
_COEFF_OFFSET = 1_000_003
_NOISE_OFFSET = 2_000_003
_CHIP_OFFSET = 3_000_003
_SEED_MOD = 2**64


def _derived_seed(seed: int, offset: int) -> int:
    return (seed + offset) % _SEED_MOD


@dataclass
class RecoveryMetrics:
    """How well a reconstruction matched the planted truth."""

    support_exact: bool
    coeff_err_inf: float
    reconstruction_snr_db: float
    iterations: int

    def to_dict(self) -> dict:
        return {
            "support_exact": self.support_exact,
            "coeff_err_inf": self.coeff_err_inf,
            "reconstruction_snr_db": self.reconstruction_snr_db,
            "iterations": self.iterations,
        }


def estimated_support(alpha_star: np.ndarray) -> np.ndarray:
    """Indices above the relative magnitude floor 1e-6 * max(1, max|alpha|)."""
    alpha_star = np.asarray(alpha_star)
    floor = _SUPPORT_REL_TOL * max(1.0, float(np.max(np.abs(alpha_star), initial=0.0)))
    return np.flatnonzero(np.abs(alpha_star) > floor)


def score(alpha_true, result: ReconstructionResult, basis: Basis) -> RecoveryMetrics:
    """Compare a solver result against the planted coefficients.

    The SNR is computed in the signal domain x = Psi alpha and reported as
    +inf when the reconstruction error is exactly zero.
    """
    alpha_true = np.asarray(alpha_true, dtype=np.float64)
    alpha_star = np.asarray(result.alpha, dtype=np.float64)
    if alpha_true.shape != alpha_star.shape or alpha_true.shape[0] != basis.n:
        raise ValueError("alpha_true, result.alpha, and basis dimensions must agree")

    true_support = np.flatnonzero(alpha_true)
    est_support = estimated_support(alpha_star)
    support_exact = true_support.shape == est_support.shape and bool(
        np.all(true_support == est_support)
    )
    coeff_err_inf = float(np.max(np.abs(alpha_star - alpha_true)))

    x = basis.matrix @ alpha_true
    err_sq = float(np.sum((x - basis.matrix @ alpha_star) ** 2))
    sig_sq = float(np.sum(x**2))
    if err_sq == 0.0:
        snr = math.inf
    elif sig_sq == 0.0:
        snr = -math.inf
    else:
        snr = 10.0 * math.log10(sig_sq / err_sq)
    return RecoveryMetrics(
        support_exact=support_exact,
        coeff_err_inf=coeff_err_inf,
        reconstruction_snr_db=snr,
        iterations=result.iterations,
    )


@dataclass
class SweepSpec:
    """Grid of (k, l) recovery experiments over one acquisition pipeline."""

    n: int
    k_list: tuple[int, ...]
    l_list: tuple[int, ...]
    trials: int
    base_seed: int = 0
    pipeline: str = "discrete"
    solver: SolverConfig = field(default_factory=SolverConfig)
    basis_kind: str = "identity"
    basis_seed: int = 0
    matrix_kind: str = "gaussian"
    segments: int = 4
    amplitude_range: tuple[float, float] = (1.0, 2.0)
    sign_symmetric: bool = True
    noise_sigma: float = 0.0

    def __post_init__(self):
        check_positive_int(self.n, "n")
        check_positive_int(self.trials, "trials")
        check_seed(self.base_seed, "base_seed")
        check_nonnegative(self.noise_sigma, "noise_sigma")
        self.k_list = tuple(int(k) for k in self.k_list)
        self.l_list = tuple(int(l) for l in self.l_list)
        if not self.k_list or not self.l_list:
            raise ValueError("k_list and l_list must be nonempty")
        for k in self.k_list:
            if not 1 <= k <= self.n:
                raise ValueError(f"k={k} outside [1, n={self.n}]")
        for l in self.l_list:
            if not 1 <= l < self.n:
                raise ValueError(f"l={l} must satisfy 1 <= l < n={self.n}")
        if self.pipeline not in PIPELINES:
            raise ValueError(
                f"unknown pipeline {self.pipeline!r}, expected one of {PIPELINES}"
            )
        check_positive_int(self.segments, "segments")

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "k_list": list(self.k_list),
            "l_list": list(self.l_list),
            "trials": self.trials,
            "base_seed": self.base_seed,
            "pipeline": self.pipeline,
            "solver": self.solver.to_dict(),
            "basis_kind": self.basis_kind,
            "basis_seed": self.basis_seed,
            "matrix_kind": self.matrix_kind,
            "segments": self.segments,
            "amplitude_range": list(self.amplitude_range),
            "sign_symmetric": self.sign_symmetric,
            "noise_sigma": self.noise_sigma,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SweepSpec":
        d = dict(d)
        solver = d.pop("solver", None)
        known = {
            "n", "k_list", "l_list", "trials", "base_seed", "pipeline",
            "basis_kind", "basis_seed", "matrix_kind", "segments",
            "amplitude_range", "sign_symmetric", "noise_sigma",
        }
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown sweep config fields: {sorted(unknown)}")
        if "k_list" not in d or "l_list" not in d or "n" not in d or "trials" not in d:
            raise ValueError("sweep config requires n, k_list, l_list, and trials")
        if "amplitude_range" in d:
            d["amplitude_range"] = tuple(d["amplitude_range"])
        d["k_list"] = tuple(d["k_list"])
        d["l_list"] = tuple(d["l_list"])
        if solver is not None:
            d["solver"] = SolverConfig.from_dict(solver)
        return cls(**d)


@dataclass
class SweepRow:
    """One (k, l) cell of a sweep."""

    k: int
    l: int
    trials: int
    success_rate: float
    mean_snr_db: float
    mean_iters: float


def _acquire_trial(spec: SweepSpec, basis: Basis, l: int, f: np.ndarray, seed: int):
    """Build (design matrix, measurements) for one trial of the pipeline."""
    if spec.pipeline == "discrete":
        op = make_measurement_matrix(spec.matrix_kind, l, spec.n, seed)
        record = measure(
            op, f, spec.noise_sigma, _derived_seed(seed, _NOISE_OFFSET),
            basis_meta=basis.describe(),
        )
        return compose(op, basis).matrix, record.y
    if spec.pipeline == "serial_demod":
        if spec.n % l != 0 or spec.n // l < 2:
            raise ValueError(
                f"serial_demod needs l to divide n with n/l >= 2, got n={spec.n}, l={l}"
            )
        config = DemodConfig(
            n=spec.n, m=spec.n // l, chip_seed=_derived_seed(seed, _CHIP_OFFSET)
        )
        v = build_v_matrix(basis, config)
        y = acquire_serial(f, config)
    else:
        if l % spec.segments != 0:
            raise ValueError(
                f"pscs needs segments={spec.segments} to divide l={l}"
            )
        if spec.n % spec.segments != 0:
            raise ValueError(
                f"pscs needs segments={spec.segments} to divide n={spec.n}"
            )
        plan = WindowPlan(
            num_segments=spec.segments, segment_len=spec.n // spec.segments
        )
        bank = make_finger_bank(
            l // spec.segments, base_seed=_derived_seed(seed, _CHIP_OFFSET)
        )
        v = build_pscs_matrix(basis, plan, bank)
        y = acquire_pscs(f, plan, bank).y_joint
    if spec.noise_sigma > 0.0:
        rng = np.random.default_rng(_derived_seed(seed, _NOISE_OFFSET))
        y = y + rng.normal(0.0, spec.noise_sigma, y.shape[0])
    return v.matrix, y


def _run_trial(spec: SweepSpec, basis: Basis, k: int, l: int, seed: int) -> tuple[bool, RecoveryMetrics]:
    profile = SparsityProfile(k, spec.amplitude_range, spec.sign_symmetric)
    alpha = sample_sparse_coefficients(
        profile, spec.n, _derived_seed(seed, _COEFF_OFFSET)
    )
    f = synthesize(basis, alpha)
    design, y = _acquire_trial(spec, basis, l, f, seed)
    if spec.solver.kind == "omp":
        # Canonical known-sparsity run: the atom budget is the planted k.
        k_max = min(k, design.shape[0])
        result = omp(design, y, k_max=k_max, residual_tol=spec.solver.residual_tol)
    else:
        result = solve(design, y, spec.solver)
    metrics = score(alpha, result, basis)
    success = metrics.support_exact and metrics.coeff_err_inf < _SUCCESS_COEFF_TOL
    return success, metrics


def run_sweep(spec: SweepSpec) -> list[SweepRow]:
    """Run the grid; rows come out in (k, l) lexicographic order.

    A trial whose solver raises counts as a failure; it never aborts the
    sweep. Identical specs produce identical tables bit for bit.
    """
    basis = make_basis(spec.basis_kind, spec.n, spec.basis_seed)
    rows = []
    for k in sorted(set(spec.k_list)):
        for l in sorted(set(spec.l_list)):
            successes = 0
            snrs = []
            iters = []
            for t in range(spec.trials):
                seed = _derived_seed(spec.base_seed, t)
                try:
                    success, metrics = _run_trial(spec, basis, k, l, seed)
                except (ValueError, np.linalg.LinAlgError):
                    success, metrics = False, None
                if metrics is not None:
                    snrs.append(metrics.reconstruction_snr_db)
                    iters.append(metrics.iterations)
                successes += int(success)
            rows.append(
                SweepRow(
                    k=k,
                    l=l,
                    trials=spec.trials,
                    success_rate=successes / spec.trials,
                    mean_snr_db=float(np.mean(snrs)) if snrs else math.nan,
                    mean_iters=float(np.mean(iters)) if iters else math.nan,
                )
            )
    return rows


@dataclass
class EnergyModel:
    """Radio transmit-energy model; defaults mirror a low-power 2.4 GHz mote
    (3 V supply, 250 kbps link, 12-bit samples) at its 0 dBm setting."""

    current_ma: float = 17.4
    voltage_v: float = 3.0
    bitrate_bps: float = 250_000.0
    bits_per_sample: int = 12

    def __post_init__(self):
        for name in ("current_ma", "voltage_v", "bitrate_bps"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be strictly positive")
        check_positive_int(self.bits_per_sample, "bits_per_sample")

    def to_dict(self) -> dict:
        return {
            "current_ma": self.current_ma,
            "voltage_v": self.voltage_v,
            "bitrate_bps": self.bitrate_bps,
            "bits_per_sample": self.bits_per_sample,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EnergyModel":
        d = dict(d)
        known = {"current_ma", "voltage_v", "bitrate_bps", "bits_per_sample"}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown energy model fields: {sorted(unknown)}")
        return cls(**d)


def estimate_energy(samples_sent: int, model: EnergyModel) -> float:
    """Joules to transmit ``samples_sent`` samples: I * V * airtime."""
    samples_sent = int(samples_sent)
    if samples_sent < 0:
        raise ValueError(f"samples_sent must be nonnegative, got {samples_sent}")
    airtime_s = samples_sent * model.bits_per_sample / model.bitrate_bps
    return model.current_ma / 1000.0 * model.voltage_v * airtime_s


@dataclass
class RateReductionReport:
    """Energy ledger for sending l compressed samples instead of n raw ones."""

    n: int
    l: int
    compression_ratio: float
    savings_fraction: float
    raw_energy_j: float
    compressed_energy_j: float
    model: EnergyModel

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "l": self.l,
            "compression_ratio": self.compression_ratio,
            "savings_fraction": self.savings_fraction,
            "raw_energy_j": self.raw_energy_j,
            "compressed_energy_j": self.compressed_energy_j,
            "model": self.model.to_dict(),
        }


def rate_reduction_report(n: int, l: int, model: EnergyModel) -> RateReductionReport:
    """Per-block energy comparison between raw and compressed transmission."""
    check_positive_int(n, "n")
    check_positive_int(l, "l")
    if not l < n:
        raise ValueError(f"compression requires l < n, got l={l}, n={n}")
    return RateReductionReport(
        n=n,
        l=l,
        compression_ratio=l / n,
        savings_fraction=1.0 - l / n,
        raw_energy_j=estimate_energy(n, model),
        compressed_energy_j=estimate_energy(l, model),
        model=model,
    )
