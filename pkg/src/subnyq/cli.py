"""Command-line front end: generate | acquire | reconstruct | sweep | energy.

Every command is deterministic given its flags and input files, echoes its
fully resolved configuration to stdout and a ``config_echo.json`` sidecar,
and follows the exit-code discipline 0 = success (including non-converged
solves), 1 = I/O failure, 2 = validation failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .demodulator import DemodConfig, acquire_serial, build_v_matrix
from .evaluation import (
    EnergyModel,
    SweepSpec,
    rate_reduction_report,
    score,
)
from .pscs import WindowPlan, acquire_pscs, build_pscs_matrix, make_finger_bank
from .sensing import compose, make_measurement_matrix, measure
from .serialization import (
    load_json,
    load_matrix_csv,
    load_vector_csv,
    save_json,
    save_matrix_csv,
    save_pscs_csv,
    save_sweep_csv,
    save_trace_csv,
    save_vector_csv,
)
from .signals import (
    Basis,
    SparsityProfile,
    make_basis,
    sample_sparse_coefficients,
    support,
    synthesize,
)
from .solvers import SolverConfig, omp, solve

_SOLVER_NAMES = {"omp": "omp", "sl1gd": "smooth_l1_gd", "pnormgd": "pnorm_gd"}


def _err(message: str) -> None:
    print(f"error: {message}", file=sys.stderr)


def _out_dir(path_str: str) -> Path:
    out = Path(path_str)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _echo_config(out: Path, config: dict) -> None:
    text = json.dumps(config, indent=2, sort_keys=True)
    print(text)
    save_json(out / "config_echo.json", config)


def _basis_from_meta(meta: dict) -> Basis:
    known = {"kind", "n", "seed"}
    unknown = set(meta) - known
    if unknown:
        raise ValueError(f"unknown basis fields: {sorted(unknown)}")
    return make_basis(meta["kind"], meta["n"], meta.get("seed", 0))


def cmd_generate(args) -> int:
    profile = SparsityProfile(
        k=args.k,
        amplitude_range=(args.amp_low, args.amp_high),
        sign_symmetric=args.signs == "symmetric",
    )
    basis = make_basis(args.basis, args.n, args.basis_seed)
    alpha = sample_sparse_coefficients(profile, args.n, args.seed)
    f = synthesize(basis, alpha)

    out = _out_dir(args.out)
    save_vector_csv(out / "signal.csv", f)
    truth = {
        "n": args.n,
        "k": args.k,
        "seed": args.seed,
        "alpha": alpha.tolist(),
        "support": support(alpha).tolist(),
        "basis": basis.describe(),
        "amplitude_range": [args.amp_low, args.amp_high],
        "sign_symmetric": args.signs == "symmetric",
    }
    save_json(out / "truth.json", truth)
    _echo_config(
        out,
        {
            "command": "generate",
            "n": args.n,
            "k": args.k,
            "basis": args.basis,
            "basis_seed": args.basis_seed,
            "seed": args.seed,
            "amplitude_range": [args.amp_low, args.amp_high],
            "signs": args.signs,
        },
    )
    return 0


def _load_signal(in_dir: Path) -> tuple[np.ndarray, dict]:
    f = load_vector_csv(in_dir / "signal.csv")
    truth = load_json(in_dir / "truth.json")
    return f, truth


def cmd_acquire(args) -> int:
    in_dir = Path(args.input)
    f, truth = _load_signal(in_dir)
    basis = _basis_from_meta(truth["basis"])
    n = basis.n
    if f.shape[0] != n:
        raise ValueError(f"signal length {f.shape[0]} does not match basis n={n}")

    out = _out_dir(args.out)
    noise = {"noise_sigma": args.noise_sigma, "noise_seed": args.noise_seed}
    echo = {
        "command": "acquire",
        "mode": args.mode,
        **noise,
    }

    if args.mode == "discrete":
        if args.l is None:
            raise ValueError("--l is required for --mode discrete")
        op = make_measurement_matrix(args.matrix, args.l, n, args.seed)
        record = measure(op, f, args.noise_sigma, args.noise_seed,
                         basis_meta=basis.describe())
        y = record.y
        design = compose(op, basis)
        matrix = design.matrix
        op_meta = {
            "mode": "discrete",
            "matrix_kind": args.matrix,
            "seed": op.seed,
            "l": op.l,
            "n": n,
            "basis": basis.describe(),
            **noise,
        }
        echo.update({"l": args.l, "matrix": args.matrix, "seed": args.seed})
    elif args.mode == "serial":
        if args.m is None:
            raise ValueError("--m is required for --mode serial")
        config = DemodConfig(n=n, m=args.m, chip_seed=args.seed)
        v = build_v_matrix(basis, config)
        y = acquire_serial(f, config)
        if args.noise_sigma > 0.0:
            rng = np.random.default_rng(args.noise_seed)
            y = y + rng.normal(0.0, args.noise_sigma, y.shape[0])
        matrix = v.matrix
        op_meta = {
            "mode": "serial",
            "demod": config.describe(),
            "l": config.l,
            "n": n,
            "basis": basis.describe(),
            **noise,
        }
        echo.update({"m": args.m, "seed": args.seed})
    else:
        if args.segments is None or args.fingers is None:
            raise ValueError("--segments and --fingers are required for --mode pscs")
        total = n + (args.segments - 1) * args.overlap
        if total % args.segments != 0:
            raise ValueError(
                f"cannot tile {n} samples with {args.segments} segments "
                f"and overlap {args.overlap}"
            )
        plan = WindowPlan(
            num_segments=args.segments,
            segment_len=total // args.segments,
            overlap=args.overlap,
            window_kind=args.window,
        )
        bank = make_finger_bank(args.fingers, base_seed=args.seed)
        measurement = acquire_pscs(f, plan, bank)
        y = measurement.y_joint
        if args.noise_sigma > 0.0:
            rng = np.random.default_rng(args.noise_seed)
            y = y + rng.normal(0.0, args.noise_sigma, y.shape[0])
        op = build_pscs_matrix(basis, plan, bank)
        matrix = op.matrix
        save_pscs_csv(out / "measurements_by_finger.csv", measurement)
        op_meta = {
            "mode": "pscs",
            "plan": plan.describe(),
            "bank": bank.describe(),
            "l": op.l,
            "n": n,
            "basis": basis.describe(),
            **noise,
        }
        echo.update(
            {
                "segments": args.segments,
                "fingers": args.fingers,
                "overlap": args.overlap,
                "window": args.window,
                "seed": args.seed,
            }
        )

    save_vector_csv(out / "measurements.csv", y)
    save_matrix_csv(out / "operator.csv", matrix)
    save_json(out / "operator.json", op_meta)
    _echo_config(out, echo)
    return 0


def cmd_reconstruct(args) -> int:
    in_dir = Path(args.input)
    y = load_vector_csv(in_dir / "measurements.csv")
    matrix = load_matrix_csv(in_dir / "operator.csv")
    op_meta = load_json(in_dir / "operator.json")
    basis = _basis_from_meta(op_meta["basis"])

    kind = _SOLVER_NAMES[args.solver]
    config = SolverConfig(
        kind=kind,
        max_iters=args.kmax if kind == "omp" and args.kmax else args.max_iters,
        residual_tol=args.tol,
        epsilon=args.epsilon,
        p=args.p,
        lam=getattr(args, "lambda"),
        step_rule=args.step_rule,
        continuation=args.continuation,
    )
    if kind == "omp":
        k_max = min(config.max_iters, matrix.shape[0])
        result = omp(matrix, y, k_max=k_max, residual_tol=config.residual_tol)
    else:
        result = solve(matrix, y, config)
    xhat = basis.matrix @ result.alpha

    out = _out_dir(args.out)
    save_vector_csv(out / "alpha_star.csv", result.alpha)
    save_vector_csv(out / "xhat.csv", xhat)
    save_trace_csv(out / "trace.csv", result)

    metrics = {
        "solver": kind,
        "converged": result.converged,
        "iterations": result.iterations,
        "residual_norm": result.residual_norm,
    }
    if args.truth is not None:
        truth = load_json(Path(args.truth))
        alpha_true = np.asarray(truth["alpha"], dtype=np.float64)
        metrics.update(score(alpha_true, result, basis).to_dict())
    save_json(out / "metrics.json", metrics)
    _echo_config(
        out,
        {
            "command": "reconstruct",
            "solver": args.solver,
            **config.to_dict(),
        },
    )
    return 0


def _load_config(path_str: str, expected_mode: str) -> dict:
    raw = Path(path_str).read_text()
    config = json.loads(raw)
    if not isinstance(config, dict):
        raise ValueError("config must be a JSON object")
    mode = config.pop("mode", None)
    if mode != expected_mode:
        raise ValueError(f"config mode must be {expected_mode!r}, got {mode!r}")
    return config


def cmd_sweep(args) -> int:
    config = _load_config(args.config, "sweep")
    spec = SweepSpec.from_dict(config)
    from .evaluation import run_sweep

    rows = run_sweep(spec)
    out = _out_dir(args.out)
    save_sweep_csv(out / "sweep.csv", rows)
    # The echo is itself a valid --config document.
    _echo_config(out, {"mode": "sweep", **spec.to_dict()})
    return 0


def cmd_energy(args) -> int:
    config = _load_config(args.config, "energy")
    alt_current = config.pop("alt_current_ma", None)
    n = config.pop("n", None)
    l = config.pop("l", None)
    if n is None or l is None:
        raise ValueError("energy config requires n and l")
    model = EnergyModel.from_dict(config)
    report = rate_reduction_report(int(n), int(l), model).to_dict()
    if alt_current is not None:
        alt_current = float(alt_current)
        if not alt_current > 0.0:
            raise ValueError("alt_current_ma must be strictly positive")
        report["alt_current_ma"] = alt_current
        # Same airtime on both settings, so energies scale with current.
        report["energy_ratio_vs_alt"] = model.current_ma / alt_current
    out = _out_dir(args.out)
    save_json(out / "energy.json", report)
    echo = {"mode": "energy", "n": int(n), "l": int(l), **model.to_dict()}
    if alt_current is not None:
        echo["alt_current_ma"] = alt_current
    _echo_config(out, echo)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="subnyq",
        description="Sub-Nyquist compressive acquisition and sparse recovery",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="plant a sparse signal instance")
    g.add_argument("--n", type=int, required=True, help="ambient dimension")
    g.add_argument("--k", type=int, required=True, help="number of nonzeros")
    g.add_argument("--basis", default="identity",
                   choices=["identity", "dft_real", "random_orthonormal"])
    g.add_argument("--basis-seed", type=int, default=0)
    g.add_argument("--seed", type=int, default=0, help="coefficient draw seed")
    g.add_argument("--amp-low", type=float, default=1.0)
    g.add_argument("--amp-high", type=float, default=2.0)
    g.add_argument("--signs", default="symmetric", choices=["symmetric", "positive"])
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    a = sub.add_parser("acquire", help="measure a generated signal")
    a.add_argument("--mode", required=True, choices=["discrete", "serial", "pscs"])
    a.add_argument("--in", dest="input", required=True,
                   help="directory produced by generate")
    a.add_argument("--out", required=True)
    a.add_argument("--seed", type=int, default=0,
                   help="measurement matrix / chip seed")
    a.add_argument("--noise-sigma", type=float, default=0.0)
    a.add_argument("--noise-seed", type=int, default=0)
    a.add_argument("--l", type=int, help="measurement count (discrete mode)")
    a.add_argument("--matrix", default="gaussian", choices=["gaussian", "bernoulli"])
    a.add_argument("--m", type=int, help="decimation factor (serial mode)")
    a.add_argument("--segments", type=int, help="segment count (pscs mode)")
    a.add_argument("--fingers", type=int, help="fingers per segment (pscs mode)")
    a.add_argument("--overlap", type=int, default=0)
    a.add_argument("--window", default="rectangular",
                   choices=["rectangular", "triangular"])
    a.set_defaults(func=cmd_acquire)

    r = sub.add_parser("reconstruct", help="solve for sparse coefficients")
    r.add_argument("--in", dest="input", required=True,
                   help="directory produced by acquire")
    r.add_argument("--out", required=True)
    r.add_argument("--solver", required=True, choices=sorted(_SOLVER_NAMES))
    r.add_argument("--kmax", type=int, help="atom budget (omp)")
    r.add_argument("--max-iters", type=int, default=4000)
    r.add_argument("--tol", type=float, default=1e-6)
    r.add_argument("--epsilon", type=float, help="smoothing width (sl1gd)")
    r.add_argument("--p", type=float, default=1.1, help="penalty order (pnormgd)")
    r.add_argument("--lambda", type=float, default=None,
                   help="penalty weight (gradient solvers)")
    r.add_argument("--step-rule", default="backtracking",
                   choices=["fixed_lipschitz", "backtracking"])
    r.add_argument("--continuation", action="store_true",
                   help="3-stage epsilon schedule (sl1gd)")
    r.add_argument("--truth", help="truth.json for recovery metrics")
    r.set_defaults(func=cmd_reconstruct)

    s = sub.add_parser("sweep", help="run a (k, l) recovery sweep from a config")
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_sweep)

    e = sub.add_parser("energy", help="transmit-energy report from a config")
    e.add_argument("--config", required=True)
    e.add_argument("--out", required=True)
    e.set_defaults(func=cmd_energy)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except json.JSONDecodeError as exc:
        _err(f"invalid JSON: {exc.msg} at line {exc.lineno} column {exc.colno}")
        return 2
    except ValueError as exc:
        _err(str(exc))
        return 2
    except OSError as exc:
        _err(str(exc))
        return 1


if __name__ == "__main__":
    sys.exit(main())
