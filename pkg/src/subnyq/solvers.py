"""Sparse reconstruction solvers.

Three routes to a sparse coefficient vector from y = A alpha:

* ``omp`` — greedy orthogonal matching pursuit with active-set least squares.
* ``smooth_l1_gd`` — gradient descent on a smooth convex surrogate of the
  one-norm, sum(sqrt(a_i^2 + eps^2) - eps), penalized data fit.
* ``pnorm_gd`` — gradient descent with penalty sum(|a_i|^p) for p in
  (1, 1.5]; p <= 1 is rejected because the penalty stops being convex there.

The equality-constrained programs are relaxed to the penalized form
F(a) = 0.5 ||A a - y||^2 + lam * penalty(a), minimized from a = 0 either
with a fixed 1/L step (L = sigma_max(A)^2 + lam * curvature bound) or with
Armijo backtracking (factor 0.5, sufficient decrease 1e-4).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .validation import as_design_matrix, as_vector, check_positive, check_positive_int

SOLVER_KINDS = ("omp", "smooth_l1_gd", "pnorm_gd")
STEP_RULES = ("fixed_lipschitz", "backtracking")

_LSTSQ_RCOND = 1e-12
_ARMIJO_C = 1e-4
_ARMIJO_FACTOR = 0.5
_MAX_HALVINGS = 60
# Curvature cap used only to size the fixed step for the p-norm penalty,
# whose second derivative is unbounded at 0; backtracking needs no bound.
_PNORM_CURVATURE_FLOOR = 1e-3


def _check_p(p: float) -> float:
    p = float(p)
    if not p > 1.0:
        raise ValueError(f"p must exceed 1 (the penalty is not convex below), got {p}")
    if p > 1.5:
        raise ValueError(f"p must be at most 1.5 to keep the penalty sparsifying, got {p}")
    return p


@dataclass
class SolverConfig:
    """Solver choice plus its knobs; JSON-round-trippable.

    ``lam`` and ``epsilon`` default to 1e-3 * max|A^T y| when left as None.
    For OMP, ``max_iters`` caps the number of atoms; for the gradient
    solvers it caps iterations per continuation stage. ``continuation``
    enables the 3-stage epsilon -> epsilon/10 -> epsilon/100 schedule of
    the smoothed one-norm solver (ignored by the others).
    """

    kind: str = "omp"
    max_iters: int = 4000
    residual_tol: float = 1e-6
    epsilon: float | None = None
    p: float = 1.1
    lam: float | None = None
    step_rule: str = "backtracking"
    continuation: bool = False

    def __post_init__(self):
        if self.kind not in SOLVER_KINDS:
            raise ValueError(
                f"unknown solver kind {self.kind!r}, expected one of {SOLVER_KINDS}"
            )
        check_positive_int(self.max_iters, "max_iters")
        check_positive(self.residual_tol, "residual_tol")
        if self.step_rule not in STEP_RULES:
            raise ValueError(
                f"unknown step rule {self.step_rule!r}, expected one of {STEP_RULES}"
            )
        if self.epsilon is not None:
            check_positive(self.epsilon, "epsilon")
        if self.lam is not None:
            check_positive(self.lam, "lam")
        if self.kind == "pnorm_gd":
            _check_p(self.p)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "max_iters": self.max_iters,
            "residual_tol": self.residual_tol,
            "epsilon": self.epsilon,
            "p": self.p,
            "lambda": self.lam,
            "step_rule": self.step_rule,
            "continuation": self.continuation,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SolverConfig":
        d = dict(d)
        if "lambda" in d:
            d["lam"] = d.pop("lambda")
        known = {
            "kind", "max_iters", "residual_tol", "epsilon", "p", "lam",
            "step_rule", "continuation",
        }
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown solver config fields: {sorted(unknown)}")
        return cls(**d)


@dataclass
class ReconstructionResult:
    """Recovered coefficients plus solver diagnostics.

    ``objective_trace`` holds the objective per iteration for the gradient
    solvers and the residual norm per iteration for OMP;
    ``residual_trace`` holds ||A alpha - y|| at the same points.
    """

    alpha: np.ndarray
    residual_norm: float
    iterations: int
    converged: bool
    objective_trace: np.ndarray = field(default_factory=lambda: np.zeros(0))
    residual_trace: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def trace_rows(self):
        """(iteration, objective, residual) rows for CSV export."""
        for i, (obj, res) in enumerate(zip(self.objective_trace, self.residual_trace)):
            yield i, float(obj), float(res)


def omp(a, y, k_max: int | None = None, residual_tol: float = 1e-6) -> ReconstructionResult:
    """Orthogonal matching pursuit.

    Repeatedly selects the column with the largest absolute correlation
    against the residual -- inner products are normalized by column norm so
    selection is scale-invariant, the standard formulation for dictionaries
    whose atoms are not exactly unit norm; ties break to the lowest index.
    Each round refits by least squares on the active set and stops once the
    residual norm drops to ``residual_tol`` or ``k_max`` atoms are in play.
    A rank-deficient active-set least-squares problem aborts the loop and
    returns the best solution so far with ``converged=False``.
    """
    A = as_design_matrix(a)
    l, n = A.shape
    y = as_vector(y, l, "y")
    check_positive(residual_tol, "residual_tol")
    if k_max is None:
        k_max = l
    k_max = int(k_max)
    if not 1 <= k_max <= l:
        raise ValueError(f"k_max must be in [1, {l}], got {k_max}")

    col_norms = np.linalg.norm(A, axis=0)
    col_norms[col_norms == 0.0] = 1.0

    alpha = np.zeros(n)
    residual = y.copy()
    res_norm = float(np.linalg.norm(residual))
    trace = [res_norm]
    active: list[int] = []
    converged = res_norm <= residual_tol

    while not converged and len(active) < k_max:
        corr = (A.T @ residual) / col_norms
        if active:
            corr[active] = 0.0
        j = int(np.argmax(np.abs(corr)))
        active.append(j)
        sub = A[:, active]
        coef, _, rank, _ = np.linalg.lstsq(sub, y, rcond=_LSTSQ_RCOND)
        if rank < len(active):
            # Degenerate active set: keep the previous iterate.
            active.pop()
            break
        alpha = np.zeros(n)
        alpha[active] = coef
        residual = y - sub @ coef
        res_norm = float(np.linalg.norm(residual))
        trace.append(res_norm)
        converged = res_norm <= residual_tol

    trace_arr = np.asarray(trace)
    return ReconstructionResult(
        alpha=alpha,
        residual_norm=res_norm,
        iterations=len(active),
        converged=converged,
        objective_trace=trace_arr,
        residual_trace=trace_arr.copy(),
    )


def smooth_l1(x, epsilon: float) -> float:
    """Smooth convex surrogate of the one-norm: sum(sqrt(x^2 + eps^2) - eps).

    Satisfies 0 <= ||x||_1 - smooth_l1(x, eps) <= len(x) * eps, and equals 0
    at x = 0 thanks to the -eps offset.
    """
    check_positive(epsilon, "epsilon")
    x = np.asarray(x, dtype=np.float64)
    return float(np.sum(np.hypot(x, epsilon) - epsilon))


def smooth_l1_grad(x, epsilon: float) -> np.ndarray:
    """Gradient of :func:`smooth_l1`; every component lies in (-1, 1)."""
    check_positive(epsilon, "epsilon")
    x = np.asarray(x, dtype=np.float64)
    return x / np.hypot(x, epsilon)


def pnorm_penalty(x, p: float) -> float:
    """sum(|x_i|^p) for 1 < p <= 1.5; convex and differentiable."""
    p = _check_p(p)
    x = np.asarray(x, dtype=np.float64)
    return float(np.sum(np.abs(x) ** p))


def pnorm_penalty_grad(x, p: float) -> np.ndarray:
    """Gradient p * |x|^(p-1) * sign(x); continuous at 0 for p > 1."""
    p = _check_p(p)
    x = np.asarray(x, dtype=np.float64)
    return p * np.abs(x) ** (p - 1.0) * np.sign(x)


def _descend(A, y, alpha, lam, penalty, penalty_grad, lipschitz, config):
    """One gradient-descent run; returns (alpha, obj_trace, res_trace, converged)."""
    gtol = config.residual_tol * (1.0 + float(np.linalg.norm(y)))
    fixed = config.step_rule == "fixed_lipschitz"

    def objective(r, a):
        return 0.5 * float(r @ r) + lam * penalty(a)

    residual = A @ alpha - y
    obj = objective(residual, alpha)
    obj_trace = [obj]
    res_trace = [float(np.linalg.norm(residual))]
    converged = False
    t = 1.0 / lipschitz

    for _ in range(config.max_iters):
        grad = A.T @ residual + lam * penalty_grad(alpha)
        gnorm = float(np.linalg.norm(grad))
        if gnorm <= gtol:
            converged = True
            break
        if fixed:
            alpha = alpha - grad / lipschitz
            residual = A @ alpha - y
            obj = objective(residual, alpha)
        else:
            t = 2.0 * t
            gsq = gnorm * gnorm
            accepted = False
            for _ in range(_MAX_HALVINGS):
                cand = alpha - t * grad
                r_cand = A @ cand - y
                obj_cand = objective(r_cand, cand)
                if obj_cand <= obj - _ARMIJO_C * t * gsq:
                    accepted = True
                    break
                t *= _ARMIJO_FACTOR
            if not accepted:
                # No decreasing step exists at floating-point resolution.
                break
            alpha, residual, obj = cand, r_cand, obj_cand
        obj_trace.append(obj)
        res_trace.append(float(np.linalg.norm(residual)))

    return alpha, obj_trace, res_trace, converged


def _auto_scale(A, y) -> float:
    """max|A^T y|, the scale the default lam and epsilon hang off."""
    return float(np.max(np.abs(A.T @ y))) if y.size else 0.0


def _zero_result(n: int, y) -> ReconstructionResult:
    res = float(np.linalg.norm(y))
    return ReconstructionResult(
        alpha=np.zeros(n),
        residual_norm=res,
        iterations=0,
        converged=True,
        objective_trace=np.array([0.5 * res * res]),
        residual_trace=np.array([res]),
    )


def smooth_l1_gd(a, y, config: SolverConfig) -> ReconstructionResult:
    """Gradient descent on 0.5||A a - y||^2 + lam * smooth_l1(a, eps).

    With ``config.continuation`` the smoothing width runs through
    eps, eps/10, eps/100, each stage restarting from the previous solution
    (the first stage starts from zero). The concatenated objective trace is
    non-increasing within each stage; it may step up at a stage boundary
    because the tightened epsilon redefines the objective.
    """
    if config.kind != "smooth_l1_gd":
        raise ValueError(f"config.kind is {config.kind!r}, expected 'smooth_l1_gd'")
    A = as_design_matrix(a)
    l, n = A.shape
    y = as_vector(y, l, "y")

    scale = _auto_scale(A, y)
    if scale == 0.0:
        # A^T y = 0 means alpha = 0 already minimizes the objective.
        return _zero_result(n, y)
    lam = config.lam if config.lam is not None else 1e-3 * scale
    eps0 = config.epsilon if config.epsilon is not None else 1e-3 * scale
    stages = [eps0, eps0 / 10.0, eps0 / 100.0] if config.continuation else [eps0]

    sigma_sq = float(np.linalg.norm(A, 2)) ** 2
    alpha = np.zeros(n)
    obj_trace: list[float] = []
    res_trace: list[float] = []
    iterations = 0
    converged = False
    for eps in stages:
        lipschitz = sigma_sq + lam / eps
        alpha, ot, rt, converged = _descend(
            A, y, alpha,
            lam,
            lambda v, e=eps: smooth_l1(v, e),
            lambda v, e=eps: smooth_l1_grad(v, e),
            lipschitz,
            config,
        )
        iterations += len(ot) - 1
        obj_trace.extend(ot)
        res_trace.extend(rt)

    return ReconstructionResult(
        alpha=alpha,
        residual_norm=float(np.linalg.norm(A @ alpha - y)),
        iterations=iterations,
        converged=converged,
        objective_trace=np.asarray(obj_trace),
        residual_trace=np.asarray(res_trace),
    )


def pnorm_gd(a, y, config: SolverConfig) -> ReconstructionResult:
    """Gradient descent on 0.5||A a - y||^2 + lam * sum(|a_i|^p), 1 < p <= 1.5.

    The penalty's curvature is unbounded near 0, so the fixed step uses a
    capped curvature estimate; backtracking (the default) is exact.
    """
    if config.kind != "pnorm_gd":
        raise ValueError(f"config.kind is {config.kind!r}, expected 'pnorm_gd'")
    p = _check_p(config.p)
    A = as_design_matrix(a)
    l, n = A.shape
    y = as_vector(y, l, "y")

    scale = _auto_scale(A, y)
    if scale == 0.0:
        return _zero_result(n, y)
    lam = config.lam if config.lam is not None else 1e-3 * scale

    sigma_sq = float(np.linalg.norm(A, 2)) ** 2
    curvature = p * (p - 1.0) * _PNORM_CURVATURE_FLOOR ** (p - 2.0)
    alpha, obj_trace, res_trace, converged = _descend(
        A, y, np.zeros(n),
        lam,
        lambda v: pnorm_penalty(v, p),
        lambda v: pnorm_penalty_grad(v, p),
        sigma_sq + lam * curvature,
        config,
    )
    return ReconstructionResult(
        alpha=alpha,
        residual_norm=float(np.linalg.norm(A @ alpha - y)),
        iterations=len(obj_trace) - 1,
        converged=converged,
        objective_trace=np.asarray(obj_trace),
        residual_trace=np.asarray(res_trace),
    )


def solve(a, y, config: SolverConfig) -> ReconstructionResult:
    """Dispatch on ``config.kind``; the uniform entry point for pipelines."""
    if config.kind == "omp":
        A = as_design_matrix(a)
        k_max = min(config.max_iters, A.shape[0])
        return omp(A, y, k_max=k_max, residual_tol=config.residual_tol)
    if config.kind == "smooth_l1_gd":
        return smooth_l1_gd(a, y, config)
    return pnorm_gd(a, y, config)
