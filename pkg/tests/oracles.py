"""Independent oracles the tests check the library against.

These deliberately avoid the library's solver code paths: support search is
exhaustive enumeration with dense least squares, and gradients come from
central finite differences.
"""

import itertools

import numpy as np


def best_support_exhaustive(A, y, k):
    """Support of size k minimizing the least-squares residual, by brute
    force over all combinations; ties resolve to the lexicographically
    first support."""
    best, best_res = None, np.inf
    for s in itertools.combinations(range(A.shape[1]), k):
        sub = A[:, list(s)]
        coef, *_ = np.linalg.lstsq(sub, y, rcond=None)
        r = float(np.linalg.norm(y - sub @ coef))
        if r < best_res - 1e-12:
            best, best_res = s, r
    return set(best)


def central_difference_gradient(fun, x, h=1e-6):
    """Componentwise central finite differences of a scalar function."""
    x = np.asarray(x, dtype=np.float64)
    grad = np.zeros_like(x)
    for i in range(x.shape[0]):
        xp = x.copy()
        xm = x.copy()
        xp[i] += h
        xm[i] -= h
        grad[i] = (fun(xp) - fun(xm)) / (2.0 * h)
    return grad
