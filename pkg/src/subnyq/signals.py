"""Sparse signal models: orthonormal bases and seeded sparse test instances.

A signal ``f`` of length ``n`` is represented by its coefficient vector
``alpha`` under an orthonormal basis, ``f = basis.matrix @ alpha``.  All
randomness comes from numpy's PCG64 generator seeded explicitly, so the same
(kind, n, seed) arguments reproduce bit-identical output on every platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .validation import as_vector, check_positive_int, check_seed, readonly

BASIS_KINDS = ("identity", "dft_real", "random_orthonormal")


@dataclass(frozen=True)
class Basis:
    """Orthonormal n-by-n synthesis basis; columns are the basis vectors."""

    matrix: np.ndarray
    kind: str
    n: int
    seed: int

    def describe(self) -> dict:
        """Metadata sufficient to rebuild this basis deterministically."""
        return {"kind": self.kind, "n": self.n, "seed": self.seed}


@dataclass(frozen=True)
class SparsityProfile:
    """How to plant nonzeros: count, magnitude range, and sign convention.

    Magnitudes are drawn uniformly from ``amplitude_range``; when
    ``sign_symmetric`` each nonzero gets an independent random sign.
    """

    k: int
    amplitude_range: tuple[float, float] = (1.0, 2.0)
    sign_symmetric: bool = True

    def __post_init__(self):
        check_positive_int(self.k, "k")
        low, high = self.amplitude_range
        if not (0.0 <= low <= high) or high == 0.0:
            raise ValueError(
                f"amplitude_range must satisfy 0 <= low <= high with high > 0, "
                f"got ({low}, {high})"
            )


def _dft_real_matrix(n: int) -> np.ndarray:
    """Real orthonormal frequency basis: DC, cos/sin pairs, Nyquist column."""
    t = np.arange(n)
    cols = [np.full(n, 1.0 / math.sqrt(n))]
    for k in range(1, (n + 1) // 2):
        w = 2.0 * np.pi * k * t / n
        cols.append(math.sqrt(2.0 / n) * np.cos(w))
        cols.append(math.sqrt(2.0 / n) * np.sin(w))
    if n % 2 == 0:
        cols.append(np.where(t % 2 == 0, 1.0, -1.0) / math.sqrt(n))
    return np.column_stack(cols)


def make_basis(kind: str, n: int, seed: int = 0) -> Basis:
    """Build an orthonormal basis of the requested kind.

    Parameters
    ----------
    kind : str
        One of ``identity``, ``dft_real`` (real cosine/sine frequency
        basis, the natural home of multitone signals), or
        ``random_orthonormal`` (orthonormalized seeded Gaussian matrix).
    n : int
        Ambient dimension, at least 1.
    seed : int
        Consumed only by ``random_orthonormal``; recorded for provenance
        in all cases.
    """
    check_positive_int(n, "n")
    check_seed(seed)
    if kind == "identity":
        m = np.eye(n)
    elif kind == "dft_real":
        m = _dft_real_matrix(n)
    elif kind == "random_orthonormal":
        rng = np.random.default_rng(seed)
        q, r = np.linalg.qr(rng.standard_normal((n, n)))
        # Sign-fix so the factorization (and thus the basis) is unique.
        signs = np.sign(np.diag(r))
        signs[signs == 0.0] = 1.0
        m = q * signs
    else:
        raise ValueError(f"unknown basis kind {kind!r}, expected one of {BASIS_KINDS}")
    return Basis(matrix=readonly(m), kind=kind, n=n, seed=int(seed))


def sample_sparse_coefficients(
    profile: SparsityProfile, n: int, seed: int = 0
) -> np.ndarray:
    """Draw a length-n coefficient vector with exactly ``profile.k`` nonzeros.

    Support indices are uniform without replacement; magnitudes are uniform
    over the profile's amplitude range. Deterministic per seed.
    """
    check_positive_int(n, "n")
    check_seed(seed)
    if profile.k > n:
        raise ValueError(f"k exceeds n: k={profile.k}, n={n}")
    rng = np.random.default_rng(seed)
    support = np.sort(rng.choice(n, size=profile.k, replace=False))
    low, high = profile.amplitude_range
    mags = rng.uniform(low, high, profile.k)
    # A uniform draw can land exactly on a zero endpoint; redraw those so
    # the vector really has k nonzeros.
    zero = mags == 0.0
    while zero.any():
        mags[zero] = rng.uniform(low, high, int(zero.sum()))
        zero = mags == 0.0
    if profile.sign_symmetric:
        mags = mags * (rng.integers(0, 2, profile.k) * 2 - 1)
    alpha = np.zeros(n)
    alpha[support] = mags
    return alpha


def synthesize(basis: Basis, alpha) -> np.ndarray:
    """Time-domain samples of the signal with coefficients ``alpha``."""
    alpha = as_vector(alpha, basis.n, "alpha")
    return basis.matrix @ alpha


def analyze(basis: Basis, samples) -> np.ndarray:
    """Coefficients of ``samples`` under the (orthonormal) basis."""
    samples = as_vector(samples, basis.n, "samples")
    return basis.matrix.T @ samples


def support(alpha) -> np.ndarray:
    """Indices of the nonzero entries."""
    return np.flatnonzero(np.asarray(alpha))


def sparsity(alpha) -> int:
    """Number of nonzero entries."""
    return int(np.count_nonzero(np.asarray(alpha)))
