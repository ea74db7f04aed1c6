"""Serial random-demodulator pipeline on the Nyquist grid.

The input signal is multiplied by a +-1 chipping sequence (one chip per grid
sample), convolved with a low-pass filter, and sampled every ``m`` grid
points, producing ``l = n / m`` outputs. The equivalent linear operator
acting on basis coefficients (the demodulation matrix) is assembled column
by column by running each basis vector through the same pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from .sensing import MeasurementOperator
from .signals import Basis
from .validation import as_vector, check_positive_int, check_seed, readonly

if TYPE_CHECKING:
    from .solvers import ReconstructionResult, SolverConfig

FILTER_KINDS = ("integrate_and_dump", "fir")


@dataclass(frozen=True)
class ChippingSequence:
    """A +-1 pseudo-random sequence, one chip per Nyquist-grid sample."""

    chips: np.ndarray
    seed: int | None = None

    def __post_init__(self):
        if not np.all(np.abs(self.chips) == 1.0):
            raise ValueError("chips must all be +1 or -1")

    def __len__(self) -> int:
        return self.chips.shape[0]


def make_chips(n: int, seed: int = 0) -> ChippingSequence:
    """Seeded length-n +-1 chipping sequence."""
    check_positive_int(n, "n")
    check_seed(seed)
    rng = np.random.default_rng(seed)
    chips = (rng.integers(0, 2, n) * 2 - 1).astype(np.float64)
    return ChippingSequence(chips=readonly(chips), seed=int(seed))


@dataclass(frozen=True)
class DemodFilter:
    """Low-pass stage: block integration or an explicit FIR impulse response."""

    kind: str
    taps: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in FILTER_KINDS:
            raise ValueError(
                f"unknown filter kind {self.kind!r}, expected one of {FILTER_KINDS}"
            )
        if self.kind == "fir":
            if self.taps is None or self.taps.size == 0:
                raise ValueError("fir filter requires a nonempty taps vector")
            if not np.all(np.isfinite(self.taps)):
                raise ValueError("fir taps must be finite")

    @classmethod
    def integrate_and_dump(cls) -> "DemodFilter":
        return cls(kind="integrate_and_dump")

    @classmethod
    def fir(cls, taps) -> "DemodFilter":
        taps = np.asarray(taps, dtype=np.float64)
        return cls(kind="fir", taps=readonly(taps.copy()))

    def taps_for(self, block_len: int) -> np.ndarray:
        """Impulse response; integrate-and-dump is all-ones of the block length."""
        if self.kind == "integrate_and_dump":
            return np.ones(block_len)
        return self.taps

    def describe(self) -> dict:
        d = {"kind": self.kind}
        if self.kind == "fir":
            d["taps"] = self.taps.tolist()
        return d


@dataclass(frozen=True)
class DemodConfig:
    """Grid length, decimation factor, filter, and chip seed for one run.

    ``m`` counts grid samples per output sample, so the output length is
    ``l = n / m``; compression requires m >= 2 and m | n.
    """

    n: int
    m: int
    filter: DemodFilter = field(default_factory=DemodFilter.integrate_and_dump)
    chip_seed: int = 0

    def __post_init__(self):
        check_positive_int(self.n, "n")
        check_positive_int(self.m, "m")
        check_seed(self.chip_seed, "chip_seed")
        if self.m < 2:
            raise ValueError(f"decimation factor m must be >= 2, got {self.m}")
        if self.n % self.m != 0:
            raise ValueError(f"m={self.m} does not divide n={self.n}")

    @property
    def l(self) -> int:
        return self.n // self.m

    def describe(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "filter": self.filter.describe(),
            "chip_seed": self.chip_seed,
        }


@dataclass(frozen=True)
class VMatrix:
    """Equivalent matrix of the serial pipeline acting on basis coefficients.

    Column i is the pipeline output for basis vector psi_i, so
    ``matrix @ alpha`` reproduces ``acquire_serial(synthesize(basis, alpha))``.
    """

    matrix: np.ndarray
    config: DemodConfig
    basis: Basis

    @property
    def l(self) -> int:
        return self.config.l

    @property
    def n(self) -> int:
        return self.config.n

    @property
    def basis_meta(self) -> dict:
        return self.basis.describe()

    def to_operator(self) -> MeasurementOperator:
        return MeasurementOperator(
            matrix=self.matrix,
            kind="demodulator",
            l=self.l,
            n=self.n,
            seed=self.config.chip_seed,
            meta={"demod": self.config.describe(), "basis": self.basis_meta},
        )


def acquire_serial(
    x, config: DemodConfig, chips: ChippingSequence | None = None
) -> np.ndarray:
    """Run one signal through chip multiply, filter, and decimated sampling.

    The chip product is convolved with the filter taps (zero padding outside
    the grid) and sampled at the end of each length-m block, i.e. grid index
    (j + 1) * m - 1 for output j. With integrate-and-dump taps this reduces
    to signed block sums.
    """
    x = as_vector(x, config.n, "x")
    if chips is None:
        chips = make_chips(config.n, config.chip_seed)
    if len(chips) != config.n:
        raise ValueError(f"chips length {len(chips)} does not match n={config.n}")
    z = x * chips.chips
    conv = np.convolve(z, config.filter.taps_for(config.m))
    idx = np.arange(1, config.l + 1) * config.m - 1
    return conv[idx]


def build_v_matrix(
    basis: Basis, config: DemodConfig, chips: ChippingSequence | None = None
) -> VMatrix:
    """Assemble the pipeline's matrix by acquiring each basis vector."""
    if basis.n != config.n:
        raise ValueError(f"basis n={basis.n} does not match config n={config.n}")
    if chips is None:
        chips = make_chips(config.n, config.chip_seed)
    cols = [
        acquire_serial(basis.matrix[:, i], config, chips) for i in range(config.n)
    ]
    return VMatrix(matrix=readonly(np.column_stack(cols)), config=config, basis=basis)


def reconstruct_serial(
    y, v: VMatrix, config: "SolverConfig"
) -> tuple["ReconstructionResult", np.ndarray]:
    """Solve for coefficients from demodulator measurements, then synthesize.

    Returns the full solver result (diagnostics included; non-convergence is
    reported through ``result.converged``, never silently) and the
    reconstructed time-domain signal.
    """
    from .solvers import solve

    y = as_vector(y, v.l, "y")
    result = solve(v.matrix, y, config)
    xhat = v.basis.matrix @ result.alpha
    return result, xhat
