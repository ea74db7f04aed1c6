"""Parallel segmented acquisition: windowed segments measured by finger banks.

The signal is cut into ``num_segments`` (possibly overlapping) windowed
segments; each segment feeds ``fingers_per_segment`` parallel branches, and
every branch multiplies by the time-aligned slice of its own full-grid chip
sequence and integrates to a single scalar. The joint measurement vector is
laid out segment-major:
``y[m * F + f]`` is segment m on finger f. Because one segment alone carries
incomplete information, reconstruction uses the joint matrix over all
segments and fingers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .demodulator import DemodFilter, make_chips
from .sensing import MeasurementOperator
from .signals import Basis
from .validation import as_vector, check_positive_int, check_seed, readonly

WINDOW_KINDS = ("rectangular", "triangular")


@dataclass(frozen=True)
class WindowPlan:
    """Segmentation geometry: how many segments, their length, and overlap.

    The plan tiles a signal of length
    ``(num_segments - 1) * (segment_len - overlap) + segment_len`` exactly.
    """

    num_segments: int
    segment_len: int
    overlap: int = 0
    window_kind: str = "rectangular"

    def __post_init__(self):
        check_positive_int(self.num_segments, "num_segments")
        check_positive_int(self.segment_len, "segment_len")
        if not 0 <= self.overlap < self.segment_len:
            raise ValueError(
                f"overlap must satisfy 0 <= overlap < segment_len, got "
                f"overlap={self.overlap}, segment_len={self.segment_len}"
            )
        if self.window_kind not in WINDOW_KINDS:
            raise ValueError(
                f"unknown window kind {self.window_kind!r}, "
                f"expected one of {WINDOW_KINDS}"
            )

    @property
    def stride(self) -> int:
        return self.segment_len - self.overlap

    @property
    def n(self) -> int:
        """Signal length this plan tiles exactly."""
        return (self.num_segments - 1) * self.stride + self.segment_len

    def window_taps(self) -> np.ndarray:
        if self.window_kind == "rectangular":
            return np.ones(self.segment_len)
        return _triangular(self.segment_len)

    def describe(self) -> dict:
        return {
            "num_segments": self.num_segments,
            "segment_len": self.segment_len,
            "overlap": self.overlap,
            "window_kind": self.window_kind,
        }


def _triangular(length: int) -> np.ndarray:
    """Symmetric triangular window with nonzero endpoints."""
    k = np.minimum(np.arange(1, length + 1), np.arange(length, 0, -1))
    if length % 2 == 0:
        return (2.0 * k - 1.0) / length
    return 2.0 * k / (length + 1)


@dataclass(frozen=True)
class FingerBank:
    """Parallel branches measuring every segment; one chip seed per finger.

    Each finger's pseudo-random generator free-runs over the whole grid, so
    segment m on finger f sees the slice of finger f's full-length chip
    sequence that overlaps the segment's time support (the chips are a
    function of absolute time, as for a hardware PN generator).
    """

    chip_seeds: tuple[int, ...]
    filter: DemodFilter = field(default_factory=DemodFilter.integrate_and_dump)

    def __post_init__(self):
        if len(self.chip_seeds) == 0:
            raise ValueError("finger bank needs at least one chip seed")
        for s in self.chip_seeds:
            check_seed(s, "chip_seed")
        if len(set(self.chip_seeds)) != len(self.chip_seeds):
            raise ValueError("chip_seeds must be pairwise distinct")

    @property
    def fingers_per_segment(self) -> int:
        return len(self.chip_seeds)

    def chip_matrix(self, n: int) -> np.ndarray:
        """Full-grid chip sequences, one row per finger."""
        return np.vstack([make_chips(n, s).chips for s in self.chip_seeds])

    def describe(self) -> dict:
        return {
            "chip_seeds": list(self.chip_seeds),
            "filter": self.filter.describe(),
        }


def make_finger_bank(
    fingers: int, base_seed: int = 0, filter: DemodFilter | None = None
) -> FingerBank:
    """Bank of ``fingers`` branches with consecutive distinct chip seeds."""
    check_positive_int(fingers, "fingers")
    check_seed(base_seed, "base_seed")
    seeds = tuple(base_seed + i for i in range(fingers))
    if filter is None:
        filter = DemodFilter.integrate_and_dump()
    return FingerBank(chip_seeds=seeds, filter=filter)


@dataclass(frozen=True)
class PscsMeasurement:
    """Joint measurement vector in segment-major order, plus its provenance."""

    y_joint: np.ndarray
    plan: WindowPlan
    bank: FingerBank

    def __post_init__(self):
        expected = self.plan.num_segments * self.bank.fingers_per_segment
        if self.y_joint.shape != (expected,):
            raise ValueError(
                f"y_joint has length {self.y_joint.shape[0]}, expected {expected}"
            )

    def as_grid(self) -> np.ndarray:
        """(num_segments, fingers_per_segment) view of the joint vector."""
        return self.y_joint.reshape(
            self.plan.num_segments, self.bank.fingers_per_segment
        )


def window_signal(x, plan: WindowPlan) -> list[np.ndarray]:
    """Cut the signal into windowed segments per the plan."""
    x = as_vector(x, name="x")
    if x.shape[0] != plan.n:
        raise ValueError(
            f"plan tiles length {plan.n}, but signal has length {x.shape[0]}"
        )
    taps = plan.window_taps()
    return [
        x[m * plan.stride : m * plan.stride + plan.segment_len] * taps
        for m in range(plan.num_segments)
    ]


def _finger_outputs(segment: np.ndarray, chip_mat: np.ndarray, filt: DemodFilter):
    """One scalar per finger: chip multiply then integrate over the segment."""
    if filt.kind == "integrate_and_dump":
        return chip_mat @ segment
    taps = filt.taps_for(segment.shape[0])
    end = segment.shape[0] - 1
    return np.array(
        [np.convolve(segment * chips, taps)[end] for chips in chip_mat]
    )


def acquire_pscs(x, plan: WindowPlan, bank: FingerBank) -> PscsMeasurement:
    """Measure every (segment, finger) pair; assemble segment-major."""
    segments = window_signal(x, plan)
    chips_full = bank.chip_matrix(plan.n)
    outputs = []
    for m, seg in enumerate(segments):
        start = m * plan.stride
        chip_block = chips_full[:, start : start + plan.segment_len]
        outputs.append(_finger_outputs(seg, chip_block, bank.filter))
    return PscsMeasurement(y_joint=readonly(np.concatenate(outputs)), plan=plan, bank=bank)


def build_pscs_matrix(
    basis: Basis, plan: WindowPlan, bank: FingerBank
) -> MeasurementOperator:
    """Joint reconstruction matrix: column i is acquire_pscs of basis vector i."""
    if basis.n != plan.n:
        raise ValueError(f"basis n={basis.n} does not match plan length {plan.n}")
    l = plan.num_segments * bank.fingers_per_segment
    if not l < basis.n:
        raise ValueError(
            f"segments*fingers={l} must stay below n={basis.n} for compression"
        )
    cols = [
        acquire_pscs(basis.matrix[:, i], plan, bank).y_joint for i in range(basis.n)
    ]
    return MeasurementOperator(
        matrix=readonly(np.column_stack(cols)),
        kind="pscs",
        l=l,
        n=basis.n,
        seed=bank.chip_seeds[0],
        meta={"plan": plan.describe(), "bank": bank.describe(), "basis": basis.describe()},
    )
