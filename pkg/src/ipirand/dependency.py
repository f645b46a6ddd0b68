"""Cross-subject dependency via plug-in mutual information.

``e_indp = H(X) + H(Y) - H(X, Y)`` where X and Y are time-aligned n-bit
blocks of two bitstreams. Blocks are read once from offset 0 (no
circulation) so block ``i`` of one stream is paired with block ``i`` of the
other, and the marginals come from those same pairs.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .bitstream import BitStream, _check_n, block_codes, concat_series
from .errors import PreconditionError
from .ingest import IpiSeries

DEFAULT_MIN_LENGTH = 100_000


@dataclass(frozen=True, eq=False)
class JointCounts:
    """Sparse joint histogram of paired ``n``-bit blocks.

    ``x_codes[i], y_codes[i]`` is the i-th occupied cell, ordered by
    ``(x, y)``; ``counts[i]`` its count.
    """

    n: int
    x_codes: np.ndarray
    y_codes: np.ndarray
    counts: np.ndarray

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def dense(self) -> np.ndarray:
        if self.n > 8:
            raise PreconditionError("too large: dense joint table only for n <= 8")
        size = 1 << self.n
        table = np.zeros((size, size), dtype=np.int64)
        table[self.x_codes, self.y_codes] = self.counts
        return table

    def x_marginal(self) -> np.ndarray:
        return np.bincount(self.x_codes, weights=self.counts, minlength=1 << self.n).astype(np.int64)

    def y_marginal(self) -> np.ndarray:
        return np.bincount(self.y_codes, weights=self.counts, minlength=1 << self.n).astype(np.int64)


def _paired_codes(x: BitStream, y: BitStream, n: int) -> tuple[np.ndarray, np.ndarray]:
    _check_n(n)
    if x.length < n or y.length < n:
        raise PreconditionError(f"too short: both streams need at least n={n} bits")
    trunc = n * (min(x.length, y.length) // n)
    return block_codes(x.bits[:trunc], n), block_codes(y.bits[:trunc], n)


def joint_distribution(x: BitStream, y: BitStream, n: int) -> JointCounts:
    a, b = _paired_codes(x, y, n)
    cells, counts = np.unique((a << n) | b, return_counts=True)
    mask = (1 << n) - 1
    return JointCounts(n, cells >> n, cells & mask, counts.astype(np.int64))


def _entropy_bits(counts: np.ndarray) -> float:
    # sorted so the sum order, and hence the float result, ignores labelling
    c = np.sort(counts[counts > 0])
    p = c / c.sum()
    return float(-(p * np.log2(p)).sum()) + 0.0


@dataclass(frozen=True)
class DependencyReport:
    n: int
    h_x: float
    h_y: float
    h_xy: float
    e_indp: float

    def to_dict(self) -> dict:
        return asdict(self)


def e_indp(x: BitStream, y: BitStream, n: int) -> DependencyReport:
    j = joint_distribution(x, y, n)
    h_x = _entropy_bits(j.x_marginal())
    h_y = _entropy_bits(j.y_marginal())
    h_xy = _entropy_bits(j.counts)
    return DependencyReport(n, h_x, h_y, h_xy, h_x + h_y - h_xy)


@dataclass(frozen=True)
class PairTrial:
    trial: int
    subject_a: str
    subject_b: str
    e_indp: float


@dataclass(frozen=True)
class PairSampleSummary:
    trials: int
    n: int
    k: int
    min: float
    q1: float
    median: float
    q3: float
    max: float
    mean: float
    outliers: tuple[float, ...]
    per_trial: tuple[PairTrial, ...] = field(repr=False)

    def to_dict(self, include_trials: bool = False) -> dict:
        out = asdict(self)
        out["outliers"] = list(self.outliers)
        if include_trials:
            out["per_trial"] = [asdict(t) for t in self.per_trial]
        else:
            del out["per_trial"]
        return out


def summarize(values: Sequence[float]) -> dict:
    """Box-plot statistics with linear-interpolation quartiles and 1.5 IQR outliers."""
    v = np.asarray(values, dtype=float)
    q1, med, q3 = np.percentile(v, [25, 50, 75], method="linear")
    iqr = q3 - q1
    lo, hi = q1 - 1.5 * iqr, q3 + 1.5 * iqr
    return dict(
        min=float(v.min()),
        q1=float(q1),
        median=float(med),
        q3=float(q3),
        max=float(v.max()),
        mean=float(v.mean()),
        outliers=tuple(float(x) for x in v[(v < lo) | (v > hi)]),
    )


def pair_sampling(
    subjects: Sequence[IpiSeries],
    trials: int,
    min_length: int = DEFAULT_MIN_LENGTH,
    n: int = 8,
    seed: int = 0,
    k: int = 2,
) -> PairSampleSummary:
    """Repeatedly pick two distinct eligible subjects and measure their dependency.

    Trial ``t`` draws its pair from ``default_rng([seed, t])`` so trials can
    be evaluated in any order with identical results.
    """
    if trials < 1:
        raise PreconditionError("config: trials must be at least 1")
    eligible = [s for s in subjects if len(s) >= min_length]
    if len(eligible) < 2:
        raise PreconditionError(
            f"insufficient subjects: {len(eligible)} subject(s) with >= {min_length} IPIs"
        )
    streams: dict[int, BitStream] = {}

    def stream(i: int) -> BitStream:
        if i not in streams:
            streams[i] = concat_series(eligible[i], k)
        return streams[i]

    records = []
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        i, j = sorted(int(v) for v in rng.choice(len(eligible), size=2, replace=False))
        rep = e_indp(stream(i), stream(j), n)
        records.append(PairTrial(t, eligible[i].subject_id, eligible[j].subject_id, rep.e_indp))

    stats = summarize([r.e_indp for r in records])
    return PairSampleSummary(trials=trials, n=n, k=k, per_trial=tuple(records), **stats)
