"""Santha-Vazirani bias of an empirical pattern distribution.

For a source whose pattern probabilities satisfy
``Pr[x] / Pr[y] <= (1 + delta) / (1 - delta)`` for all patterns, the
smallest admissible ``delta`` follows from the extreme ratio
``r = p_max / p_min`` as ``(r - 1) / (r + 1)``. A pattern that never
occurs makes the ratio unbounded and pins ``delta`` to 1.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

from .bitstream import BitStream, NgramDistribution, circular_ngram_distribution
from .errors import PreconditionError

CSV_HEADER = ("n", "p_max", "p_min", "delta", "unseen")


@dataclass(frozen=True)
class SvDeltaReport:
    n: int
    p_max: float
    p_min: float
    delta: float
    unseen_patterns: int

    def to_dict(self) -> dict:
        return asdict(self)

    def csv_row(self) -> tuple:
        return (self.n, self.p_max, self.p_min, self.delta, self.unseen_patterns)


def sv_delta(d: NgramDistribution) -> SvDeltaReport:
    total = d.total
    if total == 0:
        raise PreconditionError("empty: distribution has no observations")
    c_max = int(d.counts.max())
    c_min = int(d.counts.min())
    unseen = int((d.counts == 0).sum())
    if c_min == 0:
        delta = 1.0
    else:
        # (r - 1)/(r + 1) with r = c_max/c_min, kept in integers until the last division
        delta = (c_max - c_min) / (c_max + c_min)
    return SvDeltaReport(d.n, c_max / total, c_min / total, delta, unseen)


def sv_curve(z: BitStream, n_max: int) -> list[SvDeltaReport]:
    if not 1 <= n_max <= 16:
        raise PreconditionError(f"bad n: n_max={n_max} must be in 1..16")
    if z.length < n_max:
        raise PreconditionError(f"too short: {z.length} bits < n_max={n_max}")
    return [sv_delta(circular_ngram_distribution(z, n)) for n in range(1, n_max + 1)]
