"""Information-secrecy measures over n-bit pattern distributions.

All entropies are in bits and reported as per-bit rates (divided by the
word length ``n``), so values for different ``n`` share one axis.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .bitstream import BitStream, NgramDistribution, circular_ngram_distribution, probabilities
from .errors import PreconditionError

CSV_HEADER = ("n", "shannon", "collision", "guessing_gap", "min_entropy", "l1")


def _check(p, n: int) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise PreconditionError("invalid distribution: expected a non-empty vector")
    if (p < 0).any() or not np.isfinite(p).all():
        raise PreconditionError("invalid distribution: negative or non-finite probability")
    if abs(p.sum() - 1.0) > 1e-9:
        raise PreconditionError(f"invalid distribution: probabilities sum to {p.sum()!r}")
    if n < 1:
        raise PreconditionError("bad n: word length must be positive")
    return p


def shannon_entropy(p, n: int) -> float:
    p = _check(p, n)
    nz = p[p > 0]
    return float(-(nz * np.log2(nz)).sum()) / n + 0.0


def collision_entropy(p, n: int) -> float:
    """Renyi entropy of order 2, ``-log2(sum p^2) / n``."""
    p = _check(p, n)
    return float(-np.log2(np.dot(p, p))) / n + 0.0


def guessing_entropy(p, n: int) -> tuple[float, float]:
    """Expected guesswork and its per-bit gap from a fair coin.

    ``G = sum_i i * p_(i)`` over probabilities sorted in decreasing order
    (ranks start at 1). The per-bit guess probability is taken as
    ``2 ** -((1 + log2 G) / n)``: a uniform source over ``2^n`` patterns has
    ``G = (2^n + 1) / 2`` and lands just under 0.5, a point mass gives
    ``2 ** (-1/n)``. Returns ``(G, p_guess - 0.5)``. For small ``n`` the
    uniform case sits visibly below 0.5 (``n = 1`` gives 1/3), so the gap
    can be negative.
    """
    p = _check(p, n)
    ordered = np.sort(p)[::-1]
    g = float(np.dot(np.arange(1, ordered.size + 1), ordered))
    p_guess = 2.0 ** (-(1.0 + np.log2(g)) / n)
    return g, float(p_guess) - 0.5


def min_entropy(p, n: int) -> float:
    p = _check(p, n)
    return float(-np.log2(p.max())) / n + 0.0


def l1_uniform_distance(p, n: int) -> float:
    p = _check(p, n)
    if p.size != 1 << n:
        raise PreconditionError(f"invalid distribution: expected 2^{n} probabilities")
    return float(np.abs(p - 2.0 ** -n).sum())


@dataclass(frozen=True)
class EntropyReport:
    n: int
    shannon_rate: float
    collision_rate: float
    guessing_gap: float
    min_entropy_rate: float
    l1_distance: float
    guesswork: float
    total: int

    def to_dict(self) -> dict:
        return asdict(self)

    def csv_row(self) -> tuple:
        return (
            self.n,
            self.shannon_rate,
            self.collision_rate,
            self.guessing_gap,
            self.min_entropy_rate,
            self.l1_distance,
        )


def report_for(d: NgramDistribution) -> EntropyReport:
    p = probabilities(d)
    n = d.n
    g, gap = guessing_entropy(p, n)
    return EntropyReport(
        n=n,
        shannon_rate=shannon_entropy(p, n),
        collision_rate=collision_entropy(p, n),
        guessing_gap=gap,
        min_entropy_rate=min_entropy(p, n),
        l1_distance=l1_uniform_distance(p, n),
        guesswork=g,
        total=d.total,
    )


def full_report(z: BitStream, n_max: int) -> list[EntropyReport]:
    """One :class:`EntropyReport` for every word length ``1..n_max``."""
    if not 1 <= n_max <= 16:
        raise PreconditionError(f"bad n: n_max={n_max} must be in 1..16")
    if z.length < n_max:
        raise PreconditionError(f"too short: {z.length} bits < n_max={n_max}")
    return [report_for(circular_ngram_distribution(z, n)) for n in range(1, n_max + 1)]
