"""Lag-1 scatter points in the unit square."""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
from scipy.stats import chisquare

from ..bitstream import BitStream, block_codes
from ..errors import PreconditionError


@dataclass(frozen=True, eq=False)
class ScatterSet:
    points: np.ndarray  # shape (N, 2), values in [0, 1)
    word_size: int

    def __len__(self) -> int:
        return int(self.points.shape[0])

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("u,v\n")
        for u, v in self.points.tolist():
            buf.write(f"{u!r},{v!r}\n")
        return buf.getvalue()

    def to_svg(self, size: int = 400, radius: float = 0.6) -> str:
        """Points only, unit square mapped to ``size`` x ``size`` pixels (v axis up)."""
        head = (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
            f'viewBox="0 0 {size} {size}">\n'
            f'<rect x="0" y="0" width="{size}" height="{size}" fill="white" stroke="black"/>\n'
        )
        dots = "".join(
            f'<circle cx="{u * size:.3f}" cy="{(1 - v) * size:.3f}" r="{radius}"/>\n'
            for u, v in self.points.tolist()
        )
        return head + dots + "</svg>\n"

    def uniformity_chi2(self, bins: int = 16) -> float:
        """p-value of a chi-square test that points fill a ``bins x bins`` grid evenly."""
        if len(self) == 0:
            raise PreconditionError("empty: no points")
        cells = np.minimum((self.points * bins).astype(np.int64), bins - 1)
        counts = np.bincount(cells[:, 0] * bins + cells[:, 1], minlength=bins * bins)
        return float(chisquare(counts).pvalue)


def scatter_points(bits: BitStream, word_size: int = 8) -> ScatterSet:
    """Cut ``bits`` into ``word_size``-bit words and pair each word with its successor."""
    if not 8 <= word_size <= 32:
        raise PreconditionError("config: word_size must lie in 8..32")
    if bits.length < 2 * word_size:
        raise PreconditionError(f"too short: need at least {2 * word_size} bits")
    u = block_codes(bits.bits, word_size) / float(1 << word_size)
    return ScatterSet(np.column_stack([u[:-1], u[1:]]), word_size)
