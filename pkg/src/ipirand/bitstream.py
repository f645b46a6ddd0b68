"""Immutable bit sequences and circular n-gram distributions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import PreconditionError
from .ingest import IpiSeries, NormalizedIpi, _check_k, normalized_values

MAX_NGRAM = 16


class BitStream:
    """An immutable sequence of bits backed by a ``uint8`` array of 0/1."""

    __slots__ = ("_bits",)

    def __init__(self, bits: Iterable[int] | np.ndarray | str | "BitStream" = ()):
        if isinstance(bits, BitStream):
            arr = bits._bits
        elif isinstance(bits, str):
            text = bits.replace(" ", "").replace("_", "")
            if set(text) - {"0", "1"}:
                raise PreconditionError("invalid bits: string may only contain '0' and '1'")
            arr = (np.frombuffer(text.encode("ascii"), dtype=np.uint8) - ord("0")).astype(np.uint8)
        else:
            arr = np.asarray(bits if isinstance(bits, np.ndarray) else list(bits))
            if arr.size and ((arr != 0) & (arr != 1)).any():
                raise PreconditionError("invalid bits: values must be 0 or 1")
            arr = arr.astype(np.uint8).ravel()
        if arr.flags.writeable:
            arr = arr.copy()
            arr.setflags(write=False)
        self._bits = arr

    @property
    def bits(self) -> np.ndarray:
        return self._bits

    @property
    def length(self) -> int:
        return int(self._bits.size)

    def __len__(self) -> int:
        return self.length

    def __getitem__(self, idx):
        if isinstance(idx, slice):
            return BitStream(self._bits[idx])
        return int(self._bits[idx])

    def __iter__(self):
        return iter(self._bits.tolist())

    def __eq__(self, other) -> bool:
        if isinstance(other, BitStream):
            return np.array_equal(self._bits, other._bits)
        return NotImplemented

    def __hash__(self):
        return hash((self.length, self._bits.tobytes()))

    def __add__(self, other: "BitStream") -> "BitStream":
        return BitStream(np.concatenate([self._bits, other._bits]))

    def __repr__(self) -> str:
        shown = self.to01() if self.length <= 64 else self.to01()[:64] + "..."
        return f"BitStream({shown!r}, length={self.length})"

    def to01(self) -> str:
        return (self._bits + ord("0")).tobytes().decode("ascii")

    def complement(self) -> "BitStream":
        return BitStream(1 - self._bits)

    def rotate(self, shift: int) -> "BitStream":
        return BitStream(np.roll(self._bits, -shift))

    def ones(self) -> int:
        return int(np.count_nonzero(self._bits))


@dataclass(frozen=True, eq=False)
class NgramDistribution:
    """Counts of every ``n``-bit pattern, indexed by the pattern's integer value."""

    n: int
    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.shape != (1 << self.n,):
            raise PreconditionError(f"counts must have 2^{self.n} entries")
        if (counts < 0).any():
            raise PreconditionError("invalid distribution: negative count")
        counts = counts.copy()
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def __eq__(self, other) -> bool:
        if not isinstance(other, NgramDistribution):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.counts, other.counts)


def concat_series(series: Iterable[NormalizedIpi] | np.ndarray | IpiSeries, k: int) -> BitStream:
    """Concatenate the ``k`` low bits of each normalised IPI, MSB first."""
    _check_k(k)
    values = normalized_values(series)
    if values.size == 0:
        raise PreconditionError("empty: cannot concatenate an empty series")
    return lsb_bits(values, k)


def lsb_bits(words: np.ndarray, k: int) -> BitStream:
    """The ``k`` low bits of each non-negative integer word, MSB first."""
    shifts = np.arange(k - 1, -1, -1, dtype=np.int64)
    bits = ((np.asarray(words, dtype=np.int64)[:, None] >> shifts) & 1).astype(np.uint8)
    return BitStream(bits.ravel())


def _check_n(n: int) -> None:
    if not (isinstance(n, (int, np.integer)) and 1 <= n <= MAX_NGRAM):
        raise PreconditionError(f"bad n: {n!r} (must be an integer in 1..{MAX_NGRAM})")


def block_codes(bits: np.ndarray, n: int, offset: int = 0) -> np.ndarray:
    """Integer codes of consecutive non-overlapping ``n``-bit blocks from ``offset``.

    Any trailing partial block is dropped.
    """
    seg = bits[offset:]
    m = seg.size // n
    if m == 0:
        return np.zeros(0, dtype=np.int64)
    weights = np.left_shift(1, np.arange(n - 1, -1, -1, dtype=np.int64))
    return seg[: m * n].reshape(m, n).astype(np.int64) @ weights


def circular_ngram_distribution(z: BitStream, n: int) -> NgramDistribution:
    """Pattern counts by the circulation method.

    The stream is truncated to ``L' = n * (len // n)`` bits. For each
    offset ``0..n-1`` it is parsed into ``L'/n`` non-overlapping blocks,
    wrapping past the end back to the first bit. Across all offsets every
    start position ``0..L'-1`` is used exactly once, so the total equals
    ``L'`` and the counts are those of every cyclic window.
    """
    _check_n(n)
    if z.length < n:
        raise PreconditionError(f"too short: stream of {z.length} bits is shorter than n={n}")
    trunc = n * (z.length // n)
    bits = z.bits[:trunc]
    ext = np.concatenate([bits, bits[: n - 1]]).astype(np.int64)
    codes = np.zeros(trunc, dtype=np.int64)
    for j in range(n):
        codes = (codes << 1) | ext[j:j + trunc]
    return NgramDistribution(n, np.bincount(codes, minlength=1 << n))


def probabilities(d: NgramDistribution) -> np.ndarray:
    total = d.total
    if total == 0:
        raise PreconditionError("empty distribution: total count is zero")
    return d.counts / total
