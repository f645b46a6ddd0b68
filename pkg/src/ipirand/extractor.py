"""Martingale randomness extraction from the trend of IPI low bits.

The k-bit concatenation of a subject's IPIs is cut into consecutive 3-bit
triads. Each triad moves a walk up by one if it belongs to group G1 and
down by one otherwise. When the walk rises above ``t_high`` a 1 is emitted,
when it falls below ``t_low`` a 0 is emitted, and in both cases the walk
restarts from zero. With the default thresholds ``+3/-3`` emission happens
on reaching ``+-4``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from .bitstream import BitStream, block_codes, concat_series, lsb_bits
from .errors import PreconditionError
from .ingest import IpiSeries, NormalizedIpi, _check_k, normalized_values

DEFAULT_G1 = frozenset({0b000, 0b011, 0b101, 0b110})


@dataclass(frozen=True)
class ExtractorConfig:
    k: int = 2
    g1: frozenset = DEFAULT_G1
    t_high: int = 3
    t_low: int = -3

    def __post_init__(self):
        object.__setattr__(self, "g1", frozenset(int(s) for s in self.g1))
        _check_k(self.k)
        if len(self.g1) != 4 or not self.g1 <= set(range(8)):
            raise PreconditionError("config: G1 must hold exactly four distinct 3-bit triads")
        if self.t_high <= 0 or self.t_low >= 0:
            raise PreconditionError("config: need t_high > 0 and t_low < 0")

    @property
    def g2(self) -> frozenset:
        return frozenset(range(8)) - self.g1

    def step_table(self) -> np.ndarray:
        return np.array([1 if s in self.g1 else -1 for s in range(8)], dtype=np.int8)


@dataclass(frozen=True)
class MartingaleState:
    x: int = 0
    triads_consumed: int = 0
    bits_emitted: int = 0


@dataclass(frozen=True)
class ExtractionResult:
    output: BitStream
    input_triads: int
    input_ipis: int
    final_state: MartingaleState = field(repr=False)

    @property
    def yield_rate(self) -> float:
        """Output bits per input IPI."""
        return self.output.length / self.input_ipis if self.input_ipis else 0.0

    @property
    def triads_per_bit(self) -> float:
        return self.input_triads / self.output.length if self.output.length else float("inf")

    def to_dict(self) -> dict:
        return {
            "output_bits": self.output.length,
            "input_ipis": self.input_ipis,
            "input_triads": self.input_triads,
            "yield_rate": self.yield_rate,
            "triads_per_bit": self.triads_per_bit if self.output.length else None,
            "final_x": self.final_state.x,
        }


def _triad_value(s) -> int:
    if isinstance(s, str):
        if len(s) != 3 or set(s) - {"0", "1"}:
            raise PreconditionError(f"bad triad: {s!r}")
        return int(s, 2)
    s = int(s)
    if not 0 <= s < 8:
        raise PreconditionError(f"bad triad: {s!r}")
    return s


def classify_triad(s: int | str, cfg: ExtractorConfig = ExtractorConfig()) -> int:
    """+1 if the triad is in G1, else -1."""
    return 1 if _triad_value(s) in cfg.g1 else -1


def mre_step(
    state: MartingaleState, s: int | str, cfg: ExtractorConfig = ExtractorConfig()
) -> tuple[MartingaleState, int | None]:
    x = state.x + classify_triad(s, cfg)
    bit = None
    if x > cfg.t_high:
        bit, x = 1, 0
    elif x < cfg.t_low:
        bit, x = 0, 0
    return (
        MartingaleState(x, state.triads_consumed + 1, state.bits_emitted + (bit is not None)),
        bit,
    )


def _walk(steps: list[int], x: int, t_high: int, t_low: int) -> tuple[list[int], int]:
    out = []
    emit = out.append
    for d in steps:
        x += d
        if x > t_high:
            emit(1)
            x = 0
        elif x < t_low:
            emit(0)
            x = 0
    return out, x


def _run(triads: np.ndarray, state: MartingaleState, cfg: ExtractorConfig):
    steps = cfg.step_table()[triads].tolist()
    out, x = _walk(steps, state.x, cfg.t_high, cfg.t_low)
    new_state = MartingaleState(x, state.triads_consumed + len(steps), state.bits_emitted + len(out))
    return np.array(out, dtype=np.uint8), new_state


def extract_bits(bits: BitStream, cfg: ExtractorConfig = ExtractorConfig()) -> tuple[BitStream, MartingaleState]:
    """Run the walk over a ready-made bitstream; a trailing partial triad is ignored."""
    out, state = _run(block_codes(bits.bits, 3), MartingaleState(), cfg)
    return BitStream(out), state


def extract(
    series: Iterable[NormalizedIpi] | np.ndarray | IpiSeries,
    cfg: ExtractorConfig = ExtractorConfig(),
) -> ExtractionResult:
    values = normalized_values(series)
    if values.size == 0:
        raise PreconditionError("empty: cannot extract from an empty series")
    out, state = extract_bits(concat_series(values, cfg.k), cfg)
    return ExtractionResult(out, state.triads_consumed, int(values.size), state)


class MartingaleExtractor:
    """Incremental extractor: bits can be fed in arbitrary chunks.

    Up to two leftover bits are held between calls so that triads
    straddling chunk boundaries are formed exactly as in a one-shot run.
    """

    def __init__(self, cfg: ExtractorConfig = ExtractorConfig()):
        self.cfg = cfg
        self.state = MartingaleState()
        self._pending = np.zeros(0, dtype=np.uint8)

    def feed(self, chunk: BitStream | str | np.ndarray) -> BitStream:
        chunk = chunk if isinstance(chunk, BitStream) else BitStream(chunk)
        if chunk.length == 0:
            return BitStream()
        buf = np.concatenate([self._pending, chunk.bits])
        usable = 3 * (buf.size // 3)
        self._pending = buf[usable:]
        out, self.state = _run(block_codes(buf[:usable], 3), self.state, self.cfg)
        return BitStream(out)

    def feed_ipis(self, series) -> BitStream:
        return self.feed(concat_series(series, self.cfg.k))

    @property
    def pending_bits(self) -> int:
        return int(self._pending.size)


def extract_stream(
    chunks: Iterable[BitStream | str | np.ndarray], cfg: ExtractorConfig = ExtractorConfig()
) -> Iterator[BitStream]:
    """Yield the bits emitted after each chunk of input."""
    ext = MartingaleExtractor(cfg)
    for chunk in chunks:
        yield ext.feed(chunk)


def triad_distribution(bits: BitStream) -> np.ndarray:
    """Frequencies of the eight triads under plain non-overlapping chunking."""
    codes = block_codes(bits.bits, 3)
    if codes.size == 0:
        raise PreconditionError("too short: fewer than three bits")
    return np.bincount(codes, minlength=8) / codes.size


def balanced_grouping(probs) -> frozenset:
    """The 4-triad group whose total probability is closest to 1/2.

    All 35 ways of splitting the eight triads into two groups of four are
    scored; the group containing ``000`` is returned. Ties go to the
    lexicographically smallest group.
    """
    p = np.asarray(probs, dtype=float)
    if p.shape != (8,):
        raise PreconditionError("invalid distribution: need eight triad probabilities")
    best = min(
        (g for g in itertools.combinations(range(8), 4) if 0 in g),
        key=lambda g: (abs(p[list(g)].sum() - 0.5), g),
    )
    return frozenset(best)


def gray_code_baseline(series, k: int) -> BitStream:
    """Low ``k`` bits of the reflected Gray code of each normalised IPI."""
    _check_k(k)
    values = normalized_values(series)
    if values.size == 0:
        raise PreconditionError("empty: cannot encode an empty series")
    return lsb_bits(values ^ (values >> 1), k)
