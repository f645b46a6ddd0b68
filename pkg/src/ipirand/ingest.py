"""Loading, validating and synthesising interpulse-interval (IPI) series.

Raw IPIs are integers in centiseconds (10 ms ticks). Only values in
``[IPI_MIN, IPI_MAX]`` are accepted; anything else is dropped and counted.
A raw value is normalised to ``raw - IPI_MIN`` (0..310) and its 8-bit word
is that value modulo 256, i.e. the ninth bit is discarded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from typing import Iterable, Sequence

import numpy as np
from scipy.signal import lfilter

from .errors import PreconditionError

IPI_MIN = 20
IPI_MAX = 330
SYNTH_KINDS = ("iid-uniform-bits", "iid-histogram", "ar1")

_HEADER_PREFIX = "# subject:"


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=np.int64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class IpiSeries:
    """One subject's raw IPIs in measurement order."""

    subject_id: str
    values: np.ndarray
    rejected_count: int = 0

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values))
        if self.values.ndim != 1:
            raise PreconditionError("range: values must be one-dimensional")
        if self.values.size and (self.values.min() < IPI_MIN or self.values.max() > IPI_MAX):
            raise PreconditionError(f"range: raw IPIs must lie in [{IPI_MIN}, {IPI_MAX}]")
        if self.rejected_count < 0:
            raise PreconditionError("range: rejected_count must be non-negative")

    def __len__(self) -> int:
        return int(self.values.size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, IpiSeries):
            return NotImplemented
        return (
            self.subject_id == other.subject_id
            and self.rejected_count == other.rejected_count
            and np.array_equal(self.values, other.values)
        )

    def normalized(self) -> np.ndarray:
        """Normalised values ``raw - 20`` as an int64 array."""
        return self.values - IPI_MIN


@dataclass(frozen=True)
class NormalizedIpi:
    value: int

    def __post_init__(self):
        if not 0 <= self.value <= IPI_MAX - IPI_MIN:
            raise PreconditionError(f"range: normalized value {self.value} outside [0, 310]")

    @property
    def bits8(self) -> int:
        return self.value & 0xFF

    def bits8_str(self) -> str:
        return format(self.bits8, "08b")


@dataclass(frozen=True)
class SynthModel:
    """Parameters of a synthetic IPI generator.

    ``iid-uniform-bits`` draws a Gaussian "coarse" IPI around ``mean`` and
    overwrites its two low bits with fair coin flips. ``iid-histogram``
    draws i.i.d. from ``histogram`` (weights over 20..330) or, if that is
    omitted, from a discretised Gaussian. ``ar1`` runs a latent AR(1)
    process and rounds/clamps each sample.
    """

    kind: str = "iid-uniform-bits"
    mean: float = 80.0
    ar_coefficient: float = 0.0
    noise_sd: float = 5.0
    seed: int = 0
    histogram: tuple[float, ...] | None = field(default=None, compare=False)

    def validate(self) -> None:
        if self.kind not in SYNTH_KINDS:
            raise PreconditionError(f"config: unknown synth kind {self.kind!r}")
        if not IPI_MIN <= self.mean <= IPI_MAX:
            raise PreconditionError(f"config: mean {self.mean} outside [{IPI_MIN}, {IPI_MAX}]")
        if not 0.0 <= self.ar_coefficient < 1.0:
            raise PreconditionError("config: ar_coefficient must lie in [0, 1)")
        if not (self.noise_sd >= 0 and math.isfinite(self.noise_sd)):
            raise PreconditionError("config: noise_sd must be finite and non-negative")
        if not 0 <= self.seed < 2**64:
            raise PreconditionError("config: seed must be a 64-bit unsigned integer")
        if self.histogram is not None:
            h = np.asarray(self.histogram, dtype=float)
            if h.shape != (IPI_MAX - IPI_MIN + 1,) or (h < 0).any() or h.sum() <= 0:
                raise PreconditionError("config: histogram needs 311 non-negative weights")


def parse_ipi_file(content: str) -> IpiSeries:
    """Parse the per-subject text format.

    The first non-blank line must be ``# subject: <id>``. Every other line
    is either blank, a ``#`` comment, or one integer. Lines that are not
    integers or fall outside [20, 330] are counted in ``rejected_count``.
    """
    lines = content.splitlines()
    idx = 0
    while idx < len(lines) and not lines[idx].strip():
        idx += 1
    if idx == len(lines) or not lines[idx].strip().startswith(_HEADER_PREFIX):
        raise PreconditionError("malformed header: first line must be '# subject: <id>'")
    subject = lines[idx].strip()[len(_HEADER_PREFIX):].strip()
    if not subject:
        raise PreconditionError("malformed header: empty subject id")

    values = []
    rejected = 0
    for line in lines[idx + 1:]:
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        try:
            v = int(text)
        except ValueError:
            rejected += 1
            continue
        if IPI_MIN <= v <= IPI_MAX:
            values.append(v)
        else:
            rejected += 1
    if not values:
        raise PreconditionError(f"empty series: no valid IPI values for subject {subject!r}")
    return IpiSeries(subject, values, rejected)


def serialize_ipi(series: IpiSeries) -> str:
    lines = [f"{_HEADER_PREFIX} {series.subject_id}"]
    lines.extend(str(int(v)) for v in series.values)
    return "\n".join(lines) + "\n"


def rr_times_to_ipi(timestamps: Sequence[float | str]) -> tuple[list[int], int]:
    """Convert R-peak timestamps (seconds) to raw IPIs.

    Each difference is scaled by 100 and rounded half-up in decimal, so
    ``0.205 s`` becomes 21 rather than the 20 a binary float would give.
    Returns ``(ipis, dropped)`` where ``dropped`` counts out-of-range gaps.
    """
    if len(timestamps) < 2:
        raise PreconditionError("too short: need at least two timestamps")
    ts = [Decimal(t) if isinstance(t, str) else Decimal(repr(float(t))) for t in timestamps]
    ipis = []
    dropped = 0
    for a, b in zip(ts, ts[1:]):
        if b <= a:
            raise PreconditionError(f"non-monotone: timestamp {b} follows {a}")
        v = int(((b - a) * 100).quantize(Decimal(1), rounding=ROUND_HALF_UP))
        if IPI_MIN <= v <= IPI_MAX:
            ipis.append(v)
        else:
            dropped += 1
    return ipis, dropped


def normalize(raw: int) -> NormalizedIpi:
    if not IPI_MIN <= raw <= IPI_MAX:
        raise PreconditionError(f"range: raw IPI {raw} outside [{IPI_MIN}, {IPI_MAX}]")
    return NormalizedIpi(int(raw) - IPI_MIN)


def _check_k(k: int) -> None:
    if not (isinstance(k, (int, np.integer)) and 1 <= k <= 8):
        raise PreconditionError(f"bad k: {k!r} (must be an integer in 1..8)")


def k_lsb(norm: NormalizedIpi | int, k: int) -> str:
    """The ``k`` low bits of a normalised value, most significant first."""
    _check_k(k)
    value = norm.value if isinstance(norm, NormalizedIpi) else int(norm)
    return format(value & ((1 << k) - 1), f"0{k}b")


def normalized_values(series: Iterable[NormalizedIpi] | np.ndarray | IpiSeries) -> np.ndarray:
    """Coerce any series representation to an int64 array of normalised values."""
    if isinstance(series, IpiSeries):
        return series.normalized()
    if isinstance(series, np.ndarray):
        arr = series.astype(np.int64, copy=False)
    else:
        arr = np.fromiter(
            (s.value if isinstance(s, NormalizedIpi) else int(s) for s in series),
            dtype=np.int64,
        )
    if arr.size and (arr.min() < 0 or arr.max() > IPI_MAX - IPI_MIN):
        raise PreconditionError("range: normalized values must lie in [0, 310]")
    return arr


def synth_generate(model: SynthModel, n: int, subject_id: str | None = None) -> IpiSeries:
    """Generate ``n`` raw IPIs from ``model``; deterministic given ``model.seed``."""
    model.validate()
    if n < 1:
        raise PreconditionError("config: n must be at least 1")
    rng = np.random.default_rng(model.seed)
    lo, hi = 0, IPI_MAX - IPI_MIN
    centre = model.mean - IPI_MIN

    if model.kind == "iid-uniform-bits":
        coarse = np.rint(rng.normal(centre, model.noise_sd, n)).astype(np.int64)
        # cap at 304 so that setting both low bits stays <= 310
        coarse = np.clip(coarse, lo, 304) & ~np.int64(3)
        values = coarse | rng.integers(0, 4, n, dtype=np.int64)
    elif model.kind == "iid-histogram":
        support = np.arange(lo, hi + 1)
        if model.histogram is not None:
            w = np.asarray(model.histogram, dtype=float)
        else:
            sd = max(model.noise_sd, 1e-9)
            w = np.exp(-0.5 * ((support - centre) / sd) ** 2)
        values = rng.choice(support, size=n, p=w / w.sum())
    else:
        a = model.ar_coefficient
        noise = rng.normal(0.0, model.noise_sd, n)
        # latent deviation d_i = a*d_{i-1} + e_i, started at the mean
        latent = centre + lfilter([1.0], [1.0, -a], noise)
        values = np.clip(np.rint(latent), lo, hi).astype(np.int64)

    sid = subject_id if subject_id is not None else f"synth-{model.kind}-{model.seed}"
    return IpiSeries(sid, values + IPI_MIN, 0)
