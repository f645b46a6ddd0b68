"""Run the internal tests over many fixed-length sequences and judge pass proportions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np
from scipy.stats import kstest

from ..bitstream import BitStream
from ..errors import PreconditionError
from . import stats

SEQ_LENGTHS = (10_000, 1_000_000)

TestFn = Callable[[np.ndarray], float]

DEFAULT_TESTS: dict[str, TestFn] = {
    "monobit": stats.monobit_test,
    "block_frequency": stats.block_frequency_test,
    "runs": stats.runs_test,
    "cusum_forward": lambda b: stats.cusum_test(b, "forward"),
    "cusum_reverse": lambda b: stats.cusum_test(b, "reverse"),
    "serial_1": lambda b: stats.serial_test(b)[0],
    "serial_2": lambda b: stats.serial_test(b)[1],
}

# subtests grouped under the five battery tests
TEST_FAMILIES = {
    "monobit": ("monobit",),
    "block_frequency": ("block_frequency",),
    "runs": ("runs",),
    "cusum": ("cusum_forward", "cusum_reverse"),
    "serial": ("serial_1", "serial_2"),
}


def proportion_interval(alpha: float, m: int) -> tuple[float, float]:
    """``(1 - alpha) -+ 3 * sqrt(p(1 - p) / m)`` with ``p = 1 - alpha``."""
    if m < 1:
        raise PreconditionError("insufficient data: need at least one sequence")
    if not 0 < alpha < 1:
        raise PreconditionError("config: alpha must lie in (0, 1)")
    p = 1.0 - alpha
    half = 3.0 * math.sqrt(p * (1.0 - p) / m)
    return p - half, p + half


@dataclass(frozen=True)
class TestOutcome:
    __test__ = False

    name: str
    p_values: tuple[float, ...] = field(repr=False)
    pass_count: int
    m: int
    alpha: float
    ci_low: float
    ci_high: float
    uniformity_p: float | None

    @property
    def proportion(self) -> float:
        return self.pass_count / self.m

    @property
    def proportion_pass(self) -> bool:
        # only the lower bound matters: m sequences all passing is never a defect
        return self.proportion >= self.ci_low

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "m": self.m,
            "alpha": self.alpha,
            "pass_count": self.pass_count,
            "proportion": self.proportion,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
            "proportion_pass": self.proportion_pass,
            "uniformity_p": self.uniformity_p,
            "p_values": list(self.p_values),
        }


def judge(name: str, p_values, alpha: float) -> TestOutcome:
    p = tuple(float(v) for v in p_values)
    if any(not 0.0 <= v <= 1.0 for v in p):
        raise PreconditionError(f"invalid p-value from test {name!r}")
    lo, hi = proportion_interval(alpha, len(p))
    passed = sum(v >= alpha for v in p)
    uni = float(kstest(p, "uniform").pvalue) if len(p) >= 2 else None
    return TestOutcome(name, p, passed, len(p), alpha, lo, hi, uni)


@dataclass(frozen=True)
class BatteryReport:
    seq_len: int
    alpha: float
    m: int
    tests: tuple[TestOutcome, ...]

    @property
    def all_pass(self) -> bool:
        return all(t.proportion_pass for t in self.tests)

    def outcome(self, name: str) -> TestOutcome:
        for t in self.tests:
            if t.name == name:
                return t
        raise KeyError(name)

    def family_pass(self) -> dict[str, bool]:
        names = {t.name for t in self.tests}
        return {
            fam: all(self.outcome(s).proportion_pass for s in subs)
            for fam, subs in TEST_FAMILIES.items()
            if set(subs) <= names
        }

    def to_dict(self) -> dict:
        return {
            "seq_len": self.seq_len,
            "alpha": self.alpha,
            "m": self.m,
            "all_pass": self.all_pass,
            "families": self.family_pass(),
            "tests": [t.to_dict() for t in self.tests],
        }


def run_battery(
    bits: BitStream | np.ndarray,
    seq_len: int = 10_000,
    alpha: float = 0.01,
    tests: Mapping[str, TestFn] | None = None,
) -> BatteryReport:
    """Split ``bits`` into ``floor(L / seq_len)`` sequences and run every test on each."""
    arr = bits.bits if isinstance(bits, BitStream) else np.asarray(bits, dtype=np.uint8)
    if seq_len < 1:
        raise PreconditionError("config: seq_len must be positive")
    m = arr.size // seq_len
    if m == 0:
        raise PreconditionError(
            f"insufficient data: {arr.size} bits cannot fill one sequence of {seq_len}"
        )
    proportion_interval(alpha, m)
    tests = DEFAULT_TESTS if tests is None else tests
    seqs = arr[: m * seq_len].reshape(m, seq_len)
    outcomes = tuple(judge(name, [fn(s) for s in seqs], alpha) for name, fn in tests.items())
    return BatteryReport(seq_len, alpha, m, outcomes)
