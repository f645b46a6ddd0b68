"""Five closed-form tests from the SP 800-22 battery.

Each function takes a 0/1 array (or :class:`BitStream`) and returns p-values
in ``[0, 1]``. Formulas follow the SP 800-22 rev. 1a descriptions; the
cumulative-sums summation bounds use truncating integer division as in the
reference C code.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import erfc, gammaincc
from scipy.stats import norm

from ..bitstream import BitStream
from ..errors import PreconditionError

MIN_BITS = 100
DEFAULT_BLOCK_SIZE = 128
DEFAULT_SERIAL_M = 4


def _as_array(bits) -> np.ndarray:
    if isinstance(bits, BitStream):
        return bits.bits
    arr = np.asarray(bits, dtype=np.uint8)
    return arr.ravel()


def _need(arr: np.ndarray, min_bits: int) -> None:
    if arr.size < min_bits:
        raise PreconditionError(f"insufficient bits: {arr.size} < {min_bits}")


def _clip(p: float) -> float:
    return float(min(1.0, max(0.0, p)))


def monobit_test(bits, *, min_bits: int = MIN_BITS) -> float:
    arr = _as_array(bits)
    _need(arr, max(min_bits, 1))
    n = arr.size
    s = abs(2 * int(arr.sum()) - n) / math.sqrt(n)
    return _clip(erfc(s / math.sqrt(2)))


def block_frequency_test(bits, block_size: int = DEFAULT_BLOCK_SIZE, *, min_bits: int = MIN_BITS) -> float:
    arr = _as_array(bits)
    _need(arr, max(min_bits, block_size))
    if block_size < 1:
        raise PreconditionError("config: block_size must be positive")
    blocks = arr.size // block_size
    pi = arr[: blocks * block_size].reshape(blocks, block_size).mean(axis=1)
    chi2 = 4.0 * block_size * float(((pi - 0.5) ** 2).sum())
    return _clip(gammaincc(blocks / 2.0, chi2 / 2.0))


def runs_test(bits, *, min_bits: int = MIN_BITS) -> float:
    arr = _as_array(bits)
    _need(arr, max(min_bits, 2))
    n = arr.size
    pi = float(arr.mean())
    # frequency prerequisite: a heavily biased sequence fails outright
    if abs(pi - 0.5) >= 2.0 / math.sqrt(n):
        return 0.0
    v_obs = 1 + int(np.count_nonzero(arr[1:] != arr[:-1]))
    num = abs(v_obs - 2.0 * n * pi * (1.0 - pi))
    den = 2.0 * math.sqrt(2.0 * n) * pi * (1.0 - pi)
    return _clip(erfc(num / den))


def cusum_test(bits, direction: str = "forward", *, min_bits: int = MIN_BITS) -> float:
    arr = _as_array(bits)
    _need(arr, max(min_bits, 1))
    if direction not in ("forward", "reverse"):
        raise PreconditionError(f"config: unknown cusum direction {direction!r}")
    x = 2 * arr.astype(np.int64) - 1
    if direction == "reverse":
        x = x[::-1]
    z = int(np.abs(np.cumsum(x)).max())
    n = arr.size
    if z == 0:
        return 1.0
    sq = math.sqrt(n)

    def tdiv(a: int, b: int) -> int:
        return int(a / b)  # C-style truncation toward zero

    k1 = np.arange(tdiv(tdiv(-n, z) + 1, 4), tdiv(tdiv(n, z) - 1, 4) + 1)
    k2 = np.arange(tdiv(tdiv(-n, z) - 3, 4), tdiv(tdiv(n, z) - 1, 4) + 1)
    s1 = (norm.cdf((4 * k1 + 1) * z / sq) - norm.cdf((4 * k1 - 1) * z / sq)).sum()
    s2 = (norm.cdf((4 * k2 + 3) * z / sq) - norm.cdf((4 * k2 + 1) * z / sq)).sum()
    return _clip(1.0 - s1 + s2)


def _psi2(arr: np.ndarray, m: int) -> float:
    if m <= 0:
        return 0.0
    n = arr.size
    ext = np.concatenate([arr, arr[: m - 1]]).astype(np.int64)
    codes = np.zeros(n, dtype=np.int64)
    for j in range(m):
        codes = (codes << 1) | ext[j:j + n]
    counts = np.bincount(codes, minlength=1 << m).astype(float)
    return (1 << m) / n * float((counts ** 2).sum()) - n


def serial_test(bits, m: int = DEFAULT_SERIAL_M, *, min_bits: int = MIN_BITS) -> tuple[float, float]:
    arr = _as_array(bits)
    _need(arr, max(min_bits, m))
    if m < 2:
        raise PreconditionError("config: serial test needs m >= 2")
    psi_m, psi_m1, psi_m2 = _psi2(arr, m), _psi2(arr, m - 1), _psi2(arr, m - 2)
    d1 = psi_m - psi_m1
    d2 = psi_m - 2 * psi_m1 + psi_m2
    p1 = gammaincc(2 ** (m - 2), d1 / 2.0)
    p2 = gammaincc(2.0 ** (m - 3), d2 / 2.0)
    return _clip(p1), _clip(p2)
