"""Shared constants and independent reference implementations for the tests."""

import itertools

import numpy as np

from ipirand.bitstream import BitStream

# worked example: six raw IPIs and their 2-LSB concatenation
EXAMPLE_IPIS = [160, 125, 132, 171, 148, 130]
EXAMPLE_Z2 = "000100110010"
EXAMPLE_D = {
    1: [8, 4],
    2: [5, 3, 3, 1],
    3: [2, 3, 2, 1, 3, 0, 1, 0],
}


def random_bits(rng, n) -> BitStream:
    return BitStream(rng.integers(0, 2, n, dtype=np.uint8))


def literal_circulation(z: str, n: int) -> list[int]:
    """Per-offset parse with wrap-around, done on strings one block at a time."""
    trunc = z[: n * (len(z) // n)]
    counts = [0] * (1 << n)
    for offset in range(n):
        rotated = trunc[offset:] + trunc[:offset]
        for i in range(0, len(rotated), n):
            counts[int(rotated[i:i + n], 2)] += 1
    return counts


def walk_reference(bits: str, g1=("000", "011", "101", "110"), t_high=3, t_low=-3):
    """Straight-line martingale walk over a 0/1 string."""
    x, out = 0, []
    for i in range(0, len(bits) - len(bits) % 3, 3):
        x += 1 if bits[i:i + 3] in g1 else -1
        if x > t_high:
            out.append("1")
            x = 0
        elif x < t_low:
            out.append("0")
            x = 0
    return "".join(out), x


def compositions(length: int):
    """Every way to split ``range(length)`` into consecutive non-empty chunks."""
    for cuts in itertools.product((False, True), repeat=max(length - 1, 0)):
        bounds = [0] + [i + 1 for i, c in enumerate(cuts) if c] + [length]
        yield list(zip(bounds, bounds[1:]))


def exact_measures(counts, n):
    """High-precision reference values of every secrecy measure from integer counts."""
    from fractions import Fraction

    import mpmath

    with mpmath.workdps(50):
        total = sum(counts)
        p = [Fraction(c, total) for c in counts]
        nz = [mpmath.mpf(x.numerator) / x.denominator for x in p if x > 0]
        shannon = -sum(x * mpmath.log(x, 2) for x in nz) / n
        sq = sum(x * x for x in p)
        collision = -mpmath.log(mpmath.mpf(sq.numerator) / sq.denominator, 2) / n
        pmax = max(p)
        min_ent = -mpmath.log(mpmath.mpf(pmax.numerator) / pmax.denominator, 2) / n
        ordered = sorted(p, reverse=True)
        g = sum((i + 1) * x for i, x in enumerate(ordered))
        g_mp = mpmath.mpf(g.numerator) / g.denominator
        gap = mpmath.power(2, -(1 + mpmath.log(g_mp, 2)) / n) - mpmath.mpf(1) / 2
        u = Fraction(1, 2**n)
        l1 = sum(abs(x - u) for x in p)
        return {
            "shannon": float(shannon),
            "collision": float(collision),
            "min_entropy": float(min_ent),
            "guesswork": float(g),
            "gap": float(gap),
            "l1": float(l1),
        }
