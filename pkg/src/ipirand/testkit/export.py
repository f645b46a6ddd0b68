"""Bit-exact export for external test suites.

``packed`` is raw big-endian bytes: the first bit of the stream is the most
significant bit of byte 0, and a final partial byte is zero-padded in its
low bits. The true bit length must travel alongside (see ``import_raw``).
``ascii`` is one ``'0'``/``'1'`` character per bit with no separators.
"""

from __future__ import annotations

import numpy as np

from ..bitstream import BitStream
from ..errors import PreconditionError

FORMATS = ("packed", "ascii")


def export_raw(bits: BitStream, fmt: str = "packed") -> bytes:
    if fmt == "packed":
        return np.packbits(bits.bits, bitorder="big").tobytes()
    if fmt == "ascii":
        return bits.to01().encode("ascii")
    raise PreconditionError(f"config: unknown export format {fmt!r}")


def import_raw(data: bytes, fmt: str = "packed", length: int | None = None) -> BitStream:
    """Inverse of :func:`export_raw`. ``length`` defaults to every bit present."""
    if fmt == "packed":
        bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8), bitorder="big")
        if length is not None:
            if length < 0 or len(data) != (length + 7) // 8:
                raise PreconditionError(f"range: length {length} inconsistent with {len(data)} bytes")
            bits = bits[:length]
        return BitStream(bits)
    if fmt == "ascii":
        text = data.decode("ascii").strip()
        stream = BitStream(text)
        if length is not None and length != stream.length:
            raise PreconditionError(f"range: expected {length} bits, found {stream.length}")
        return stream
    raise PreconditionError(f"config: unknown export format {fmt!r}")
