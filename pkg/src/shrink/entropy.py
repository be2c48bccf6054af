"""Order-0 adaptive range coder for integer symbol streams.

Wire format (little-endian, fully specified for cross-implementation work):

    u32  symbol count
    u32  alphabet size
    ...  range-coded payload

The payload is produced by a 32-bit range coder with byte-wise
renormalization (carries resolved through a cache byte and a pending-0xFF
run, LZMA style).  The probability model is an adaptive frequency table:
every symbol starts at count 1, the coded symbol's count grows by 32, and
all counts are halved (rounding up) when the total exceeds
max(2^16, 2 * alphabet).  Both ends run the identical model, so decoding
is exact and encodings are bit-reproducible across platforms.

Degenerate streams carry no payload: an empty stream or a 1-symbol
alphabet is fully described by the header.
"""

from __future__ import annotations

import struct

import numpy as np

from ._kernels import RC_MAX_ALPHABET, rc_decode, rc_encode

__all__ = ["encode", "decode", "CorruptStreamError", "HEADER_SIZE"]

HEADER_SIZE = 8
_HEADER = struct.Struct("<II")


class CorruptStreamError(ValueError):
    """Raised when a byte stream cannot be decoded as produced by encode()."""


def encode(symbols, alphabet_size: int) -> bytes:
    """Entropy-code a symbol sequence; self-delimiting, deterministic."""
    if alphabet_size < 1:
        raise ValueError(f"alphabet size must be >= 1, got {alphabet_size}")
    if alphabet_size > RC_MAX_ALPHABET:
        raise ValueError(
            f"alphabet size {alphabet_size} exceeds coder limit {RC_MAX_ALPHABET}"
        )
    sym = np.ascontiguousarray(symbols, dtype=np.int64)
    if sym.ndim != 1:
        raise ValueError("symbols must be a 1-D sequence")
    if sym.size:
        lo, hi = int(sym.min()), int(sym.max())
        if lo < 0 or hi >= alphabet_size:
            raise ValueError(
                f"symbols outside alphabet [0, {alphabet_size}): saw [{lo}, {hi}]"
            )
    header = _HEADER.pack(sym.size, alphabet_size)
    if sym.size == 0 or alphabet_size == 1:
        return header
    payload = rc_encode(sym, alphabet_size)
    return header + payload.tobytes()


def decode(data: bytes, count: int, alphabet_size: int) -> np.ndarray:
    """Exact inverse of encode(); validates the header against the arguments."""
    if len(data) < HEADER_SIZE:
        raise CorruptStreamError(f"stream truncated: {len(data)} bytes, need header of {HEADER_SIZE}")
    stored_count, stored_alphabet = _HEADER.unpack_from(data)
    if stored_count != count or stored_alphabet != alphabet_size:
        raise CorruptStreamError(
            f"header mismatch: stream says count={stored_count} alphabet={stored_alphabet}, "
            f"caller expects count={count} alphabet={alphabet_size}"
        )
    if count == 0:
        return np.empty(0, dtype=np.int64)
    if alphabet_size == 1:
        return np.zeros(count, dtype=np.int64)
    payload = np.frombuffer(data, dtype=np.uint8, offset=HEADER_SIZE)
    symbols, overrun = rc_decode(payload, count, alphabet_size)
    if overrun > 0:
        raise CorruptStreamError(
            f"stream truncated: decoder needed {overrun} byte(s) past the end"
        )
    return symbols
