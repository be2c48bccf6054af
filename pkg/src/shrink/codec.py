"""The full pipeline: extract -> merge -> slope -> residuals -> entropy.

Container layout (all little-endian), version 1:

    0   magic            5 bytes  b"SHRK1"
    5   flags            u8       bit0 lossless, bit1 base entropy-coded,
                                  bit2 residuals present
    6   decimals         u8       decimal places for exact-recovery rounding
    7   entropy backend  u8       0 = built-in order-0 range coder
    8   n                u64
    16  eps_b            f64
    24  lambda           f64
    32  eps_r            f64
    40  r_min            f64
    48  r_max            f64
    56  eps_hat_max      f64
    64  sub-base count   u32
    68  header crc32     u32      over bytes [0, 68)
    72  base section     u32 length + bytes + u32 crc32
    ..  residual section u32 length + bytes + u32 crc32

The base section stores, per sub-base: f64 origin, f64 slope, varint run
count, the runs' start indices (first absolute, then deltas; all varint)
and the runs' lengths (first absolute varint, then zigzag-varint deltas).
Both delta encodings matter: repeated patterns in the data produce runs
at regular offsets with recurring lengths, and the deltas collapse those
into near-constant byte sequences the entropy pass can squash.  Sub-bases
appear in (origin, span_lo, first start) order, so identical input yields
byte-identical output.
"""

from __future__ import annotations

import math
import struct
import zlib
from dataclasses import replace

import numpy as np

from . import _kernels, entropy, residual as residual_mod
from .entropy import CorruptStreamError
from .knowledge_base import build_base
from .model import (
    ArtifactHeader,
    CompressedArtifact,
    ErrorThresholds,
    KnowledgeBase,
    TimeSeries,
)
from .segmentation import extract_semantics, plan_intervals

__all__ = [
    "compress",
    "decompress",
    "compress_lossless",
    "serialize",
    "deserialize",
    "serialize_many",
    "deserialize_many",
    "CorruptArtifactError",
    "MAGIC",
    "FIXED_HEADER_SIZE",
]

MAGIC = b"SHRK1"
MULTI_MAGIC = b"SHRKM"
FIXED_HEADER_SIZE = 72  # 68 packed bytes + u32 header checksum
_FIXED = struct.Struct("<5sBBBQddddddI")

_FLAG_LOSSLESS = 1
_FLAG_BASE_CODED = 2
_FLAG_RESIDUALS = 4

ENTROPY_BACKEND_RANGE_CODER = 0


class CorruptArtifactError(ValueError):
    """Raised when container bytes fail structural or checksum validation."""


# ---------------------------------------------------------------------------
# varints and base section packing
# ---------------------------------------------------------------------------

def _write_varint(buf: bytearray, value: int) -> None:
    if value < 0:
        raise ValueError("varint value must be non-negative")
    while True:
        byte = value & 0x7F
        value >>= 7
        if value:
            buf.append(byte | 0x80)
        else:
            buf.append(byte)
            return


def _read_varint(data: bytes, pos: int) -> tuple[int, int]:
    result = 0
    shift = 0
    while True:
        if pos >= len(data):
            raise CorruptArtifactError("base section ends inside a varint")
        byte = data[pos]
        pos += 1
        result |= (byte & 0x7F) << shift
        if not byte & 0x80:
            return result, pos
        shift += 7
        if shift > 63:
            raise CorruptArtifactError("varint overflows 64 bits")


def _zigzag(value: int) -> int:
    return (value << 1) ^ (value >> 63)


def _unzigzag(value: int) -> int:
    return (value >> 1) ^ -(value & 1)


def _pack_base(base: KnowledgeBase) -> bytes:
    buf = bytearray()
    for sb in base.sub_bases:
        buf += struct.pack("<dd", sb.origin, sb.slope)
        _write_varint(buf, len(sb.starts))
        prev = 0
        for s, _ in sb.starts:
            _write_varint(buf, s - prev)
            prev = s
        prev_len = 0
        for i, (_, l) in enumerate(sb.starts):
            if i == 0:
                _write_varint(buf, l)
            else:
                _write_varint(buf, _zigzag(l - prev_len))
            prev_len = l
    return bytes(buf)


def _unpack_base(data: bytes, k: int, n: int):
    """Parse the base section into flat per-run arrays sorted by start index."""
    origins, slopes, starts, lens = [], [], [], []
    pos = 0
    for _ in range(k):
        if pos + 16 > len(data):
            raise CorruptArtifactError("base section ends inside a sub-base record")
        origin, slope = struct.unpack_from("<dd", data, pos)
        pos += 16
        count, pos = _read_varint(data, pos)
        if count < 1:
            raise CorruptArtifactError("sub-base with no runs")
        run_starts = []
        prev = 0
        for _ in range(count):
            delta, pos = _read_varint(data, pos)
            prev += delta
            run_starts.append(prev)
        prev_len = 0
        for i in range(count):
            raw, pos = _read_varint(data, pos)
            length = raw if i == 0 else prev_len + _unzigzag(raw)
            if length < 1:
                raise CorruptArtifactError("non-positive run length in base section")
            prev_len = length
            starts.append(run_starts[i])
            lens.append(length)
            origins.append(origin)
            slopes.append(slope)
    if pos != len(data):
        raise CorruptArtifactError(f"{len(data) - pos} trailing byte(s) in base section")

    order = np.argsort(np.asarray(starts, dtype=np.int64), kind="stable")
    starts_a = np.asarray(starts, dtype=np.int64)[order]
    lens_a = np.asarray(lens, dtype=np.int64)[order]
    origins_a = np.asarray(origins, dtype=np.float64)[order]
    slopes_a = np.asarray(slopes, dtype=np.float64)[order]

    ends = starts_a + lens_a
    if starts_a.size == 0 or starts_a[0] != 0 or int(ends[-1]) != n or np.any(
        starts_a[1:] != ends[:-1]
    ):
        raise CorruptArtifactError("base runs do not tile the series")
    return starts_a, lens_a, origins_a, slopes_a


def _predict_from_runs(starts, lens, origins, slopes, n: int) -> np.ndarray:
    # must match the prediction arithmetic used when residuals were computed
    return _kernels.reconstruct_from_runs(n, starts, lens, origins, slopes)


# ---------------------------------------------------------------------------
# compression
# ---------------------------------------------------------------------------

def _encode_base_section(base: KnowledgeBase, entropy_code: bool) -> bytes:
    raw = _pack_base(base)
    if entropy_code:
        return entropy.encode(np.frombuffer(raw, dtype=np.uint8), 256)
    return raw


def compress(
    x: TimeSeries,
    thresholds: ErrorThresholds,
    lam: float,
    *,
    base_entropy_coding: bool = True,
) -> CompressedArtifact:
    """Compress a series under the given threshold triple.

    The base is always present.  Residuals are included exactly when the
    target epsilon is at or below the practical base error eps_hat_max;
    otherwise the base alone already satisfies the target.
    """
    plan = plan_intervals(x, thresholds.epsilon_b, lam)
    cones = extract_semantics(x, plan)
    base = build_base(cones, x.n, eps_b=thresholds.epsilon_b, lam=lam)

    need_residuals = thresholds.epsilon <= base.eps_hat_max
    if need_residuals and thresholds.epsilon_r <= 0:
        raise ValueError(
            "epsilon_r must be positive to encode residuals; "
            "use compress_lossless for exact recovery"
        )

    base_bytes = _encode_base_section(base, base_entropy_coding)

    if need_residuals:
        r = residual_mod.compute_residuals(x, base)
        stream = residual_mod.quantize(r, thresholds.epsilon_r)
        residual_bytes = entropy.encode(stream.symbols, stream.alphabet_size)
        r_min, r_max, eps_r = stream.r_min, stream.r_max, stream.eps_r
    else:
        residual_bytes = b""
        r_min = r_max = 0.0
        eps_r = thresholds.epsilon_r

    header = ArtifactHeader(
        n=x.n,
        eps_b=thresholds.epsilon_b,
        lam=lam,
        eps_r=eps_r,
        r_min=r_min,
        r_max=r_max,
        eps_hat_max=base.eps_hat_max,
        sub_base_count=base.k,
        lossless=False,
        base_entropy_coded=base_entropy_coding,
        residuals_present=need_residuals,
        decimals=0,
        entropy_backend=ENTROPY_BACKEND_RANGE_CODER,
    )
    return CompressedArtifact(header=header, base_bytes=base_bytes, residual_bytes=residual_bytes)


def compress_lossless(
    x: TimeSeries,
    eps_b: float,
    lam: float,
    decimals: int,
    *,
    base_entropy_coding: bool = True,
) -> CompressedArtifact:
    """Exact recovery for series whose values carry `decimals` decimal places.

    Residuals are quantized at half the value grid (eps_r = 10^-decimals / 2)
    and reconstruction rounds back onto the grid, which reproduces every
    input bit.  Values that are not exact at the stated precision are
    rejected up front.
    """
    if decimals < 0 or decimals > 17:
        raise ValueError(f"decimals must be in [0, 17], got {decimals}")
    rounded = np.round(x.values, decimals)
    bad = np.flatnonzero(rounded != x.values)
    if bad.size:
        shown = ", ".join(str(int(i)) for i in bad[:10])
        more = f" (+{bad.size - 10} more)" if bad.size > 10 else ""
        raise ValueError(
            f"{bad.size} value(s) are not exact at {decimals} decimals: indices {shown}{more}"
        )
    eps_r = (10.0 ** (-decimals)) / 2.0
    thresholds = ErrorThresholds(epsilon=eps_r, epsilon_b=eps_b, epsilon_r=eps_r)
    artifact = compress(x, thresholds, lam, base_entropy_coding=base_entropy_coding)
    header = replace(artifact.header, lossless=True, decimals=decimals)
    return CompressedArtifact(
        header=header,
        base_bytes=artifact.base_bytes,
        residual_bytes=artifact.residual_bytes,
    )


# ---------------------------------------------------------------------------
# decompression
# ---------------------------------------------------------------------------

def _decode_base_runs(artifact: CompressedArtifact):
    h = artifact.header
    if h.sub_base_count > h.n:
        raise CorruptArtifactError(
            f"header claims {h.sub_base_count} sub-bases for {h.n} points"
        )
    raw = artifact.base_bytes
    if h.base_entropy_coded:
        if len(raw) < entropy.HEADER_SIZE:
            raise CorruptArtifactError("entropy-coded base section too short")
        count = struct.unpack_from("<I", raw)[0]
        if count > 64 * h.n + 64:
            raise CorruptArtifactError(
                f"base section claims {count} bytes for {h.n} points"
            )
        try:
            decoded = entropy.decode(raw, count, 256)
        except CorruptStreamError as exc:
            raise CorruptArtifactError(f"base section: {exc}") from exc
        raw = decoded.astype(np.uint8).tobytes()
    return _unpack_base(raw, h.sub_base_count, h.n)


def decompress(artifact: CompressedArtifact, at_epsilon="stored") -> TimeSeries:
    """Reconstruct a series from base plus (possibly requantized) residuals.

    ``at_epsilon`` is either "stored" (finest available resolution) or a
    float target error; coarser targets are served by requantizing the
    residual stream, finer-than-stored targets are refused.  Exact-recovery
    rounding applies only when serving "stored" from a lossless artifact;
    numeric targets are served as plain lossy reconstructions.
    """
    h = artifact.header
    starts, lens, origins, slopes = _decode_base_runs(artifact)
    values = _predict_from_runs(starts, lens, origins, slopes, h.n)

    serve_stored = isinstance(at_epsilon, str)
    if serve_stored:
        if at_epsilon != "stored":
            raise ValueError(f"at_epsilon must be a float or 'stored', got {at_epsilon!r}")
    elif not h.residuals_present:
        if at_epsilon < h.eps_hat_max:
            raise ValueError(
                f"artifact stores the base only (error {h.eps_hat_max:.6g}); "
                f"cannot serve epsilon={at_epsilon}"
            )
    elif at_epsilon < h.eps_r:
        raise ValueError(
            f"requested epsilon {at_epsilon} is finer than the stored step {h.eps_r}"
        )

    if h.residuals_present:
        try:
            symbols = entropy.decode(
                artifact.residual_bytes,
                h.n,
                _residual_alphabet(h.r_min, h.r_max, h.eps_r),
            )
        except CorruptStreamError as exc:
            raise CorruptArtifactError(f"residual section: {exc}") from exc
        stream = residual_mod.ResidualStream(
            symbols=symbols, r_min=h.r_min, r_max=h.r_max, eps_r=h.eps_r
        )
        if not serve_stored and at_epsilon > h.eps_r:
            stream = residual_mod.requantize(stream, at_epsilon)
        values = values + residual_mod.dequantize(stream)

    if h.lossless and serve_stored:
        values = np.round(values, h.decimals)
    return TimeSeries(values=values, name="reconstructed")


def _residual_alphabet(r_min: float, r_max: float, eps_r: float) -> int:
    return int(math.floor((r_max - r_min) / eps_r)) + 1


# ---------------------------------------------------------------------------
# container serialization
# ---------------------------------------------------------------------------

def _pack_section(payload: bytes) -> bytes:
    return struct.pack("<I", len(payload)) + payload + struct.pack("<I", zlib.crc32(payload))


def _read_section(data: bytes, pos: int, name: str) -> tuple[bytes, int]:
    if pos + 4 > len(data):
        raise CorruptArtifactError(f"container truncated before {name} section length")
    (length,) = struct.unpack_from("<I", data, pos)
    pos += 4
    if pos + length + 4 > len(data):
        raise CorruptArtifactError(f"container truncated inside {name} section")
    payload = data[pos : pos + length]
    pos += length
    (crc,) = struct.unpack_from("<I", data, pos)
    pos += 4
    if crc != zlib.crc32(payload):
        raise CorruptArtifactError(f"{name} section checksum mismatch")
    return payload, pos


def serialize(artifact: CompressedArtifact) -> bytes:
    h = artifact.header
    flags = (
        (_FLAG_LOSSLESS if h.lossless else 0)
        | (_FLAG_BASE_CODED if h.base_entropy_coded else 0)
        | (_FLAG_RESIDUALS if h.residuals_present else 0)
    )
    fixed = _FIXED.pack(
        MAGIC,
        flags,
        h.decimals,
        h.entropy_backend,
        h.n,
        h.eps_b,
        h.lam,
        h.eps_r,
        h.r_min,
        h.r_max,
        h.eps_hat_max,
        h.sub_base_count,
    )
    fixed += struct.pack("<I", zlib.crc32(fixed))
    assert len(fixed) == FIXED_HEADER_SIZE
    return fixed + _pack_section(artifact.base_bytes) + _pack_section(artifact.residual_bytes)


def deserialize(data: bytes) -> CompressedArtifact:
    if len(data) < FIXED_HEADER_SIZE:
        raise CorruptArtifactError(
            f"container too short: {len(data)} bytes, fixed header is {FIXED_HEADER_SIZE}"
        )
    (
        magic,
        flags,
        decimals,
        backend,
        n,
        eps_b,
        lam,
        eps_r,
        r_min,
        r_max,
        eps_hat_max,
        k,
    ) = _FIXED.unpack_from(data)
    if magic != MAGIC:
        raise CorruptArtifactError(f"bad magic {magic!r}, expected {MAGIC!r}")
    (header_crc,) = struct.unpack_from("<I", data, _FIXED.size)
    if header_crc != zlib.crc32(data[: _FIXED.size]):
        raise CorruptArtifactError("header checksum mismatch")
    if backend != ENTROPY_BACKEND_RANGE_CODER:
        raise CorruptArtifactError(f"unknown entropy backend id {backend}")
    pos = FIXED_HEADER_SIZE
    base_bytes, pos = _read_section(data, pos, "base")
    residual_bytes, pos = _read_section(data, pos, "residual")
    if pos != len(data):
        raise CorruptArtifactError(f"{len(data) - pos} trailing byte(s) after container")

    header = ArtifactHeader(
        n=n,
        eps_b=eps_b,
        lam=lam,
        eps_r=eps_r,
        r_min=r_min,
        r_max=r_max,
        eps_hat_max=eps_hat_max,
        sub_base_count=k,
        lossless=bool(flags & _FLAG_LOSSLESS),
        base_entropy_coded=bool(flags & _FLAG_BASE_CODED),
        residuals_present=bool(flags & _FLAG_RESIDUALS),
        decimals=decimals,
        entropy_backend=backend,
    )
    if header.residuals_present and not residual_bytes:
        raise CorruptArtifactError("residuals flagged present but section is empty")
    return CompressedArtifact(header=header, base_bytes=base_bytes, residual_bytes=residual_bytes)


def serialize_many(artifacts) -> bytes:
    """Trivial outer container for one artifact per column of a multivariate input."""
    out = bytearray(MULTI_MAGIC)
    out += struct.pack("<I", len(artifacts))
    for artifact in artifacts:
        blob = serialize(artifact)
        out += struct.pack("<Q", len(blob))
        out += blob
    return bytes(out)


def deserialize_many(data: bytes) -> list[CompressedArtifact]:
    if len(data) < 9 or data[:5] != MULTI_MAGIC:
        raise CorruptArtifactError("not a multi-series container")
    (count,) = struct.unpack_from("<I", data, 5)
    pos = 9
    artifacts = []
    for _ in range(count):
        if pos + 8 > len(data):
            raise CorruptArtifactError("multi-series container truncated")
        (length,) = struct.unpack_from("<Q", data, pos)
        pos += 8
        artifacts.append(deserialize(data[pos : pos + length]))
        pos += length
    if pos != len(data):
        raise CorruptArtifactError("trailing bytes after multi-series container")
    return artifacts
