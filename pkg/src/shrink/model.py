"""Domain types and error/size accounting shared by the whole codec.

Everything here is an immutable value object: series, threshold triples,
cones, sub-bases, knowledge bases, residual streams and the compressed
container. Validation happens at construction; after that instances are
safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "TimeSeries",
    "ErrorThresholds",
    "Cone",
    "SubBase",
    "KnowledgeBase",
    "ResidualStream",
    "CompressedArtifact",
    "max_abs_error",
    "compression_ratio",
]


def _as_float_array(values) -> np.ndarray:
    # own copy, frozen: instances really are safe to share between threads
    arr = np.array(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"series values must be 1-D, got shape {arr.shape}")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class TimeSeries:
    """A univariate series sampled at implicit regular timestamps.

    Timestamps are never stored: sample i lives at time ``start_index + i``.
    ``decimals`` records the maximum decimal precision observed when the
    series was parsed from text (None when unknown); exact-recovery mode
    relies on it.
    """

    values: np.ndarray
    start_index: int = 0
    name: str = ""
    decimals: int | None = None

    def __post_init__(self):
        arr = _as_float_array(self.values)
        object.__setattr__(self, "values", arr)
        if arr.size < 1:
            raise ValueError("series must contain at least one sample")
        if not np.all(np.isfinite(arr)):
            bad = int(np.flatnonzero(~np.isfinite(arr))[0])
            raise ValueError(f"series contains non-finite value at index {bad}")

    def __len__(self) -> int:
        return int(self.values.size)

    @property
    def n(self) -> int:
        return int(self.values.size)

    @property
    def value_range(self) -> float:
        """Peak-to-peak range of the values (0 for constant series)."""
        return float(self.values.max() - self.values.min())

    def nbytes_raw(self) -> int:
        """Size of the uncompressed series: 8 bytes per float64 sample."""
        return 8 * self.n


@dataclass(frozen=True)
class ErrorThresholds:
    """The threshold triple driving compression.

    epsilon   -- target maximum absolute reconstruction error
    epsilon_b -- default quantization step for semantics extraction (> 0)
    epsilon_r -- residual quantization step, epsilon_r <= epsilon
    """

    epsilon: float
    epsilon_b: float
    epsilon_r: float

    def __post_init__(self):
        if not np.isfinite(self.epsilon) or self.epsilon < 0:
            raise ValueError(f"epsilon must be finite and >= 0, got {self.epsilon}")
        if not np.isfinite(self.epsilon_b) or self.epsilon_b <= 0:
            raise ValueError(f"epsilon_b must be finite and > 0, got {self.epsilon_b}")
        if not np.isfinite(self.epsilon_r) or self.epsilon_r < 0:
            raise ValueError(f"epsilon_r must be finite and >= 0, got {self.epsilon_r}")
        if self.epsilon_r > self.epsilon:
            raise ValueError(
                f"epsilon_r ({self.epsilon_r}) must not exceed epsilon ({self.epsilon})"
            )


@dataclass(frozen=True)
class Cone:
    """One extracted linear-trend unit: origin value plus a slope interval.

    Every slope s in [span_lo, span_hi] approximates all covered points
    within eps_hat: |origin + s*(t - start) - v_t| <= eps_hat.  A cone that
    captured only its origin point stores span_lo == span_hi == 0.0 and the
    origin alone reconstructs it.
    """

    origin: float
    span_lo: float
    span_hi: float
    start: int
    length: int
    eps_hat: float

    def __post_init__(self):
        if self.length < 1:
            raise ValueError("cone must cover at least one point")
        if self.length >= 2 and self.span_lo > self.span_hi:
            raise ValueError(
                f"empty slope span [{self.span_lo}, {self.span_hi}] on cone of length {self.length}"
            )
        if self.eps_hat <= 0:
            raise ValueError("cone threshold must be positive")

    @property
    def stop(self) -> int:
        return self.start + self.length


@dataclass(frozen=True)
class SubBase:
    """Cones merged under one origin: intersected span, one chosen slope.

    ``starts`` lists (start_index, length) for every merged cone, sorted by
    start index with disjoint covered ranges.
    """

    origin: float
    span_lo: float
    span_hi: float
    slope: float
    starts: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.span_lo > self.span_hi:
            raise ValueError("sub-base span is empty")
        if not (self.span_lo <= self.slope <= self.span_hi):
            raise ValueError(
                f"slope {self.slope} escapes span [{self.span_lo}, {self.span_hi}]"
            )
        if not self.starts:
            raise ValueError("sub-base must cover at least one cone")
        starts = tuple((int(s), int(l)) for s, l in self.starts)
        object.__setattr__(self, "starts", starts)
        prev_end = None
        for s, l in starts:
            if l < 1:
                raise ValueError("zero-length run in sub-base")
            if prev_end is not None and s < prev_end:
                raise ValueError("sub-base runs overlap or are unsorted")
            prev_end = s + l

    @property
    def n_points(self) -> int:
        return sum(l for _, l in self.starts)


@dataclass(frozen=True)
class KnowledgeBase:
    """The data-level compressed core: all sub-bases covering [0, n).

    eps_hat_max is the largest adaptive threshold actually used by any
    cone; it is the practical base error of the whole representation.
    """

    sub_bases: tuple[SubBase, ...]
    n: int
    eps_b: float
    lam: float
    eps_hat_max: float

    def __post_init__(self):
        object.__setattr__(self, "sub_bases", tuple(self.sub_bases))
        covered = sorted(
            (s, l) for sb in self.sub_bases for (s, l) in sb.starts
        )
        pos = 0
        for s, l in covered:
            if s != pos:
                raise ValueError(f"coverage gap or overlap at index {pos} (run starts at {s})")
            pos += l
        if pos != self.n:
            raise ValueError(f"sub-bases cover {pos} points, series has {self.n}")
        limit = self.eps_b * float(np.exp(2.0 / 3.0))
        if self.eps_hat_max > limit * (1 + 1e-12):
            raise ValueError(
                f"eps_hat_max {self.eps_hat_max} exceeds eps_b*e^(2/3) = {limit}"
            )

    @property
    def k(self) -> int:
        return len(self.sub_bases)


@dataclass(frozen=True)
class ResidualStream:
    """Quantized residual symbols plus the bounds needed to invert them."""

    symbols: np.ndarray
    r_min: float
    r_max: float
    eps_r: float

    def __post_init__(self):
        sym = np.asarray(self.symbols, dtype=np.int64)
        object.__setattr__(self, "symbols", sym)
        if self.eps_r <= 0:
            raise ValueError("residual step must be positive")
        if self.r_max < self.r_min:
            raise ValueError("r_max below r_min")
        if sym.size and int(sym.min()) < 0:
            raise ValueError("negative residual symbol")
        if sym.size and int(sym.max()) > self.alphabet_size - 1:
            raise ValueError("residual symbol exceeds alphabet bound")

    @property
    def alphabet_size(self) -> int:
        """Number of admissible symbols: floor((r_max - r_min)/eps_r) + 1."""
        return int(np.floor((self.r_max - self.r_min) / self.eps_r)) + 1

    def __len__(self) -> int:
        return int(self.symbols.size)

    def __eq__(self, other):
        if not isinstance(other, ResidualStream):
            return NotImplemented
        return (
            self.r_min == other.r_min
            and self.r_max == other.r_max
            and self.eps_r == other.eps_r
            and np.array_equal(self.symbols, other.symbols)
        )


@dataclass(frozen=True)
class ArtifactHeader:
    """Codec parameters and series metadata carried by every container."""

    n: int
    eps_b: float
    lam: float
    eps_r: float
    r_min: float
    r_max: float
    eps_hat_max: float
    sub_base_count: int
    lossless: bool = False
    base_entropy_coded: bool = True
    residuals_present: bool = True
    decimals: int = 0
    entropy_backend: int = 0


@dataclass(frozen=True)
class CompressedArtifact:
    """Header plus the two serialized sections; decodable with no external state.

    s_b / s_r are the byte sizes entering the compression ratio: each section's
    payload plus its 8-byte framing share (length word + checksum).
    """

    header: ArtifactHeader
    base_bytes: bytes
    residual_bytes: bytes

    _SECTION_OVERHEAD = 8  # u32 length + u32 crc per section

    @property
    def s_b(self) -> int:
        return len(self.base_bytes) + self._SECTION_OVERHEAD

    @property
    def s_r(self) -> int:
        return len(self.residual_bytes) + self._SECTION_OVERHEAD

    @property
    def total_size(self) -> int:
        return self.s_b + self.s_r


def max_abs_error(original: TimeSeries, reconstructed: TimeSeries) -> float:
    """Largest absolute pointwise deviation between two equal-length series."""
    a = original.values
    b = reconstructed.values
    if a.size != b.size:
        raise ValueError(f"length mismatch: {a.size} vs {b.size}")
    return float(np.max(np.abs(b - a)))


def compression_ratio(original_bytes: int, artifact: CompressedArtifact) -> float:
    """Original size over compressed size (base + residuals); higher is better."""
    if original_bytes <= 0:
        raise ValueError("original size must be positive")
    denom = artifact.s_b + artifact.s_r
    if denom <= 0:
        raise ValueError("compressed size must be positive")
    return original_bytes / denom
