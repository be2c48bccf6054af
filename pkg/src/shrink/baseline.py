"""Reference point for benchmarks: uniform scalar quantization + range coder.

This is the deliberately structure-blind comparison: quantize the raw
values on a uniform grid of step epsilon and entropy-code the symbols.
Midpoint reconstruction bounds the error by epsilon/2, matching the
error the codec itself delivers when its residual step equals epsilon,
so the two sides compete on equal accuracy.
"""

from __future__ import annotations

import math

import numpy as np

from . import entropy
from .model import TimeSeries

__all__ = ["quantize_uniform", "reconstruct_uniform", "baseline_compress", "baseline_ratio"]

_HEADER_BYTES = 24  # v_min, step, count -- what a minimal container would carry


def quantize_uniform(x: TimeSeries, eps: float) -> tuple[np.ndarray, float, float]:
    """Symbols on the uniform grid, plus (v_min, step) needed to invert them."""
    if eps <= 0:
        raise ValueError(f"epsilon must be positive, got {eps}")
    step = eps
    v_min = float(x.values.min())
    symbols = np.floor((x.values - v_min) / step).astype(np.int64)
    return symbols, v_min, step


def reconstruct_uniform(symbols: np.ndarray, v_min: float, step: float, v_max: float) -> np.ndarray:
    mid = v_min + (symbols.astype(np.float64) + 0.5) * step
    return np.clip(mid, v_min, v_max)


def baseline_compress(x: TimeSeries, eps: float) -> bytes:
    """Entropy-coded uniform quantization of the raw series."""
    symbols, v_min, step = quantize_uniform(x, eps)
    v_max = float(x.values.max())
    alphabet = int(math.floor((v_max - v_min) / step)) + 1
    return entropy.encode(symbols, alphabet)


def baseline_ratio(x: TimeSeries, eps: float) -> float:
    """Compression ratio of the uniform-quantization baseline at error eps."""
    compressed = len(baseline_compress(x, eps)) + _HEADER_BYTES
    return x.nbytes_raw() / compressed
