"""Per-point residuals against candidate lines, and their (re)quantization.

Residuals are quantized with a floor rule onto [0, floor((r+ - r-)/eps_r)]
and reconstructed at bin midpoints (clamped to the true residual range),
so the round-trip error is at most eps_r / 2 up to float rounding; the
codec's error budget keeps a factor-2 margin (eps_r <= epsilon) precisely
so that slop never threatens the user-facing bound.  Requantizing to a coarser
step operates on the midpoint-dequantized values, which makes it
bit-identical to quantizing those values directly -- the oracle used by
the multiresolution tests.
"""

from __future__ import annotations

import numpy as np

from ._kernels import candidate_line_residuals, floor_quantize, reconstruct_from_runs
from .model import KnowledgeBase, ResidualStream, TimeSeries

__all__ = ["compute_residuals", "quantize", "dequantize", "requantize", "flatten_segments"]


def flatten_segments(base: KnowledgeBase) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """All (start, length, origin, slope) runs of a base, sorted by start."""
    rows = [
        (s, l, sb.origin, sb.slope)
        for sb in base.sub_bases
        for (s, l) in sb.starts
    ]
    rows.sort()
    starts = np.array([r[0] for r in rows], dtype=np.int64)
    lens = np.array([r[1] for r in rows], dtype=np.int64)
    origins = np.array([r[2] for r in rows], dtype=np.float64)
    slopes = np.array([r[3] for r in rows], dtype=np.float64)
    return starts, lens, origins, slopes


def predict(base: KnowledgeBase) -> np.ndarray:
    """The base's candidate-line value at every index in [0, n)."""
    starts, lens, origins, slopes = flatten_segments(base)
    return reconstruct_from_runs(base.n, starts, lens, origins, slopes)


def compute_residuals(x: TimeSeries, base: KnowledgeBase) -> np.ndarray:
    """v_t minus the candidate-line prediction, for every point."""
    if base.n != x.n:
        raise ValueError(f"base covers {base.n} points, series has {x.n}")
    starts, lens, origins, slopes = flatten_segments(base)
    return candidate_line_residuals(x.values, starts, lens, origins, slopes)


def quantize(r: np.ndarray, eps_r: float) -> ResidualStream:
    """Floor-quantize residuals: symbol_i = floor((r_i - r_min) / eps_r)."""
    if eps_r <= 0:
        raise ValueError(f"eps_r must be positive, got {eps_r}")
    r = np.ascontiguousarray(r, dtype=np.float64)
    if r.size == 0:
        raise ValueError("no residuals to quantize")
    r_min = float(r.min())
    r_max = float(r.max())
    symbols = floor_quantize(r, r_min, eps_r)
    return ResidualStream(symbols=symbols, r_min=r_min, r_max=r_max, eps_r=eps_r)


def dequantize(stream: ResidualStream) -> np.ndarray:
    """Bin-midpoint reconstruction, clamped to [r_min, r_max]."""
    mid = stream.r_min + (stream.symbols.astype(np.float64) + 0.5) * stream.eps_r
    return np.clip(mid, stream.r_min, stream.r_max)


def requantize(stream: ResidualStream, coarser_eps_r: float) -> ResidualStream:
    """Re-express a stream at a coarser step without touching original data."""
    if coarser_eps_r < stream.eps_r:
        raise ValueError(
            f"cannot refine: requested step {coarser_eps_r} is finer than stored {stream.eps_r}"
        )
    if coarser_eps_r == stream.eps_r:
        return stream
    return quantize(dequantize(stream), coarser_eps_r)
