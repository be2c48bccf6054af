"""Independent brute-force oracles the tests check the fast paths against.

Nothing here shares code with the library's implementations: the segmenter
re-derives feasibility from scratch per prefix, the group partitioner
enumerates submask covers, and the entropy helper is plain counting.
"""

from __future__ import annotations

import math

import numpy as np


def brute_force_segments(values: np.ndarray, eps: float) -> list[tuple[int, int]]:
    """Greedy maximal fixed-threshold PLA segmentation, checked from scratch.

    For each candidate extension the full prefix feasibility is recomputed:
    a segment [s, t] is feasible iff some slope keeps every covered point
    within eps of the line anchored at the floor-quantized first value.
    Returns (start, length) pairs.
    """
    n = len(values)
    segments = []
    s = 0
    while s < n:
        origin = math.floor(values[s] / eps) * eps
        t = s + 1
        while t < n:
            dts = np.arange(1, t - s + 1, dtype=np.float64)
            pts = values[s + 1 : t + 1]
            lows = (pts - eps - origin) / dts
            highs = (pts + eps - origin) / dts
            if np.max(lows) > np.min(highs):
                break
            t += 1
        segments.append((s, t - s))
        s = t
    return segments


def min_interval_groups(spans: list[tuple[float, float]]) -> int:
    """Minimum number of groups of pairwise-intersecting intervals.

    Exact subset-DP: a group is valid iff its members share a common point
    (max of lows <= min of highs).  Exponential; fine for <= ~12 spans.
    """
    m = len(spans)
    if m == 0:
        return 0
    valid = [False] * (1 << m)
    for mask in range(1, 1 << m):
        lo = max(spans[i][0] for i in range(m) if mask >> i & 1)
        hi = min(spans[i][1] for i in range(m) if mask >> i & 1)
        valid[mask] = lo <= hi
    best = [m + 1] * (1 << m)
    best[0] = 0
    for mask in range(1, 1 << m):
        sub = mask
        while sub:
            if valid[sub] and best[mask ^ sub] + 1 < best[mask]:
                best[mask] = best[mask ^ sub] + 1
            sub = (sub - 1) & mask
    return best[(1 << m) - 1]


def order0_entropy_bits(symbols: np.ndarray) -> float:
    """Empirical order-0 entropy of a symbol stream, in total bits."""
    if len(symbols) == 0:
        return 0.0
    counts = np.bincount(np.asarray(symbols, dtype=np.int64))
    p = counts[counts > 0] / len(symbols)
    return float(-(p * np.log2(p)).sum() * len(symbols))
