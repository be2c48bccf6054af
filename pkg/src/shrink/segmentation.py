"""Fluctuation-scored interval planning and shrinking-cone extraction.

The series is split into windows of a default length L driven by the
hyperparameter lambda; each window's local range yields a fluctuation
score beta = delta_i / delta, which adapts the quantization step used
for cone origins inside that window.  Extraction itself is a single
greedy scan: a cone's slope interval is intersected with each incoming
point's admissible slopes and the cone closes when the interval empties.
Interval boundaries never force a close; a cone keeps the threshold of
the window its origin fell in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .model import Cone, TimeSeries

__all__ = [
    "IntervalPlan",
    "adaptive_step",
    "quantize_origin",
    "plan_intervals",
    "extract_semantics",
]

_EXP_SHIFT = 2.0 / 3.0


@dataclass(frozen=True)
class IntervalPlan:
    """Window layout plus per-window fluctuation scores and thresholds."""

    n: int
    default_len: int
    delta_global: float
    starts: np.ndarray   # window start indices
    lens: np.ndarray     # window lengths
    deltas: np.ndarray   # local value ranges
    betas: np.ndarray    # deltas / delta_global (0 when delta_global == 0)
    eps_hats: np.ndarray # adaptive thresholds per window

    def __post_init__(self):
        for name in ("starts", "lens"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=np.int64))
        for name in ("deltas", "betas", "eps_hats"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=np.float64))

    def __len__(self) -> int:
        return int(self.starts.size)

    def eps_hat_per_point(self) -> np.ndarray:
        """Expand window thresholds to one value per sample."""
        return np.repeat(self.eps_hats, self.lens)

    def rows(self):
        """(start, len, delta_i, beta, eps_hat) per window."""
        return list(
            zip(
                self.starts.tolist(),
                self.lens.tolist(),
                self.deltas.tolist(),
                self.betas.tolist(),
                self.eps_hats.tolist(),
            )
        )


def adaptive_step(eps_b: float, beta: float) -> float:
    """Threshold for a window with fluctuation beta: eps_b * e^(2/3 - beta)."""
    if eps_b <= 0:
        raise ValueError(f"eps_b must be positive, got {eps_b}")
    if beta < 0:
        raise ValueError(f"beta must be non-negative, got {beta}")
    return eps_b * math.exp(_EXP_SHIFT - beta)


def quantize_origin(v: float, eps_hat: float) -> float:
    """Snap v down onto the eps_hat grid: floor(v / eps_hat) * eps_hat.

    The result never exceeds v (corrected when the division rounds up
    across a grid line); v < result + eps_hat holds up to one ulp of the
    grid arithmetic when v sits essentially on a grid line.
    """
    if eps_hat <= 0:
        raise ValueError(f"eps_hat must be positive, got {eps_hat}")
    k = math.floor(v / eps_hat)
    origin = k * eps_hat
    if origin > v:
        origin = (k - 1) * eps_hat
    return origin


def default_interval_length(n: int, eps_b: float, lam: float, delta: float) -> int:
    """Default window length L = clamp(floor(lam * n / (eps_b/delta)), 2, n).

    With lam equal to the relative threshold eps_b/delta this degenerates to
    a single whole-series window; constant series (delta == 0) also get one
    window since fluctuation is undefined there.
    """
    if delta <= 0:
        return max(2, n)
    eps_rel = eps_b / delta
    raw = math.floor(lam * n / eps_rel)
    return max(2, min(n, raw))


def plan_intervals(
    x: TimeSeries, eps_b: float, lam: float, *, adaptive: bool = True
) -> IntervalPlan:
    """Partition [0, n) into consecutive windows and score each one.

    With adaptive=False every window keeps the flat threshold eps_b; the
    layout is still computed so extraction runs identically otherwise.
    """
    if eps_b <= 0:
        raise ValueError(f"eps_b must be positive, got {eps_b}")
    if not (0 < lam <= 1):
        raise ValueError(f"lambda must be in (0, 1], got {lam}")
    values = x.values
    n = values.size
    delta = float(values.max() - values.min())
    L = default_interval_length(n, eps_b, lam, delta)

    starts = np.arange(0, n, L, dtype=np.int64)
    lens = np.minimum(starts + L, n) - starts

    # per-window peak-to-peak via reduceat (last, possibly shorter, window included)
    maxs = np.maximum.reduceat(values, starts)
    mins = np.minimum.reduceat(values, starts)
    deltas = maxs - mins
    betas = deltas / delta if delta > 0 else np.zeros_like(deltas)
    if adaptive:
        eps_hats = eps_b * np.exp(_EXP_SHIFT - betas)
    else:
        eps_hats = np.full_like(betas, eps_b)

    return IntervalPlan(
        n=n,
        default_len=L,
        delta_global=delta,
        starts=starts,
        lens=lens,
        deltas=deltas,
        betas=betas,
        eps_hats=eps_hats,
    )


def extract_semantics(x: TimeSeries, plan: IntervalPlan) -> list[Cone]:
    """Run the greedy cone scan over the planned windows.

    Returns cones in index order, covering [0, n) exactly.
    """
    if plan.n != x.n:
        raise ValueError(f"plan covers {plan.n} points, series has {x.n}")
    eps_pp = plan.eps_hat_per_point()
    starts, lengths, origins, lo, hi, eps_used, q = _kernels.extract_cones(
        x.values, eps_pp
    )
    return [
        Cone(
            origin=float(origins[i]),
            span_lo=float(lo[i]),
            span_hi=float(hi[i]),
            start=int(starts[i]),
            length=int(lengths[i]),
            eps_hat=float(eps_used[i]),
        )
        for i in range(q)
    ]
