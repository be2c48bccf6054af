"""Desk-scale experiment harness: ratio/growth/interval/threshold/edge benches.

Each bench returns a list of row dicts (a table); write_csv/write_json emit
them with a stable column order.  All data-dependent outputs (sizes, CRs,
symbol streams) are deterministic under the given seed; latency columns
are wall-clock measurements and naturally vary.

Cells of a parameter sweep can fan out across a thread pool; the pool size
is capped by the SHRINK_THREADS environment variable (unset or <=1 means
serial).  Result assembly is order-stable either way.
"""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import codec
from .baseline import baseline_ratio
from .model import CompressedArtifact, ErrorThresholds, TimeSeries, compression_ratio, max_abs_error
from .residual import ResidualStream, dequantize, requantize
from .segmentation import plan_intervals
from . import entropy

__all__ = [
    "NINE_RESOLUTIONS",
    "EDGE_RESOLUTIONS",
    "bench_ratio",
    "bench_growth",
    "bench_lambda",
    "bench_eps_b",
    "bench_edge",
    "verify",
    "write_csv",
    "write_json",
]

NINE_RESOLUTIONS = (0.01, 0.0075, 0.005, 0.0025, 0.001, 0.00075, 0.0005, 0.00025, 0.0001)
EDGE_RESOLUTIONS = NINE_RESOLUTIONS + (0.00001,)

DEFAULT_LAMBDA = 0.001
DEFAULT_EPS_B_PCT = 5.0


def _pool_size() -> int:
    raw = os.environ.get("SHRINK_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _map_cells(fn, cells):
    workers = _pool_size()
    if workers <= 1 or len(cells) <= 1:
        return [fn(c) for c in cells]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, cells))


def _thresholds(x: TimeSeries, eps: float, eps_b_pct: float) -> ErrorThresholds:
    rng = x.value_range
    eps_b = (eps_b_pct / 100.0) * rng if rng > 0 else eps_b_pct / 100.0
    return ErrorThresholds(epsilon=eps, epsilon_b=eps_b, epsilon_r=eps)


def _grid_for(x: TimeSeries, grid) -> list[float]:
    """Drop grid entries finer than the data's decimal precision supports."""
    grid = list(grid)
    if x.decimals is not None:
        floor = 10.0 ** (-(x.decimals + 1))
        grid = [e for e in grid if e >= floor]
    return grid


# ---------------------------------------------------------------------------
# compression-ratio sweep
# ---------------------------------------------------------------------------

def bench_ratio(
    x: TimeSeries,
    eps_grid=None,
    eps_b_pct: float = DEFAULT_EPS_B_PCT,
    lam: float = DEFAULT_LAMBDA,
) -> list[dict]:
    """CR per error resolution, plus a lossless row when precision is known."""
    grid = _grid_for(x, NINE_RESOLUTIONS if eps_grid is None else eps_grid)
    raw_bytes = x.nbytes_raw()

    def cell(eps: float) -> dict:
        t0 = time.perf_counter()
        artifact = codec.compress(x, _thresholds(x, eps, eps_b_pct), lam)
        seconds = time.perf_counter() - t0
        recon = codec.decompress(artifact)
        return {
            "series": x.name,
            "mode": "lossy",
            "epsilon": eps,
            "cr": compression_ratio(raw_bytes, artifact),
            "baseline_cr": baseline_ratio(x, eps),
            "max_error": max_abs_error(x, recon),
            "s_b": artifact.s_b,
            "s_r": artifact.s_r,
            "seconds": seconds,
            "mb_per_s": raw_bytes / 1e6 / seconds if seconds > 0 else float("inf"),
        }

    rows = _map_cells(cell, grid)

    if x.decimals is not None:
        t0 = time.perf_counter()
        rng = x.value_range
        eps_b = (eps_b_pct / 100.0) * rng if rng > 0 else eps_b_pct / 100.0
        artifact = codec.compress_lossless(x, eps_b, lam, x.decimals)
        seconds = time.perf_counter() - t0
        recon = codec.decompress(artifact)
        rows.append(
            {
                "series": x.name,
                "mode": "lossless",
                "epsilon": 0.0,
                "cr": compression_ratio(raw_bytes, artifact),
                "baseline_cr": float("nan"),
                "max_error": max_abs_error(x, recon),
                "s_b": artifact.s_b,
                "s_r": artifact.s_r,
                "seconds": seconds,
                "mb_per_s": raw_bytes / 1e6 / seconds if seconds > 0 else float("inf"),
            }
        )
    return rows


# ---------------------------------------------------------------------------
# dataset-size growth
# ---------------------------------------------------------------------------

def bench_growth(
    base_series: TimeSeries,
    copies: int = 10,
    noise_sigma: float = 0.1,
    seed: int = 0,
    eps: float = 0.001,
    eps_b_pct: float = DEFAULT_EPS_B_PCT,
    lam: float = DEFAULT_LAMBDA,
) -> list[dict]:
    """Compress growing prefixes of noise-infused replicas of one series.

    Copy k is the base series plus fresh N(0, noise_sigma) noise; prefix p
    concatenates the first p copies.  The table tracks how the base and
    residual sections grow with the data.
    """
    if copies < 1:
        raise ValueError("need at least one copy")
    rng = np.random.default_rng(seed)
    base = base_series.values
    replicas = [
        base + (rng.normal(0.0, noise_sigma, base.size) if noise_sigma > 0 else 0.0)
        for _ in range(copies)
    ]

    rows = []
    for p in range(1, copies + 1):
        values = np.concatenate(replicas[:p])
        series = TimeSeries(values=values, name=f"{base_series.name}_x{p}")
        t0 = time.perf_counter()
        artifact = codec.compress(series, _thresholds(series, eps, eps_b_pct), lam)
        seconds = time.perf_counter() - t0
        rows.append(
            {
                "prefix_copies": p,
                "n_points": series.n,
                "raw_bytes": series.nbytes_raw(),
                "total_size": artifact.total_size,
                "s_b": artifact.s_b,
                "s_r": artifact.s_r,
                "cr": compression_ratio(series.nbytes_raw(), artifact),
                "seconds": seconds,
            }
        )
    return rows


# ---------------------------------------------------------------------------
# hyperparameter sweeps
# ---------------------------------------------------------------------------

def bench_lambda(
    x: TimeSeries,
    lam_grid=(1e-5, 1e-3, 1e-1, 1.0),
    eps: float = 0.001,
    eps_b_pct: float = DEFAULT_EPS_B_PCT,
) -> list[dict]:
    """CR and latency per default-interval-length factor lambda."""

    def cell(lam: float) -> dict:
        thresholds = _thresholds(x, eps, eps_b_pct)
        plan = plan_intervals(x, thresholds.epsilon_b, lam)
        t0 = time.perf_counter()
        artifact = codec.compress(x, thresholds, lam)
        seconds = time.perf_counter() - t0
        return {
            "series": x.name,
            "lambda": lam,
            "epsilon": eps,
            "n_intervals": len(plan),
            "default_len": plan.default_len,
            "cr": compression_ratio(x.nbytes_raw(), artifact),
            "s_b": artifact.s_b,
            "s_r": artifact.s_r,
            "seconds": seconds,
            "mb_per_s": x.nbytes_raw() / 1e6 / seconds if seconds > 0 else float("inf"),
        }

    return _map_cells(cell, list(lam_grid))


def bench_eps_b(
    x: TimeSeries,
    pct_grid=(5.0, 8.0, 10.0),
    eps: float = 0.001,
    lam: float = DEFAULT_LAMBDA,
) -> list[dict]:
    """CR and latency per base threshold, expressed as percent of range."""

    def cell(pct: float) -> dict:
        t0 = time.perf_counter()
        artifact = codec.compress(x, _thresholds(x, eps, pct), lam)
        seconds = time.perf_counter() - t0
        return {
            "series": x.name,
            "eps_b_pct": pct,
            "epsilon": eps,
            "cr": compression_ratio(x.nbytes_raw(), artifact),
            "s_b": artifact.s_b,
            "s_r": artifact.s_r,
            "seconds": seconds,
            "mb_per_s": x.nbytes_raw() / 1e6 / seconds if seconds > 0 else float("inf"),
        }

    return _map_cells(cell, list(pct_grid))


# ---------------------------------------------------------------------------
# edge-serving simulation
# ---------------------------------------------------------------------------

def bench_edge(
    x: TimeSeries,
    resolutions=EDGE_RESOLUTIONS,
    seed: int = 0,
    repeats: int = 3,
    eps_b_pct: float = DEFAULT_EPS_B_PCT,
    lam: float = DEFAULT_LAMBDA,
) -> dict:
    """Simulate serving one stored encoding at many error resolutions.

    The edge stores a single artifact at the finest requested resolution.
    Each request transfers the requantized residual stream for its
    resolution; the base travels once, with the first request.  Sizes are
    computed, not transmitted.
    """
    resolutions = sorted(resolutions)
    finest = resolutions[0]
    artifact = codec.compress(x, _thresholds(x, finest, eps_b_pct), lam)
    if not artifact.header.residuals_present:
        raise ValueError("edge bench needs residuals; pick a finer resolution or larger eps_b")
    mls = len(codec.serialize(artifact))

    h = artifact.header
    alphabet = int(np.floor((h.r_max - h.r_min) / h.eps_r)) + 1
    symbols = entropy.decode(artifact.residual_bytes, h.n, alphabet)
    stored = ResidualStream(symbols=symbols, r_min=h.r_min, r_max=h.r_max, eps_r=h.eps_r)

    order = np.tile(np.arange(len(resolutions)), repeats)
    np.random.default_rng(seed).shuffle(order)

    base_sent = False
    requests = []
    for req_no, idx in enumerate(order):
        eps = resolutions[int(idx)]
        t0 = time.perf_counter()
        stream = requantize(stored, eps) if eps > stored.eps_r else stored
        payload = entropy.encode(stream.symbols, stream.alphabet_size)
        seconds = time.perf_counter() - t0
        transferred = len(payload)
        if not base_sent:
            transferred += codec.FIXED_HEADER_SIZE + len(artifact.base_bytes)
            base_sent = True
        requests.append(
            {
                "request": req_no,
                "epsilon": eps,
                "transferred_bytes": transferred,
                "seconds": seconds,
            }
        )

    ats = float(np.mean([r["transferred_bytes"] for r in requests]))
    apl = float(np.mean([r["seconds"] for r in requests]))
    return {
        "mls_bytes": mls,
        "ats_bytes": ats,
        "apl_seconds": apl,
        "raw_transfer_bytes": float(x.nbytes_raw()),
        "requests": requests,
    }


# ---------------------------------------------------------------------------
# verification and table output
# ---------------------------------------------------------------------------

def verify(original: TimeSeries, artifact: CompressedArtifact, eps: float) -> dict:
    """Recompute the reconstruction error and judge it against eps."""
    recon = codec.decompress(artifact)
    err = max_abs_error(original, recon)
    worst = int(np.argmax(np.abs(recon.values - original.values)))
    return {
        "n": original.n,
        "epsilon": eps,
        "max_error": err,
        "worst_index": worst,
        "pass": bool(err <= eps),
    }


def write_csv(rows: list[dict], path: str | Path) -> None:
    import csv

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if not rows:
        path.write_text("")
        return
    with path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)


def write_json(rows, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w") as fh:
        json.dump(rows, fh, indent=2, default=float)
        fh.write("\n")
