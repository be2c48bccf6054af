"""Seeded synthetic series used by the benchmarks and the test suite.

Desk-scale stand-ins for the series families the codec targets:

* noisy_pla       -- piecewise-linear signal (ramps + flat stretches) with
                     Gaussian measurement noise, rounded to a decimal grid.
* random_walk     -- cumulative Gaussian walk, the unstructured stress case.
* steps           -- pressure-like record: long constant runs from a small
                     value palette, occasional spikes.
* power_like      -- quasi-steady industrial signal: long runs at ~unique
                     setpoints over a wide dynamic range; the replication
                     fixture for the growth experiment.
* windspeed_like  -- gusty AR(1) process on a 2-decimal sensor grid.

Every generator is deterministic under its seed.
"""

from __future__ import annotations

import numpy as np

from .model import TimeSeries

__all__ = [
    "noisy_pla",
    "random_walk",
    "steps",
    "power_like",
    "windspeed_like",
    "make",
    "GENERATORS",
]


def noisy_pla(
    n: int = 10_000,
    seed: int = 0,
    segments: int = 20,
    amplitude: float = 1.0,
    noise: float = 0.002,
    decimals: int | None = 4,
    flat_fraction: float = 0.3,
    burst_noise: float = 0.0,
    burst_fraction: float = 0.0,
) -> TimeSeries:
    """Piecewise-linear signal plus Gaussian noise on a decimal grid.

    Knots are uniform over the index range; a `flat_fraction` share of the
    segments hold their level, the rest ramp linearly to the next knot.
    With burst_fraction > 0 that share of segments carries burst_noise
    instead of the base noise, giving the series calm and violent regions.
    """
    rng = np.random.default_rng(seed)
    segments = max(1, min(segments, n))
    knots = np.sort(rng.choice(np.arange(1, n), size=segments - 1, replace=False))
    bounds = np.concatenate([[0], knots, [n]])
    levels = rng.uniform(-amplitude, amplitude, size=bounds.size)
    values = np.empty(n, dtype=np.float64)
    sigma = np.zeros(n, dtype=np.float64)
    for i in range(bounds.size - 1):
        a, b = bounds[i], bounds[i + 1]
        if rng.random() < flat_fraction:
            values[a:b] = levels[i]
        else:
            values[a:b] = np.linspace(levels[i], levels[i + 1], b - a, endpoint=False)
        bursty = burst_fraction > 0 and rng.random() < burst_fraction
        sigma[a:b] = burst_noise if bursty else noise
    if np.any(sigma > 0):
        values = values + rng.normal(0.0, 1.0, size=n) * sigma
    if decimals is not None:
        values = np.round(values, decimals)
    return TimeSeries(values=values, name="noisy_pla", decimals=decimals)


def random_walk(n: int = 10_000, seed: int = 0, step: float = 0.01) -> TimeSeries:
    rng = np.random.default_rng(seed)
    values = np.cumsum(rng.normal(0.0, step, size=n))
    return TimeSeries(values=values, name="random_walk")


def steps(
    n: int = 10_000,
    seed: int = 0,
    mean_run: int = 800,
    levels: int = 12,
    spike_prob: float = 0.0005,
    noise: float = 0.0,
    decimals: int | None = 3,
) -> TimeSeries:
    """Pressure-like record: constant runs from a small palette, rare spikes."""
    rng = np.random.default_rng(seed)
    palette = np.round(np.linspace(0.0, 10.0, levels), 2)
    values = np.empty(n, dtype=np.float64)
    pos = 0
    while pos < n:
        run = min(int(rng.exponential(mean_run)) + 1, n - pos)
        values[pos : pos + run] = palette[rng.integers(0, levels)]
        pos += run
    spikes = rng.random(n) < spike_prob
    values[spikes] += rng.uniform(2.0, 4.0, size=int(spikes.sum()))
    if noise > 0:
        values = values + rng.normal(0.0, noise, size=n)
    if decimals is not None:
        values = np.round(values, decimals)
    return TimeSeries(values=values, name="steps", decimals=decimals)


def power_like(
    n: int = 100_000,
    seed: int = 0,
    mean_run: int = 5_000,
    low: float = 0.0,
    high: float = 1_000_000.0,
) -> TimeSeries:
    """Quasi-steady signal over a wide dynamic range, ~unique setpoints.

    Each run holds one uniform draw from [low, high); run lengths are
    exponential with a floor of 50 samples.  Replicating this series with
    small additive noise exercises the knowledge base's pattern reuse.
    """
    rng = np.random.default_rng(seed)
    values = np.empty(n, dtype=np.float64)
    pos = 0
    while pos < n:
        run = min(int(rng.exponential(mean_run)) + 50, n - pos)
        values[pos : pos + run] = rng.uniform(low, high)
        pos += run
    return TimeSeries(values=values, name="power_like")


def windspeed_like(n: int = 10_000, seed: int = 0, decimals: int = 2) -> TimeSeries:
    """Gusty AR(1) process rounded to a 2-decimal sensor grid."""
    rng = np.random.default_rng(seed)
    steps_arr = rng.normal(0.0, 0.08, size=n) + 0.025
    level = 5.0
    out = np.empty(n, dtype=np.float64)
    for i in range(n):
        level = 0.995 * level + steps_arr[i]
        out[i] = level
    out = np.round(np.abs(out), decimals)
    return TimeSeries(values=out, name="windspeed_like", decimals=decimals)


GENERATORS = {
    "noisy_pla": noisy_pla,
    "random_walk": random_walk,
    "steps": steps,
    "power_like": power_like,
    "windspeed_like": windspeed_like,
}


def make(name: str, **kwargs) -> TimeSeries:
    """Build a registered synthetic series by name."""
    try:
        gen = GENERATORS[name]
    except KeyError:
        known = ", ".join(sorted(GENERATORS))
        raise ValueError(f"unknown synthetic series {name!r}; known: {known}") from None
    return gen(**kwargs)
