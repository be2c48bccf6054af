#!/usr/bin/env python3
"""Regenerate the golden container files under tests/golden/.

Run only when the container format version changes; the point of the
goldens is that released bytes keep decoding bit-exactly.
"""

from pathlib import Path

import numpy as np

from shrink import codec
from shrink.datasets import noisy_pla, steps, windspeed_like
from shrink.model import ErrorThresholds

GOLDEN = Path(__file__).resolve().parent.parent / "tests" / "golden"


def thresholds(x, eps, pct=5.0):
    return ErrorThresholds(eps, (pct / 100) * x.value_range, eps)


def main():
    GOLDEN.mkdir(parents=True, exist_ok=True)

    cases = {}

    x = noisy_pla(n=1200, seed=101)
    cases["lossy_pla"] = (x, codec.compress(x, thresholds(x, 1e-3), 0.1))

    x = windspeed_like(n=900, seed=102)
    cases["lossless_wind"] = (x, codec.compress_lossless(x, 0.05 * x.value_range, 0.1, 2))

    x = steps(n=800, seed=103)
    cases["base_only_steps"] = (x, codec.compress(x, thresholds(x, x.value_range), 0.1))

    for name, (series, artifact) in cases.items():
        blob = codec.serialize(artifact)
        (GOLDEN / f"{name}.bin").write_bytes(blob)
        recon = codec.decompress(artifact)
        np.save(GOLDEN / f"{name}.expected.npy", recon.values)
        np.save(GOLDEN / f"{name}.original.npy", series.values)
        print(f"{name}: {len(blob)} bytes, n={series.n}")


if __name__ == "__main__":
    main()
