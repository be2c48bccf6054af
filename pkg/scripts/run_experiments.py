#!/usr/bin/env python3
"""Run the desk-scale experiment battery on the synthetic stand-ins.

Writes CSV tables (and JSON mirrors) under results/.  Pass --plot to also
emit PNG charts (requires matplotlib).  Everything is seeded; rerunning
reproduces the same sizes and ratios.
"""

import argparse
import time
from pathlib import Path

from shrink import bench
from shrink.datasets import noisy_pla, power_like, random_walk, steps, windspeed_like


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="results")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--plot", action="store_true")
    parser.add_argument("--quick", action="store_true", help="smaller series for a fast pass")
    args = parser.parse_args()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    n = 20_000 if args.quick else 100_000
    t_start = time.perf_counter()

    series = [
        noisy_pla(n=n, seed=args.seed),
        random_walk(n=n, seed=args.seed),
        steps(n=n, seed=args.seed),
        windspeed_like(n=n, seed=args.seed),
    ]

    ratio_rows = []
    for x in series:
        print(f"bench-ratio: {x.name} (n={x.n})")
        ratio_rows.extend(bench.bench_ratio(x))
    bench.write_csv(ratio_rows, out / "ratio.csv")
    bench.write_json(ratio_rows, out / "ratio.json")

    print("bench-growth: power_like replication")
    growth_base = power_like(n=n, seed=args.seed, mean_run=max(500, n // 100))
    growth_rows = bench.bench_growth(
        growth_base, copies=10, noise_sigma=0.1, seed=args.seed,
        eps=1e-3, eps_b_pct=0.0167, lam=1.0,
    )
    bench.write_csv(growth_rows, out / "growth.csv")
    bench.write_json(growth_rows, out / "growth.json")

    lam_rows, epsb_rows = [], []
    for x in series:
        print(f"sweeps: {x.name}")
        lam_rows.extend(bench.bench_lambda(x))
        epsb_rows.extend(bench.bench_eps_b(x))
    bench.write_csv(lam_rows, out / "lambda.csv")
    bench.write_json(lam_rows, out / "lambda.json")
    bench.write_csv(epsb_rows, out / "eps_b.csv")
    bench.write_json(epsb_rows, out / "eps_b.json")

    print("bench-edge: steps fixture")
    edge = bench.bench_edge(steps(n=n, seed=args.seed), seed=args.seed)
    bench.write_csv(edge["requests"], out / "edge_requests.csv")
    bench.write_json({k: v for k, v in edge.items() if k != "requests"}, out / "edge_summary.json")
    print(
        f"  MLS={edge['mls_bytes']}B ATS={edge['ats_bytes']:.0f}B "
        f"APL={edge['apl_seconds'] * 1e3:.2f}ms raw={edge['raw_transfer_bytes']:.0f}B"
    )

    if args.plot:
        _plots(out, ratio_rows, growth_rows)

    print(f"done in {time.perf_counter() - t_start:.1f}s -> {out}/")


def _plots(out: Path, ratio_rows, growth_rows):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    by_series = {}
    for row in ratio_rows:
        if row["mode"] == "lossy":
            by_series.setdefault(row["series"], []).append((row["epsilon"], row["cr"]))
    for name, pts in by_series.items():
        pts.sort(reverse=True)
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=name)
    ax.set_xscale("log")
    ax.set_xlabel("error threshold")
    ax.set_ylabel("compression ratio")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out / "ratio.png", dpi=130)
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(6, 4))
    xs = [r["n_points"] for r in growth_rows]
    ax.plot(xs, [r["s_b"] for r in growth_rows], marker="s", label="base bytes")
    ax.plot(xs, [r["s_r"] for r in growth_rows], marker="o", label="residual bytes")
    ax.set_xlabel("total points")
    ax.set_ylabel("bytes")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out / "growth.png", dpi=130)
    plt.close(fig)


if __name__ == "__main__":
    main()
