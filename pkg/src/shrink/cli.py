"""Command-line harness: compress/decompress/verify plus the experiment benches.

Inputs are file paths (CSV or UCR-style TSV, see --format/--column) or
synthetic specs of the form ``synth:NAME[:key=value...]``, e.g.
``synth:noisy_pla:n=20000:seed=1``.  Registered names: noisy_pla,
random_walk, steps, power_like, windspeed_like.

Table schemas (CSV columns / JSON keys):
  bench-ratio   series,mode,epsilon,cr,baseline_cr,max_error,s_b,s_r,seconds,mb_per_s
  bench-growth  prefix_copies,n_points,raw_bytes,total_size,s_b,s_r,cr,seconds
  bench-lambda  series,lambda,epsilon,n_intervals,default_len,cr,s_b,s_r,seconds,mb_per_s
  bench-epsb    series,eps_b_pct,epsilon,cr,s_b,s_r,seconds,mb_per_s
  bench-edge    summary keys mls_bytes,ats_bytes,apl_seconds,raw_transfer_bytes
                plus per-request rows request,epsilon,transferred_bytes,seconds

SHRINK_THREADS caps the worker pool used for parameter sweeps.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import bench, codec
from .ingest import load_input
from .model import ErrorThresholds

__all__ = ["main"]


def _add_input_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("input", help="data file path or synth:NAME[:key=value...] spec")
    p.add_argument("--format", choices=("csv", "ucr-tsv"), default="csv")
    p.add_argument("--column", type=int, default=0, help="csv column / ucr row selector")


def _add_threshold_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--epsilon", type=float, default=0.001, help="target max absolute error")
    p.add_argument(
        "--epsilon-b-pct",
        type=float,
        default=bench.DEFAULT_EPS_B_PCT,
        help="base threshold as percent of the value range "
             "(5 favors semantics fidelity, 15 favors raw compression)",
    )
    p.add_argument("--epsilon-r", type=float, default=None, help="residual step (default: epsilon)")
    p.add_argument("--lambda", dest="lam", type=float, default=bench.DEFAULT_LAMBDA)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shrink",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compress", help="compress a series into a container file")
    _add_input_args(p)
    _add_threshold_args(p)
    p.add_argument("--lossless", action="store_true", help="exact recovery at the detected precision")
    p.add_argument("--decimals", type=int, default=None, help="override detected decimal precision")
    p.add_argument("--out", required=True, help="output container path")

    p = sub.add_parser("decompress", help="reconstruct a series from a container file")
    p.add_argument("artifact", help="container path")
    p.add_argument("--at-epsilon", default="stored", help="'stored' or a coarser error target")
    p.add_argument("--out", required=True, help="output CSV path (one value per line)")

    p = sub.add_parser("verify", help="check a container against the original series")
    _add_input_args(p)
    p.add_argument("artifact", help="container path")
    p.add_argument("--epsilon", type=float, required=True)

    p = sub.add_parser("bench-ratio", help="compression ratio across error resolutions")
    _add_input_args(p)
    p.add_argument("--epsilon-b-pct", type=float, default=bench.DEFAULT_EPS_B_PCT)
    p.add_argument("--lambda", dest="lam", type=float, default=bench.DEFAULT_LAMBDA)
    p.add_argument("--grid", type=float, nargs="*", default=None, help="override the nine default resolutions")
    p.add_argument("--seed", type=int, default=0, help="accepted for interface uniformity; this sweep is deterministic")
    _add_output_args(p)

    p = sub.add_parser("bench-growth", help="base/residual size growth under replication")
    _add_input_args(p)
    p.add_argument("--copies", type=int, default=10)
    p.add_argument("--noise-sigma", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epsilon", type=float, default=0.001)
    p.add_argument("--epsilon-b-pct", type=float, default=bench.DEFAULT_EPS_B_PCT)
    p.add_argument("--lambda", dest="lam", type=float, default=bench.DEFAULT_LAMBDA)
    _add_output_args(p)

    p = sub.add_parser("bench-lambda", help="interval-length factor sweep")
    _add_input_args(p)
    p.add_argument("--grid", type=float, nargs="*", default=None)
    p.add_argument("--epsilon", type=float, default=0.001)
    p.add_argument("--epsilon-b-pct", type=float, default=bench.DEFAULT_EPS_B_PCT)
    p.add_argument("--seed", type=int, default=0, help="accepted for interface uniformity; this sweep is deterministic")
    _add_output_args(p)

    p = sub.add_parser("bench-epsb", help="base threshold sweep (percent of range)")
    _add_input_args(p)
    p.add_argument("--grid", type=float, nargs="*", default=None)
    p.add_argument("--epsilon", type=float, default=0.001)
    p.add_argument("--lambda", dest="lam", type=float, default=bench.DEFAULT_LAMBDA)
    p.add_argument("--seed", type=int, default=0, help="accepted for interface uniformity; this sweep is deterministic")
    _add_output_args(p)

    p = sub.add_parser("bench-edge", help="multiresolution edge-serving simulation")
    _add_input_args(p)
    p.add_argument("--resolutions", type=float, nargs="*", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--epsilon-b-pct", type=float, default=bench.DEFAULT_EPS_B_PCT)
    p.add_argument("--lambda", dest="lam", type=float, default=bench.DEFAULT_LAMBDA)
    _add_output_args(p)

    return parser


def _add_output_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", default=None, help="write the table as CSV here")
    p.add_argument("--json", default=None, help="write a JSON mirror here")
    p.add_argument("--plot", default=None, help="write a simple PNG plot here (needs matplotlib)")


def _emit(rows, args, x_key: str, y_key: str) -> None:
    if args.out:
        bench.write_csv(rows, args.out)
        print(f"wrote {args.out}")
    if args.json:
        bench.write_json(rows, args.json)
        print(f"wrote {args.json}")
    if getattr(args, "plot", None):
        _plot(rows, args.plot, x_key, y_key)
        print(f"wrote {args.plot}")
    if not args.out and not args.json:
        _print_table(rows)


def _print_table(rows) -> None:
    if not rows:
        print("(empty table)")
        return
    keys = list(rows[0].keys())
    print("\t".join(keys))
    for row in rows:
        print("\t".join(_fmt(row[k]) for k in keys))


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def _plot(rows, path, x_key: str, y_key: str) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    xs = [row[x_key] for row in rows if x_key in row]
    ys = [row[y_key] for row in rows if y_key in row]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(xs, ys, marker="o")
    ax.set_xlabel(x_key)
    ax.set_ylabel(y_key)
    if all(isinstance(v, (int, float)) and v > 0 for v in xs):
        ax.set_xscale("log")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _run(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _run(args) -> int:
    if args.command == "compress":
        x = load_input(args.input, format=args.format, column=args.column)
        rng = x.value_range
        eps_b = (args.epsilon_b_pct / 100.0) * rng if rng > 0 else args.epsilon_b_pct / 100.0
        if args.lossless:
            decimals = args.decimals if args.decimals is not None else x.decimals
            if decimals is None:
                print("error: --lossless needs a detected or explicit --decimals", file=sys.stderr)
                return 2
            artifact = codec.compress_lossless(x, eps_b, args.lam, decimals)
        else:
            eps_r = args.epsilon_r if args.epsilon_r is not None else args.epsilon
            thresholds = ErrorThresholds(epsilon=args.epsilon, epsilon_b=eps_b, epsilon_r=eps_r)
            artifact = codec.compress(x, thresholds, args.lam)
        blob = codec.serialize(artifact)
        Path(args.out).write_bytes(blob)
        cr = x.nbytes_raw() / (artifact.s_b + artifact.s_r)
        print(
            f"n={x.n} range={x.value_range:.6g} raw={x.nbytes_raw()}B "
            f"container={len(blob)}B s_b={artifact.s_b} s_r={artifact.s_r} cr={cr:.2f}"
        )
        return 0

    if args.command == "decompress":
        artifact = codec.deserialize(Path(args.artifact).read_bytes())
        if args.at_epsilon == "stored":
            at = "stored"
        else:
            try:
                at = float(args.at_epsilon)
            except ValueError:
                print(f"error: --at-epsilon must be 'stored' or a number, got {args.at_epsilon!r}",
                      file=sys.stderr)
                return 2
        recon = codec.decompress(artifact, at)
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        np.savetxt(out, recon.values, fmt="%.17g")
        print(f"wrote {out} ({recon.n} values)")
        return 0

    if args.command == "verify":
        x = load_input(args.input, format=args.format, column=args.column)
        artifact = codec.deserialize(Path(args.artifact).read_bytes())
        report = bench.verify(x, artifact, args.epsilon)
        status = "PASS" if report["pass"] else "FAIL"
        print(
            f"{status}: max_error={report['max_error']:.3e} vs epsilon={args.epsilon:.3e} "
            f"(worst index {report['worst_index']})"
        )
        return 0 if report["pass"] else 1

    x = load_input(args.input, format=args.format, column=args.column)

    if args.command == "bench-ratio":
        rows = bench.bench_ratio(x, eps_grid=args.grid, eps_b_pct=args.epsilon_b_pct, lam=args.lam)
        _emit(rows, args, "epsilon", "cr")
        return 0

    if args.command == "bench-growth":
        rows = bench.bench_growth(
            x,
            copies=args.copies,
            noise_sigma=args.noise_sigma,
            seed=args.seed,
            eps=args.epsilon,
            eps_b_pct=args.epsilon_b_pct,
            lam=args.lam,
        )
        _emit(rows, args, "n_points", "s_b")
        return 0

    if args.command == "bench-lambda":
        grid = args.grid if args.grid else (1e-5, 1e-3, 1e-1, 1.0)
        rows = bench.bench_lambda(x, lam_grid=grid, eps=args.epsilon, eps_b_pct=args.epsilon_b_pct)
        _emit(rows, args, "lambda", "cr")
        return 0

    if args.command == "bench-epsb":
        grid = args.grid if args.grid else (5.0, 8.0, 10.0)
        rows = bench.bench_eps_b(x, pct_grid=grid, eps=args.epsilon, lam=args.lam)
        _emit(rows, args, "eps_b_pct", "cr")
        return 0

    if args.command == "bench-edge":
        resolutions = args.resolutions if args.resolutions else bench.EDGE_RESOLUTIONS
        result = bench.bench_edge(
            x,
            resolutions=resolutions,
            seed=args.seed,
            repeats=args.repeats,
            eps_b_pct=args.epsilon_b_pct,
            lam=args.lam,
        )
        print(
            f"MLS={result['mls_bytes']}B ATS={result['ats_bytes']:.1f}B "
            f"APL={result['apl_seconds'] * 1e3:.3f}ms raw_transfer={result['raw_transfer_bytes']:.0f}B"
        )
        rows = result["requests"]
        if args.out or args.json or args.plot:
            _emit(rows, args, "request", "transferred_bytes")
        if args.json:
            summary = {k: v for k, v in result.items() if k != "requests"}
            bench.write_json(summary, Path(args.json).with_suffix(".summary.json"))
        return 0

    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
