import csv
import json

import numpy as np
import pytest

from shrink import bench, cli, codec
from shrink.datasets import noisy_pla, power_like, random_walk, steps, windspeed_like
from shrink.ingest import ingest, load_input, parse_synth_spec
from shrink.model import TimeSeries
from shrink.residual import ResidualStream, dequantize, quantize, requantize
from conftest import thresholds_for


class TestIngest:
    def test_single_column_csv(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("1.5\n2.25\n3.0\n4.125\n")
        x = ingest(p)
        assert x.n == 4
        assert x.decimals == 3
        assert x.values.tolist() == [1.5, 2.25, 3.0, 4.125]

    def test_header_and_column_selection(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("time,value\n0,1.25\n1,2.5\n")
        x = ingest(p, column=1)
        assert x.values.tolist() == [1.25, 2.5]
        assert x.decimals == 2

    def test_nan_cell_names_row(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("1.0\nNaN\n3.0\n")
        with pytest.raises(ValueError, match="row 2"):
            ingest(p)

    def test_non_numeric_cell_names_row(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("1.0\n2.0\nbroken\n")
        with pytest.raises(ValueError, match="row 3"):
            ingest(p)

    def test_missing_column(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("1.0\n2.0\n")
        with pytest.raises(ValueError, match="no column 3"):
            ingest(p, column=3)

    def test_ucr_tsv_row_selection(self, tmp_path):
        p = tmp_path / "d.tsv"
        p.write_text("1\t0.10\t0.20\t0.30\n2\t9.0\t8.0\t7.0\n")
        x = ingest(p, format="ucr-tsv", column=1)
        assert x.values.tolist() == [2.0, 9.0, 8.0, 7.0]

    def test_precision_detection_with_exponents(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("1.5e-2\n2.25e1\n")
        x = ingest(p)
        assert x.decimals == 3  # 0.015 carries three decimals

    def test_synth_spec(self):
        x = parse_synth_spec("synth:noisy_pla:n=128:seed=7")
        assert x.n == 128
        with pytest.raises(ValueError, match="unknown synthetic"):
            parse_synth_spec("synth:nope")
        assert load_input("synth:random_walk:n=32").n == 32


class TestBenchRatio:
    def test_default_grid_full_for_unbounded_precision(self):
        x = random_walk(n=2000, seed=1)
        rows = bench.bench_ratio(x)
        eps_values = [r["epsilon"] for r in rows if r["mode"] == "lossy"]
        assert eps_values == list(bench.NINE_RESOLUTIONS)
        assert not any(r["mode"] == "lossless" for r in rows)

    def test_two_decimal_data_truncates_grid_and_adds_lossless(self):
        x = windspeed_like(n=2000, seed=1)
        rows = bench.bench_ratio(x)
        eps_values = [r["epsilon"] for r in rows if r["mode"] == "lossy"]
        assert eps_values == [0.01, 0.0075, 0.005, 0.0025, 0.001]
        lossless = [r for r in rows if r["mode"] == "lossless"]
        assert len(lossless) == 1
        assert lossless[0]["max_error"] == 0.0
        assert lossless[0]["cr"] > 1.0

    def test_cr_monotone_coarse_to_fine(self):
        for x in (noisy_pla(n=4000, seed=2), random_walk(n=4000, seed=2),
                  steps(n=4000, seed=2)):
            rows = [r for r in bench.bench_ratio(x) if r["mode"] == "lossy"]
            assert rows[0]["cr"] >= rows[-1]["cr"], x.name

    def test_error_bound_reported(self):
        x = noisy_pla(n=3000, seed=3)
        for r in bench.bench_ratio(x):
            assert r["max_error"] <= max(r["epsilon"], 0.0) + 1e-15


class TestBenchGrowth:
    def test_zero_noise_base_growth_is_marginal(self):
        base = power_like(n=30_000, seed=4, mean_run=1500)
        rows = bench.bench_growth(base, copies=4, noise_sigma=0.0,
                                  eps_b_pct=0.00012, lam=1.0)
        assert rows[-1]["s_b"] <= 1.6 * rows[0]["s_b"]
        assert [r["prefix_copies"] for r in rows] == [1, 2, 3, 4]

    def test_noisy_replication_keeps_residuals_linear(self):
        base = power_like(n=30_000, seed=4, mean_run=1500)
        rows = bench.bench_growth(base, copies=5, noise_sigma=0.1, seed=9,
                                  eps_b_pct=0.00012, lam=1.0)
        ns = np.array([r["n_points"] for r in rows], dtype=float)
        srs = np.array([r["s_r"] for r in rows], dtype=float)
        a = np.vstack([ns, np.ones_like(ns)]).T
        _, res, *_ = np.linalg.lstsq(a, srs, rcond=None)
        r2 = 1 - res[0] / ((srs - srs.mean()) ** 2).sum()
        assert r2 >= 0.98

    def test_deterministic_under_seed(self):
        base = power_like(n=10_000, seed=4, mean_run=1000)
        a = bench.bench_growth(base, copies=3, noise_sigma=0.05, seed=7,
                               eps_b_pct=0.00012, lam=1.0)
        b = bench.bench_growth(base, copies=3, noise_sigma=0.05, seed=7,
                               eps_b_pct=0.00012, lam=1.0)
        for ra, rb in zip(a, b):
            assert ra["s_b"] == rb["s_b"] and ra["s_r"] == rb["s_r"]


class TestBenchSweeps:
    def test_lambda_one_uses_at_most_two_intervals(self):
        x = noisy_pla(n=5000, seed=5)
        rows = bench.bench_lambda(x, lam_grid=(1e-5, 1e-3, 1e-1, 1.0))
        assert [r["lambda"] for r in rows] == [1e-5, 1e-3, 1e-1, 1.0]
        assert rows[-1]["n_intervals"] <= 2

    def test_eps_b_relaxation_never_hurts_on_wind_data(self):
        x = windspeed_like(n=10_000, seed=3)
        rows = bench.bench_eps_b(x, pct_grid=(5.0, 8.0, 10.0))
        crs = [r["cr"] for r in rows]
        assert all(a <= b + 1e-9 for a, b in zip(crs, crs[1:]))

    def test_sweep_tables_are_deterministic(self):
        x = noisy_pla(n=3000, seed=7)
        a = bench.bench_lambda(x)
        b = bench.bench_lambda(x)
        for ra, rb in zip(a, b):
            assert ra["cr"] == rb["cr"] and ra["s_b"] == rb["s_b"]


class TestBenchEdge:
    def test_metrics_and_determinism(self):
        x = steps(n=6000, seed=8)
        res1 = bench.bench_edge(x, seed=3, repeats=2)
        res2 = bench.bench_edge(x, seed=3, repeats=2)
        assert res1["mls_bytes"] == res2["mls_bytes"]
        assert res1["ats_bytes"] == res2["ats_bytes"]
        assert [r["transferred_bytes"] for r in res1["requests"]] == [
            r["transferred_bytes"] for r in res2["requests"]
        ]
        # MLS is exactly the serialized finest artifact
        artifact = codec.compress(x, thresholds_for(x, min(bench.EDGE_RESOLUTIONS)), 0.001)
        assert res1["mls_bytes"] == len(codec.serialize(artifact))
        assert res1["ats_bytes"] < res1["raw_transfer_bytes"]

    def test_requantized_streams_match_direct_quantization(self):
        x = steps(n=4000, seed=9)
        artifact = codec.compress(x, thresholds_for(x, 1e-5), 0.001)
        h = artifact.header
        from shrink import entropy

        alphabet = int(np.floor((h.r_max - h.r_min) / h.eps_r)) + 1
        stored = ResidualStream(
            symbols=entropy.decode(artifact.residual_bytes, h.n, alphabet),
            r_min=h.r_min, r_max=h.r_max, eps_r=h.eps_r,
        )
        for eps in bench.EDGE_RESOLUTIONS:
            if eps < stored.eps_r:
                continue
            assert requantize(stored, eps) == quantize(dequantize(stored), eps) or eps == stored.eps_r


class TestVerifyAndTables:
    def test_verify_pass_and_fail(self):
        x = noisy_pla(n=2000, seed=10)
        artifact = codec.compress(x, thresholds_for(x, 1e-3), 0.1)
        ok = bench.verify(x, artifact, 1e-3)
        assert ok["pass"] and ok["max_error"] <= 1e-3
        bad = bench.verify(x, artifact, 1e-9)
        assert not bad["pass"]
        assert 0 <= bad["worst_index"] < x.n

    def test_csv_and_json_mirrors(self, tmp_path):
        rows = [{"a": 1, "b": 2.5}, {"a": 2, "b": 3.5}]
        bench.write_csv(rows, tmp_path / "t.csv")
        bench.write_json(rows, tmp_path / "t.json")
        with open(tmp_path / "t.csv") as fh:
            got = list(csv.DictReader(fh))
        assert got == [{"a": "1", "b": "2.5"}, {"a": "2", "b": "3.5"}]
        assert json.loads((tmp_path / "t.json").read_text()) == rows

    def test_thread_pool_results_match_serial(self, monkeypatch):
        x = noisy_pla(n=3000, seed=11)
        serial = bench.bench_ratio(x)
        monkeypatch.setenv("SHRINK_THREADS", "3")
        pooled = bench.bench_ratio(x)
        for a, b in zip(serial, pooled):
            assert a["cr"] == b["cr"] and a["s_b"] == b["s_b"] and a["s_r"] == b["s_r"]


class TestCli:
    def test_compress_verify_decompress_cycle(self, tmp_path, capsys):
        data = tmp_path / "in.csv"
        data.write_text("\n".join(f"{v:.2f}" for v in windspeed_like(n=400, seed=12).values))
        art = tmp_path / "out.shrk"

        rc = cli.main([
            "compress", str(data), "--epsilon", "0.001", "--out", str(art),
        ])
        assert rc == 0 and art.exists()

        rc = cli.main(["verify", str(data), str(art), "--epsilon", "0.001"])
        assert rc == 0
        assert "PASS" in capsys.readouterr().out

        rc = cli.main(["verify", str(data), str(art), "--epsilon", "1e-9"])
        assert rc == 1

        recon = tmp_path / "recon.csv"
        rc = cli.main(["decompress", str(art), "--out", str(recon)])
        assert rc == 0
        values = np.loadtxt(recon)
        assert values.shape == (400,)

    def test_lossless_flag_uses_detected_precision(self, tmp_path):
        data = tmp_path / "in.csv"
        data.write_text("\n".join(f"{v:.2f}" for v in windspeed_like(n=300, seed=13).values))
        art = tmp_path / "out.shrk"
        rc = cli.main(["compress", str(data), "--lossless", "--out", str(art)])
        assert rc == 0
        artifact = codec.deserialize(art.read_bytes())
        assert artifact.header.lossless and artifact.header.decimals == 2
        recon = codec.decompress(artifact)
        assert np.array_equal(recon.values, ingest(data).values)

    def test_bench_ratio_writes_tables(self, tmp_path):
        out_csv = tmp_path / "r.csv"
        out_json = tmp_path / "r.json"
        rc = cli.main([
            "bench-ratio", "synth:windspeed_like:n=1500:seed=3",
            "--out", str(out_csv), "--json", str(out_json),
        ])
        assert rc == 0
        with open(out_csv) as fh:
            reader = csv.DictReader(fh)
            assert reader.fieldnames == [
                "series", "mode", "epsilon", "cr", "baseline_cr", "max_error",
                "s_b", "s_r", "seconds", "mb_per_s",
            ]
            assert len(list(reader)) >= 2
        assert json.loads(out_json.read_text())

    def test_bench_edge_smoke(self, tmp_path, capsys):
        rc = cli.main([
            "bench-edge", "synth:steps:n=3000:seed=2", "--seed", "5",
            "--repeats", "1", "--out", str(tmp_path / "edge.csv"),
        ])
        assert rc == 0
        assert "MLS=" in capsys.readouterr().out

    def test_bench_growth_smoke(self, tmp_path):
        rc = cli.main([
            "bench-growth", "synth:power_like:n=8000:seed=1:mean_run=800",
            "--copies", "3", "--epsilon-b-pct", "0.00012", "--lambda", "1.0",
            "--out", str(tmp_path / "g.csv"),
        ])
        assert rc == 0
        with open(tmp_path / "g.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 3

    def test_user_errors_exit_cleanly(self, tmp_path, capsys):
        data = tmp_path / "in.csv"
        data.write_text("1.0\nbad\n")
        rc = cli.main(["compress", str(data), "--out", str(tmp_path / "x.shrk")])
        assert rc == 2
        assert "error:" in capsys.readouterr().err

        rc = cli.main(["decompress", str(tmp_path / "missing.shrk"), "--out", str(tmp_path / "y.csv")])
        assert rc == 2

    def test_plot_flag_writes_png(self, tmp_path):
        pytest.importorskip("matplotlib")
        png = tmp_path / "sweep.png"
        rc = cli.main([
            "bench-epsb", "synth:windspeed_like:n=800:seed=1",
            "--out", str(tmp_path / "t.csv"), "--plot", str(png),
        ])
        assert rc == 0
        assert png.stat().st_size > 0
