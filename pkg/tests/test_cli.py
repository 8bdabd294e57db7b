import json
import subprocess
import sys

import numpy as np
import pytest

from macrocluster import datasets
from macrocluster.cli import RunConfig, main, read_config_file
from macrocluster.errors import InputError



def data(name):
    return str(datasets.path(name))


def run(tmp_path, *argv):
    return main([*argv, "--out", str(tmp_path)])


class TestDistances:
    def test_window_files(self, tmp_path):
        assert run(tmp_path, "distances", data("eu15_gdp_growth_1994_2004.csv"), "--indicator", "GDP") == 0
        dist = sorted(p.name for p in tmp_path.glob("*_dist.csv"))
        assert len(dist) == 7
        assert dist[0] == "GDP_1994-1998_dist.csv" and dist[-1] == "GDP_2000-2004_dist.csv"
        assert len(list(tmp_path.glob("*_corr.csv"))) == 7

    def test_name_defaults_to_file_stem(self, tmp_path):
        run(tmp_path, "distances", data("eu15_gdp_growth_1994_2004.csv"), "--window", "11")
        assert [p.name for p in tmp_path.iterdir()][0].startswith("eu15_gdp_growth_1994_2004_1994-2004")

    def test_bad_csv(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("entity,1,2,3\nA,1,2,3\nB,1,2\n")
        assert run(tmp_path, "distances", str(bad)) == 2
        assert "line 3" in capsys.readouterr().err

    def test_constant_entity(self, tmp_path, capsys):
        p = tmp_path / "c.csv"
        p.write_text("entity,1,2,3,4\nA,1,2,3,5\nFLAT,2,2,2,2\nC,3,1,2,0\n")
        assert run(tmp_path, "distances", str(p), "--window", "3") == 3
        assert "FLAT" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        assert run(tmp_path, "distances", str(tmp_path / "nope.csv")) == 2

    def test_levels_input(self, tmp_path):
        code = run(tmp_path, "distances", data("eu15_gdpc_levels_1971_2004.csv"), "--levels",
                   "--window", "33", "--indicator", "G")
        assert code == 0
        assert (tmp_path / "G_1972-2004_dist.csv").exists()


class TestTrend:
    def test_outputs(self, tmp_path):
        code = run(tmp_path, "trend", data("synthetic_convergence.csv"), "--window", "12", "--step", "12",
                   "--boot-n", "100", "--indicator", "SYN")
        assert code == 0
        fit = json.loads((tmp_path / "SYN_fit.json").read_text())
        assert fit["decaying"] and fit["tau_years"] == pytest.approx(12 * fit["tau_windows"])
        lines = (tmp_path / "SYN_trend.csv").read_text().splitlines()
        assert lines[0] == "window_label,value,ci_lo,ci_hi" and len(lines) == 7
        assert (tmp_path / "SYN_moments.csv").exists()

    def test_planted_tau(self, tmp_path):
        # a panel whose trend is exactly exponential is not constructible, so
        # check that the CLI fit equals the library fit on the same series
        from macrocluster.trendstats import fit_exp_decay, trend_series

        run(tmp_path, "trend", data("synthetic_convergence.csv"), "--window", "12", "--step", "12",
            "--boot-level", "0", "--indicator", "S")
        expected = fit_exp_decay(trend_series(datasets.panel("convergence"), 12, 12))
        assert json.loads((tmp_path / "S_fit.json").read_text())["tau_windows"] == pytest.approx(expected.tau)

    def test_single_window(self, tmp_path):
        assert run(tmp_path, "trend", data("eu15_gdp_growth_1994_2004.csv"), "--window", "11") == 4

    def test_fit_skipped_on_two_points(self, tmp_path, capsys):
        code = run(tmp_path, "trend", data("eu15_gdp_growth_1994_2004.csv"), "--window", "10",
                   "--boot-level", "0", "--indicator", "X")
        assert code == 0
        assert "warning" in capsys.readouterr().err
        assert not (tmp_path / "X_fit.json").exists()


class TestMamlp:
    def test_from_table(self, tmp_path):
        assert run(tmp_path, "mamlp", "--from-mlp-table", data("gdp_mlp_1994_2004.csv"), "--indicator", "GDP") == 0
        names = sorted(p.name for p in tmp_path.iterdir())
        assert names == ["GDP_clusters.json", "GDP_mlp.csv", "GDP_movement_corr.csv", "GDP_sensitivity.csv"]
        report = json.loads((tmp_path / "GDP_clusters.json").read_text())
        assert report["outliers"] == ["GR"]
        sens = dict(line.split(",") for line in (tmp_path / "GDP_sensitivity.csv").read_text().splitlines()[1:])
        assert float(sens["DK"]) == pytest.approx(9.08, abs=0.01)

    def test_panel_end_to_end(self, tmp_path):
        assert run(tmp_path, "mamlp", data("eu15_gdp_growth_1994_2004.csv"), "--indicator", "GDP") == 0
        assert len(list(tmp_path.iterdir())) == 4

    def test_invalid_thresholds(self, tmp_path):
        code = run(tmp_path, "mamlp", data("eu15_gdp_growth_1994_2004.csv"), "--pos-thr", "0.1", "--neg-thr", "0.5")
        assert code == 2

    def test_no_input(self, tmp_path):
        assert run(tmp_path, "mamlp") == 2


class TestTree:
    def test_matrix_mst(self, tmp_path):
        run(tmp_path, "distances", data("eu15_gdp_growth_1994_2004.csv"), "--indicator", "GDP")
        matrix = tmp_path / "GDP_1994-1998_dist.csv"
        assert run(tmp_path, "tree", str(matrix), "--kind", "mst") == 0
        dot = (tmp_path / "GDP_1994-1998_dist_mst.dot").read_text()
        assert dot.count(" -- ") == 14

    def test_bmlp_chain(self, tmp_path):
        assert run(tmp_path, "tree", data("gdp_movement_corr.csv"), "--correlation", "--kind", "bmlp",
                   "--indicator", "GDP") == 0
        doc = json.loads((tmp_path / "GDP_bmlp.json").read_text())
        assert doc["kind"] == "bmlp-chain" and len(doc["edges"]) == 14

    def test_mamlp_tree(self, tmp_path):
        assert run(tmp_path, "tree", data("eu15_gdp_growth_1994_2004.csv"), "--kind", "mamlp",
                   "--start", "1996", "--indicator", "GDP") == 0
        assert '"AVG"' in (tmp_path / "GDP_1996-2000_mamlp.dot").read_text()

    def test_mamlp_needs_avg(self, tmp_path):
        assert run(tmp_path, "tree", data("gdp_movement_corr.csv"), "--correlation", "--kind", "mamlp") == 2

    def test_unknown_start(self, tmp_path):
        assert run(tmp_path, "tree", data("eu15_gdp_growth_1994_2004.csv"), "--start", "1980") == 2


class TestShuffle:
    def test_sweep_rows(self, tmp_path):
        assert run(tmp_path, "shuffle", "--from-mlp-table", data("gdp_mlp_1994_2004.csv"), "--n-seeds", "20",
                   "--indicator", "GDP") == 0
        lines = (tmp_path / "GDP_shuffle.csv").read_text().splitlines()
        assert lines[0] == "seed,mode,amplitude,ratio,c_max,c_min,strong_link_count"
        assert len(lines) == 21

    def test_default_two_hundred(self, tmp_path):
        run(tmp_path, "shuffle", "--from-mlp-table", data("gdp_mlp_1994_2004.csv"), "--indicator", "GDP")
        assert len((tmp_path / "GDP_shuffle.csv").read_text().splitlines()) == 201

    def test_stack_needs_two_windows(self, tmp_path):
        code = run(tmp_path, "shuffle", data("eu15_gdp_growth_1994_2004.csv"), "--mode",
                   "columns-of-distance-stack", "--window", "11")
        assert code == 4

    def test_stack_mode(self, tmp_path):
        code = run(tmp_path, "shuffle", data("synthetic_convergence.csv"), "--mode", "columns-of-distance-stack",
                   "--window", "12", "--step", "12", "--n-seeds", "5", "--indicator", "S")
        assert code == 0
        assert len((tmp_path / "S_shuffle.csv").read_text().splitlines()) == 6


class TestFactorGraph:
    def matrices(self):
        out = []
        for k in datasets.INDICATORS:
            out += ["--matrix", f"{k}={data(k.lower() + '_movement_corr.csv')}"]
        return out

    def test_table_four(self, tmp_path):
        assert run(tmp_path, "factor-graph", *self.matrices()) == 0
        produced = (tmp_path / "factor_graph_clusters.csv").read_text().splitlines()
        reference = datasets.read_bytes("cluster_table_reference.csv").decode().splitlines()
        assert sorted(produced) == sorted(reference)

    def test_edges_input(self, tmp_path):
        assert run(tmp_path, "factor-graph", "--edges", data("factor_graph_edges.csv"),
                   "--subsets", "GDP-FCE-GCF") == 0
        rows = (tmp_path / "factor_graph_clusters.csv").read_text().splitlines()
        assert rows[1] == "GDP-FCE-GCF,AT-BE-DK-ES-FR-UK-NL,14,28,0.500,0.347"

    def test_empty(self, tmp_path):
        assert run(tmp_path, "factor-graph", *self.matrices(), "--threshold", "1.01") == 0
        doc = json.loads((tmp_path / "factor_graph.json").read_text())
        assert doc["edges"] == [] and len(doc["excluded"]) == 15

    def test_mismatched(self, tmp_path):
        other = tmp_path / "small.csv"
        other.write_text("entity,A,B\nA,1,0.5\nB,0.5,1\n")
        assert run(tmp_path, "factor-graph", "--matrix", f"GDP={data('gdp_movement_corr.csv')}",
                   "--matrix", f"X={other}") == 2

    def test_bad_matrix_flag(self, tmp_path):
        assert run(tmp_path, "factor-graph", "--matrix", "nope") == 2


class TestIngest:
    def test_levels_to_growth(self, tmp_path):
        assert run(tmp_path, "ingest", data("eu15_gdpc_levels_1971_2004.csv"), "--indicator", "GDPC") == 0
        written = (tmp_path / "GDPC_growth_1972-2004.csv").read_bytes()
        assert b"\r" not in written
        from macrocluster.panel import load_panel

        ours = load_panel(written)
        committed = datasets.panel("gdpc")
        assert ours.entities == committed.entities and list(ours.years) == list(committed.years)
        np.testing.assert_allclose(ours.values, committed.values, atol=1e-6)
        assert len(load_panel(written).years) == 33


class TestConfig:
    def test_precedence(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# comment\nwindow = 7\nseed=3\nneg-thr=-0.8\n")
        assert main(["trend", "x.csv", "--config", str(cfg), "--seed", "9", "--print-config"]) == 0
        dumped = dict(line.split("=", 1) for line in capsys.readouterr().out.splitlines())
        assert dumped["window"] == "7" and dumped["seed"] == "9" and dumped["neg_thr"] == "-0.8"
        assert dumped["step"] == "1"

    def test_unknown_key(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("colour=blue\n")
        with pytest.raises(InputError):
            read_config_file(cfg)
        assert main(["trend", "x.csv", "--config", str(cfg)]) == 2

    def test_validation(self):
        for bad in (dict(window=1), dict(boot_n=10), dict(pos_thr=-0.6), dict(metric="cosine")):
            with pytest.raises(InputError):
                RunConfig(**bad).validate()

    def test_usage_error_exit_code(self):
        with pytest.raises(SystemExit) as exc:
            main(["distances"])
        assert exc.value.code == 2


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "macrocluster", "factor-graph", "--edges", data("factor_graph_edges.csv"),
         "--out", str(tmp_path)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "factor_graph_clusters.csv").exists()
