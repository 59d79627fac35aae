import pytest

from stochmatch.cli import main


def run_cli(args):
    return main(args)


class TestGenerate:
    def test_graph_file(self, tmp_path):
        out = tmp_path / "g.txt"
        assert run_cli(["generate", "--family", "complete-bipartite", "--n", "3", "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0].startswith("#")
        assert lines[1] == "6 9"

    def test_kidney_pool(self, tmp_path):
        out = tmp_path / "pool.txt"
        assert run_cli(["generate", "--family", "kidney-pool", "--n", "10", "--seed", "3", "--out", str(out)]) == 0
        assert "# generator kidney-pool" in out.read_text()

    def test_unknown_family_is_config_error(self, tmp_path):
        assert run_cli(["generate", "--family", "nope", "--out", str(tmp_path / "x")]) == 1

    def test_missing_param_is_config_error(self, tmp_path):
        assert run_cli(["generate", "--family", "complete-bipartite", "--out", str(tmp_path / "x")]) == 1


class TestRun:
    def test_single_edge_ratio_one(self, tmp_path):
        out = tmp_path / "run.csv"
        rc = run_cli([
            "run", "--family", "single-edge", "--model", "uniform:1.0",
            "--alg", "adaptive", "--R", "1", "--trials", "20",
            "--seed", "5", "--out", str(out),
        ])
        assert rc == 0
        lines = [ln for ln in out.read_text().splitlines() if not ln.startswith("#")]
        header = lines[0].split(",")
        row = dict(zip(header, lines[1].split(",")))
        assert float(row["ratio"]) == pytest.approx(1.0)

    def test_unknown_algorithm_exit_1(self, tmp_path):
        rc = run_cli(["run", "--family", "single-edge", "--alg", "wat", "--out", str(tmp_path / "x.csv")])
        assert rc == 1

    def test_input_file_with_inline_model(self, tmp_path):
        g = tmp_path / "g.txt"
        g.write_text("2 1\n0 1\nuniform 1.0\n")
        out = tmp_path / "o.csv"
        rc = run_cli(["run", "--input", str(g), "--alg", "single", "--trials", "10", "--seed", "3", "--out", str(out)])
        assert rc == 0
        body = [ln for ln in out.read_text().splitlines() if not ln.startswith("#")]
        assert float(body[1].split(",")[-2]) == pytest.approx(1.0)  # ratio

    def test_report_file(self, tmp_path):
        rep = tmp_path / "r.txt"
        rc = run_cli([
            "run", "--family", "single-edge", "--model", "uniform:1.0", "--alg", "adaptive",
            "--R", "2", "--trials", "5", "--seed", "1", "--out", str(tmp_path / "o.csv"),
            "--report", str(rep),
        ])
        assert rc == 0
        lines = rep.read_text().splitlines()
        assert len(lines) == 2
        assert lines[0].split() == ["0", "1", "1", "1"]

    def test_byte_identical_reruns(self, tmp_path):
        args = [
            "run", "--family", "k22", "--model", "uniform:0.5", "--alg", "nonadaptive",
            "--R", "2", "--trials", "50", "--seed", "9",
        ]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run_cli(args + ["--out", str(a)]) == 0
        assert run_cli(args + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_env_seed_default(self, tmp_path, monkeypatch):
        out1, out2 = tmp_path / "1.csv", tmp_path / "2.csv"
        monkeypatch.setenv("STOCHMATCH_SEED", "123")
        run_cli(["run", "--family", "single-edge", "--model", "uniform:0.5", "--alg", "single", "--trials", "30", "--out", str(out1)])
        monkeypatch.delenv("STOCHMATCH_SEED")
        run_cli(["run", "--family", "single-edge", "--model", "uniform:0.5", "--alg", "single", "--trials", "30", "--seed", "123", "--out", str(out2)])
        body = lambda p: [ln for ln in p.read_text().splitlines() if not ln.startswith("#")]
        assert body(out1) == body(out2)

    def test_vertexparams_model_spec(self, tmp_path):
        out = tmp_path / "vp.csv"
        rc = run_cli([
            "run", "--family", "k22", "--model", "vertexparams:constant:1.0",
            "--alg", "adaptive", "--R", "2", "--trials", "10", "--seed", "4", "--out", str(out),
        ])
        assert rc == 0
        body = [ln for ln in out.read_text().splitlines() if not ln.startswith("#")]
        assert float(body[1].split(",")[-2]) == pytest.approx(1.0)

    def test_config_file_and_flag_precedence(self, tmp_path):
        cfg = tmp_path / "cfg.txt"
        cfg.write_text("family=single-edge\nalg=single\ntrials=10\nmodel=uniform:1.0\n")
        out = tmp_path / "o.csv"
        rc = run_cli(["run", "--config", str(cfg), "--trials", "7", "--seed", "2", "--out", str(out)])
        assert rc == 0
        body = [ln for ln in out.read_text().splitlines() if not ln.startswith("#")]
        row = body[1].split(",")
        assert row[5] == "7"  # trials column: flag wins over config file


class TestSweep:
    def test_k22_nonadaptive_grid(self, tmp_path):
        out = tmp_path / "sweep.csv"
        rc = run_cli([
            "sweep", "--family", "k22", "--model", "uniform:0.5", "--alg", "nonadaptive",
            "--R-grid", "1..5", "--trials", "200", "--seed", "3", "--out", str(out),
        ])
        assert rc == 0
        body = [ln for ln in out.read_text().splitlines() if not ln.startswith("#")]
        rows = [ln.split(",") for ln in body[1:]]
        assert len(rows) == 5
        ratios = [float(r[-2]) for r in rows]
        assert all(b >= a - 0.05 for a, b in zip(ratios, ratios[1:]))
        # R >= 2 already selects all four edges, so those cells coincide
        assert ratios[1:] == [ratios[1]] * 4
        assert ratios[-1] > ratios[0]

    def test_jobs_parallel_identical_output(self, tmp_path):
        base = [
            "sweep", "--family", "k22", "--model", "uniform:0.5", "--alg", "nonadaptive",
            "--R-grid", "1..3", "--trials", "50", "--seed", "3",
        ]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run_cli(base + ["--out", str(a)]) == 0
        assert run_cli(base + ["--jobs", "2", "--out", str(b)]) == 0
        strip = lambda p: [ln for ln in p.read_text().splitlines() if not ln.startswith("#")]
        assert strip(a) == strip(b)

    def test_bad_grid_config_error(self, tmp_path):
        rc = run_cli(["sweep", "--family", "k22", "--alg", "nonadaptive", "--R-grid", "x..y", "--out", str(tmp_path / "s.csv")])
        assert rc == 1


class TestReplicate:
    def test_unknown_suite_is_config_error(self, tmp_path):
        assert run_cli(["replicate", "--suite", "nope", "--out", str(tmp_path / "x.csv")]) == 1

    def test_lemma_b1_small(self, tmp_path):
        out = tmp_path / "b1.csv"
        rc = run_cli(["replicate", "--suite", "lemmaB1", "--trials", "30", "--seed", "1", "--out", str(out)])
        assert rc == 0
        body = [ln for ln in out.read_text().splitlines() if not ln.startswith("#")]
        assert len(body) == 5  # header + 4 cells
        for ln in body[1:]:
            assert float(ln.split(",")[-2]) >= 1.0  # mc mean beats the bound

    def test_kidney_small(self, tmp_path):
        out = tmp_path / "k.csv"
        rc = run_cli([
            "replicate", "--suite", "kidney-2cycle", "--trials", "5", "--seed", "2", "--out", str(out),
        ])
        assert rc == 0
        text = out.read_text()
        header = [ln for ln in text.splitlines() if not ln.startswith("#")][0]
        assert header.endswith("f,k_max,n")
