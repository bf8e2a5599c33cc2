"""End-to-end tests of the command-line interface."""

from __future__ import annotations

import json

import numpy as np
import pytest

from causal_advisor.cli import main
from causal_advisor.dataio import load_graph, save_csv, save_graph, save_scm
from causal_advisor.datagen import SynthConfig, generate_chain_synthetic
from causal_advisor.graphs import dag_to_cpdag
from causal_advisor.stats import Dataset

TABLE3_OBS = '{"node13": 0.06, "node16": -2.57, "node34": -0.365, "node39": -1.29}'


def run(capsys, *argv: str) -> tuple[int, str, str]:
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture()
def student_dir(tmp_path, capsys):
    out = tmp_path / "student"
    code, _, _ = run(capsys, "synth", "--generator", "student", "--n", "2000",
                     "--seed", "11", "--out", str(out))
    assert code == 0
    return out


@pytest.fixture()
def chain_dir(tmp_path, capsys):
    out = tmp_path / "chain"
    code, _, _ = run(capsys, "synth", "--generator", "chain", "--n", "5000",
                     "--seed", "0", "--out", str(out))
    assert code == 0
    return out


class TestSynth:
    def test_writes_expected_files(self, chain_dir):
        for name in ("data.csv", "truth_graph.json", "truth_scm.json", "manifest.json"):
            assert (chain_dir / name).exists()

    def test_student_also_writes_normalization(self, student_dir):
        assert (student_dir / "normalization.json").exists()

    def test_seeded_runs_byte_identical(self, tmp_path, capsys):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            code, _, _ = run(capsys, "synth", "--generator", "chain", "--n", "300",
                             "--seed", "42", "--out", str(out))
            assert code == 0
        assert (a / "data.csv").read_bytes() == (b / "data.csv").read_bytes()
        assert (a / "truth_scm.json").read_bytes() == (b / "truth_scm.json").read_bytes()

    def test_manifest_records_outputs(self, chain_dir):
        manifest = json.loads((chain_dir / "manifest.json").read_text())
        assert manifest["command"] == "synth"
        assert manifest["seed"] == 0
        assert any(p.endswith("data.csv") for p in manifest["output_paths"])


class TestDiscover:
    def test_matches_golden_cpdag(self, chain_dir, tmp_path, capsys):
        out = tmp_path / "g.json"
        code, _, _ = run(capsys, "discover", "--data", str(chain_dir / "data.csv"),
                         "--algo", "pc", "--alpha", "0.05", "--out", str(out))
        assert code == 0
        golden = dag_to_cpdag(load_graph(chain_dir / "truth_graph.json"))
        assert load_graph(out) == golden

    def test_ges_agrees_on_this_seed(self, chain_dir, tmp_path, capsys):
        pc_out, ges_out = tmp_path / "pc.json", tmp_path / "ges.json"
        run(capsys, "discover", "--data", str(chain_dir / "data.csv"),
            "--algo", "pc", "--out", str(pc_out))
        run(capsys, "discover", "--data", str(chain_dir / "data.csv"),
            "--algo", "ges", "--out", str(ges_out))
        assert load_graph(pc_out) == load_graph(ges_out)

    def test_dot_export(self, chain_dir, tmp_path, capsys):
        out, dot = tmp_path / "g.json", tmp_path / "g.dot"
        code, _, _ = run(capsys, "discover", "--data", str(chain_dir / "data.csv"),
                         "--out", str(out), "--dot", str(dot))
        assert code == 0
        assert "[dir=none]" in dot.read_text()

    def test_knowledge_file_applies(self, student_dir, tmp_path, capsys):
        k = tmp_path / "k.json"
        k.write_text(json.dumps(
            {"tiers": [["node13", "node16", "node34"], ["node39"]]}
        ))
        out = tmp_path / "g.json"
        code, _, _ = run(capsys, "discover", "--data", str(student_dir / "data.csv"),
                         "--knowledge", str(k), "--out", str(out))
        assert code == 0
        g = load_graph(out)
        outcome = g.node_labels.index("node39")
        assert not [e for e in g.directed if e[0] == outcome]
        assert not [e for e in g.undirected if outcome in e]

    def test_missing_data_file_exits_2(self, tmp_path, capsys):
        code, _, err = run(capsys, "discover", "--data", str(tmp_path / "nope.csv"),
                           "--out", str(tmp_path / "g.json"))
        assert code == 2
        assert err.startswith("error[IoError]")
        assert err.count("\n") == 1


class TestFitScm:
    def test_rejects_undirected_with_guidance(self, chain_dir, tmp_path, capsys):
        cpdag = dag_to_cpdag(load_graph(chain_dir / "truth_graph.json"))
        gpath = tmp_path / "cpdag.json"
        save_graph(cpdag, "json", gpath)
        code, _, err = run(capsys, "fit-scm", "--data", str(chain_dir / "data.csv"),
                           "--graph", str(gpath), "--out", str(tmp_path / "scm.json"))
        assert code == 2
        assert "--orient" in err

    def test_orient_flag_resolves(self, chain_dir, tmp_path, capsys):
        cpdag = dag_to_cpdag(load_graph(chain_dir / "truth_graph.json"))
        gpath = tmp_path / "cpdag.json"
        save_graph(cpdag, "json", gpath)
        out = tmp_path / "scm.json"
        code, _, _ = run(capsys, "fit-scm", "--data", str(chain_dir / "data.csv"),
                         "--graph", str(gpath), "--out", str(out),
                         "--orient", "x7,x3")
        assert code == 0
        scm = json.loads(out.read_text())
        assert scm["equations"]["x3"]["parents"] == ["x7"]
        assert abs(scm["equations"]["x3"]["coefficients"][0] - 0.4) < 0.05

    def test_fits_on_truth_dag(self, student_dir, tmp_path, capsys):
        out = tmp_path / "scm.json"
        code, _, _ = run(capsys, "fit-scm", "--data", str(student_dir / "data.csv"),
                         "--graph", str(student_dir / "truth_graph.json"),
                         "--out", str(out))
        assert code == 0
        scm = json.loads(out.read_text())
        fitted = scm["equations"]["node39"]["coefficients"]
        assert abs(fitted[1] - 0.19) < 0.06  # node16's coefficient

    def test_rank_deficient_data_exits_3(self, tmp_path, capsys):
        x = np.arange(40.0)
        d = Dataset(["a", "b", "y"], np.column_stack([x, 2 * x, x + 1]))
        save_csv(d, tmp_path / "collinear.csv")
        from causal_advisor.graphs import MixedGraph
        save_graph(MixedGraph(("a", "b", "y"), directed=[(0, 2), (1, 2)]),
                   "json", tmp_path / "g.json")
        code, _, err = run(capsys, "fit-scm", "--data", str(tmp_path / "collinear.csv"),
                           "--graph", str(tmp_path / "g.json"),
                           "--out", str(tmp_path / "scm.json"))
        assert code == 3
        assert err.startswith("error[RankDeficiencyError]")


class TestAte:
    def test_prints_table(self, student_dir, capsys):
        code, out, _ = run(capsys, "ate", "--data", str(student_dir / "data.csv"),
                           "--graph", str(student_dir / "truth_graph.json"),
                           "--treatment", "node16", "--outcome", "node39")
        assert code == 0
        assert "adjusted_on" in out and "node13, node34" in out
        effect = float(out.split("effect")[1].split()[0])
        assert abs(effect - 0.19) < 0.08

    def test_unknown_column_exits_2(self, student_dir, capsys):
        code, _, err = run(capsys, "ate", "--data", str(student_dir / "data.csv"),
                           "--graph", str(student_dir / "truth_graph.json"),
                           "--treatment", "nope", "--outcome", "node39")
        assert code == 2
        assert err.startswith("error[UnknownColumnError]")

    def test_emits_stderr_manifest(self, student_dir, capsys):
        # Table commands keep stdout parseable; the run manifest goes to stderr.
        code, _, err = run(capsys, "ate", "--data", str(student_dir / "data.csv"),
                           "--graph", str(student_dir / "truth_graph.json"),
                           "--treatment", "node16", "--outcome", "node39")
        assert code == 0
        lines = [ln for ln in err.splitlines() if ln.startswith("manifest: ")]
        assert len(lines) == 1
        manifest = json.loads(lines[0][len("manifest: "):])
        assert manifest["command"] == "ate"
        assert manifest["config"] == {"treatment": "node16", "outcome": "node39"}
        assert str(student_dir / "data.csv") in manifest["input_hashes"]
        assert len(manifest["config_hash"]) == 64


class TestCf:
    def test_no_set_echoes_row(self, student_dir, capsys):
        code, out, _ = run(capsys, "cf", "--scm", str(student_dir / "truth_scm.json"),
                           "--data", str(student_dir / "data.csv"), "--obs", "0")
        assert code == 0
        payload = json.loads(out)
        data_line = (student_dir / "data.csv").read_text().splitlines()[1]
        first_row = [float(v) for v in data_line.split(",")]
        got = payload["counterfactual_values"]
        for name, want in zip(("node13", "node16", "node34", "node39"), first_row):
            assert abs(got[name] - want) < 1e-9
        assert payload["intervened"] == []

    def test_worked_example(self, student_dir, capsys):
        code, out, _ = run(capsys, "cf", "--scm", str(student_dir / "truth_scm.json"),
                           "--obs", TABLE3_OBS,
                           "--set", "node13=0.861", "--set", "node16=-2.57",
                           "--set", "node34=-0.365")
        assert code == 0
        payload = json.loads(out)
        assert abs(payload["counterfactual_values"]["node39"] - (-0.900714)) < 1e-6
        assert abs(payload["abducted_noise"]["node39"] - (-0.762605)) < 1e-6

    def test_bad_set_syntax_exits_2(self, student_dir, capsys):
        code, _, err = run(capsys, "cf", "--scm", str(student_dir / "truth_scm.json"),
                           "--obs", TABLE3_OBS, "--set", "node13")
        assert code == 2
        assert err.startswith("error[InvalidQueryError]")

    def test_row_index_without_data_exits_2(self, student_dir, capsys):
        code, _, err = run(capsys, "cf", "--scm", str(student_dir / "truth_scm.json"),
                           "--obs", "0")
        assert code == 2


class TestRecommend:
    def test_intervention_achieves_threshold(self, student_dir, capsys):
        code, out, _ = run(capsys, "recommend",
                           "--scm", str(student_dir / "truth_scm.json"),
                           "--obs", TABLE3_OBS, "--target", "node39",
                           "--threshold", "-0.901",
                           "--actionable", "node13,node16,node34")
        assert code == 0
        payload = json.loads(out)
        assert not payload["empty"]
        sets = [f"{name}={value}" for name, value in payload["intervention"].items()]
        args = ["cf", "--scm", str(student_dir / "truth_scm.json"),
                "--obs", TABLE3_OBS]
        for s in sets:
            args.extend(["--set", s])
        code, out, _ = run(capsys, *args)
        assert code == 0
        replay = json.loads(out)
        assert replay["counterfactual_values"]["node39"] >= -0.901 - 1e-6

    def test_projection_deltas(self, student_dir, capsys):
        code, out, _ = run(capsys, "recommend",
                           "--scm", str(student_dir / "truth_scm.json"),
                           "--obs", TABLE3_OBS, "--target", "node39",
                           "--threshold", "-0.901",
                           "--actionable", "node13,node16,node34")
        payload = json.loads(out)
        assert abs(payload["intervention"]["node13"] - 0.06 - 0.615) < 1e-3
        assert abs(payload["intervention"]["node16"] + 2.57 - 0.240) < 1e-3
        assert abs(payload["intervention"]["node34"] + 0.365 - 0.237) < 1e-3


class TestExitCodes:
    def test_usage_error_is_1(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["discover"])  # missing required flags
        assert exc.value.code == 1
        assert "error[UsageError]" in capsys.readouterr().err

    def test_unknown_command_is_1(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 1

    def test_thread_env_validated(self, student_dir, capsys, monkeypatch):
        monkeypatch.setenv("CAUSAL_ADVISOR_THREADS", "zero")
        code, _, err = run(capsys, "ate", "--data", str(student_dir / "data.csv"),
                           "--graph", str(student_dir / "truth_graph.json"),
                           "--treatment", "node16", "--outcome", "node39")
        assert code == 2
        assert "CAUSAL_ADVISOR_THREADS" in err

    def test_thread_env_accepted(self, student_dir, capsys, monkeypatch):
        monkeypatch.setenv("CAUSAL_ADVISOR_THREADS", "2")
        code, _, _ = run(capsys, "ate", "--data", str(student_dir / "data.csv"),
                         "--graph", str(student_dir / "truth_graph.json"),
                         "--treatment", "node16", "--outcome", "node39")
        assert code == 0
