"""Command-line behavior: evaluation reports, train/test flows."""

import json

from click.testing import CliRunner

from ceglearn.cli import main, parse_seeds

from conftest import IF_PTB


def test_parse_seeds():
    assert parse_seeds("1..4") == [1, 2, 3, 4]
    assert parse_seeds("3,9,12") == [3, 9, 12]
    assert parse_seeds("7") == [7]


class TestEvaluate:
    def test_rq1_writes_reports(self, fixtures_dir, tmp_path):
        runner = CliRunner()
        result = runner.invoke(
            main,
            [
                "evaluate", "--rq1",
                "--corpus", str(fixtures_dir / "ifclauses.jsonl"),
                "--seeds", "1..3",
                "--out", str(tmp_path / "report"),
            ],
        )
        assert result.exit_code == 0, result.output
        assert (tmp_path / "report" / "rq1_report.json").exists()
        csv = (tmp_path / "report" / "rq1_runs.csv").read_text()
        assert csv.count("\n") == 4  # header + 3 runs

    def test_repeated_invocation_byte_identical(self, fixtures_dir, tmp_path):
        runner = CliRunner()
        outputs = []
        for name in ("one", "two"):
            result = runner.invoke(
                main,
                [
                    "evaluate", "--rq1", "--rq2",
                    "--corpus", str(fixtures_dir),
                    "--seeds", "1..2",
                    "--out", str(tmp_path / name),
                ],
            )
            assert result.exit_code == 0, result.output
            outputs.append(
                {
                    p.name: p.read_bytes()
                    for p in sorted((tmp_path / name).iterdir())
                }
            )
        assert outputs[0] == outputs[1]

    def test_rq2_with_one_artifact_is_usage_error(self, fixtures_dir, tmp_path):
        runner = CliRunner()
        result = runner.invoke(
            main,
            [
                "evaluate", "--rq2",
                "--corpus", str(fixtures_dir / "ifclauses.jsonl"),
                "--out", str(tmp_path),
            ],
        )
        assert result.exit_code != 0
        assert "two artifacts" in result.output

    def test_no_mode_is_usage_error(self, fixtures_dir, tmp_path):
        runner = CliRunner()
        result = runner.invoke(
            main,
            ["evaluate", "--corpus", str(fixtures_dir), "--out", str(tmp_path)],
        )
        assert result.exit_code != 0


def causal_line(rid, n1, v1, n2, v2):
    return {
        "id": rid,
        "text": f"If the {n1} {v1}, the {n2} {v2}.",
        "ptb": IF_PTB.format(n1=n1, v1=v1, n2=n2, v2=v2),
        "label": "causal",
        "cause_span": [1, 4],
        "effect_span": [5, 8],
    }


class TestTrainAndTest:
    def test_train_then_test(self, tmp_path):
        runner = CliRunner()
        store = tmp_path / "store.json"
        train_file = tmp_path / "train.jsonl"
        train_file.write_text(
            json.dumps(causal_line("c1", "file", "fails", "system", "halts")) + "\n"
        )
        result = runner.invoke(
            main, ["train", "--store", str(store), "--input", str(train_file)]
        )
        assert result.exit_code == 0, result.output
        assert "c1: created [crea+] (pattern 0)" in result.output
        assert store.exists()

        probe_file = tmp_path / "probe.jsonl"
        probe_file.write_text(
            json.dumps(causal_line("c2", "user", "quits", "session", "ends")) + "\n"
        )
        result = runner.invoke(
            main, ["test", "--store", str(store), "--input", str(probe_file)]
        )
        assert result.exit_code == 0, result.output
        assert "pattern 0" in result.output
        assert "'the user quits'" in result.output
        assert "'the session ends'" in result.output

    def test_test_reports_no_match(self, tmp_path):
        runner = CliRunner()
        store = tmp_path / "store.json"
        train_file = tmp_path / "train.jsonl"
        # a stored negative first, so the created pattern's signature is
        # specified beyond the bare root and can actually reject probes
        negative = {
            "id": "n0",
            "text": "The parser reads.",
            "ptb": "(S (NP (DT The) (NN parser)) (VP (VBZ reads)) (. .))",
            "label": "noncausal",
        }
        lines = [negative, causal_line("c1", "file", "fails", "system", "halts")]
        train_file.write_text("".join(json.dumps(l) + "\n" for l in lines))
        runner.invoke(main, ["train", "--store", str(store), "--input", str(train_file)])
        probe_file = tmp_path / "probe.jsonl"
        probe_file.write_text(
            json.dumps(
                {
                    "id": "n1",
                    "text": "The gauge ticks.",
                    "ptb": "(S (NP (DT The) (NN gauge)) (VP (VBZ ticks)) (. .))",
                    "label": "noncausal",
                }
            )
            + "\n"
        )
        result = runner.invoke(
            main, ["test", "--store", str(store), "--input", str(probe_file)]
        )
        assert "n1: no-match" in result.output

    def test_malformed_gold_leaves_store_untouched(self, tmp_path):
        runner = CliRunner()
        store = tmp_path / "store.json"
        bad = causal_line("c1", "file", "fails", "system", "halts")
        bad["effect_span"] = [5, 99]
        train_file = tmp_path / "train.jsonl"
        train_file.write_text(json.dumps(bad) + "\n")
        result = runner.invoke(
            main, ["train", "--store", str(store), "--input", str(train_file)]
        )
        assert result.exit_code != 0
        assert not store.exists()

    def test_store_env_var(self, tmp_path, monkeypatch):
        runner = CliRunner()
        store = tmp_path / "env-store.json"
        monkeypatch.setenv("CEGLEARN_STORE", str(store))
        train_file = tmp_path / "train.jsonl"
        train_file.write_text(
            json.dumps(causal_line("c1", "file", "fails", "system", "halts")) + "\n"
        )
        result = runner.invoke(main, ["train", "--input", str(train_file)])
        assert result.exit_code == 0, result.output
        assert store.exists()
