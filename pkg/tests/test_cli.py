import json

import pytest
from click.testing import CliRunner

from reval.cli import main


@pytest.fixture()
def runner():
    return CliRunner()


@pytest.fixture()
def corpus_file(tmp_path):
    lines = [
        {"id": "1", "text": "alpha beta #x #y"},
        {"id": "2", "text": "alpha gamma #x"},
        {"id": "3", "text": "beta gamma #y"},
        {"id": "4", "text": "alpha beta gamma #z"},
        {"id": "5", "text": "delta alpha #x #z"},
        {"id": "6", "text": "beta delta #y #z"},
        {"id": "7", "text": "gamma delta #z"},
        {"id": "8", "text": "alpha delta #x"},
        {"id": "9", "text": "beta gamma delta #y"},
        {"id": "10", "text": "alpha beta delta #z"},
    ]
    path = tmp_path / "corpus.jsonl"
    path.write_text("\n".join(json.dumps(x) for x in lines) + "\n")
    return path


def summary_of(result):
    assert result.exit_code == 0, result.output + result.stderr
    return json.loads(result.stdout.strip().splitlines()[-1])


class TestStages:
    def test_chain_through_cli(self, runner, corpus_file, tmp_path):
        work = str(tmp_path / "work")
        pre = summary_of(runner.invoke(main, [
            "preprocess", "--corpus", str(corpus_file), "--workdir", work, "--seed", "5",
        ]))
        assert pre["stage"] == "preprocess"
        assert pre["tweets_kept"] == 10

        emb = summary_of(runner.invoke(main, [
            "embed-toy", "--workdir", work, "--dim", "8", "--seed", "5",
        ]))
        assert emb["dim"] == 8

        cen = summary_of(runner.invoke(main, ["centroids", "--workdir", work]))
        assert cen["hashtags"] == 3

        thes = summary_of(runner.invoke(main, ["thesaurus", "--workdir", work, "--k", "2"]))
        assert thes["k"] == 2

        rec = summary_of(runner.invoke(main, [
            "recommend", "--workdir", work, "--top-r", "2", "--threshold", "0.2",
        ]))
        assert rec["r"] == 2

        ev = summary_of(runner.invoke(main, [
            "evaluate", "--workdir", work, "--k", "2", "--top-r", "2",
        ]))
        assert ev["stage"] == "evaluate"
        assert 0.0 <= ev["average_reval_hit_ratio"] <= 1.0

    def test_sweep_demo(self, runner, tmp_path):
        work = str(tmp_path / "sweep")
        summary = summary_of(runner.invoke(main, [
            "sweep", "--demo", "--workdir", work,
            "--k-values", "0,2", "--r-values", "1,2", "--dim", "16",
        ]))
        assert summary["rows"] == 4
        assert summary["k_values"] == [0, 2]

    def test_config_file_defaults_and_flag_override(self, runner, corpus_file, tmp_path):
        config = tmp_path / "run.toml"
        config.write_text("dim = 8\nseed = 3\nk_values = 0,1\nr_values = 1\nthreshold = 0.2\n")
        work = str(tmp_path / "work")
        summary = summary_of(runner.invoke(main, [
            "sweep", "--corpus", str(corpus_file), "--workdir", work,
            "--config", str(config), "--dim", "4",
        ]))
        assert summary["dim"] == 4  # flag wins
        assert summary["k_values"] == [0, 1]  # from config

    def test_thesaurus_k_defaults_to_largest_configured(self, runner, corpus_file, tmp_path):
        config = tmp_path / "run.toml"
        config.write_text("k_values = 0,1,2\n")
        work = str(tmp_path / "work")
        runner.invoke(main, ["preprocess", "--corpus", str(corpus_file), "--workdir", work])
        runner.invoke(main, ["embed-toy", "--workdir", work, "--dim", "8"])
        runner.invoke(main, ["centroids", "--workdir", work])
        thes = summary_of(runner.invoke(main, [
            "thesaurus", "--workdir", work, "--config", str(config),
        ]))
        assert thes["k"] == 2


class TestExitCodes:
    def test_missing_corpus_exits_2(self, runner, tmp_path):
        result = runner.invoke(main, [
            "preprocess", "--corpus", str(tmp_path / "absent.jsonl"),
            "--workdir", str(tmp_path / "w"),
        ])
        assert result.exit_code == 2
        assert "error" in result.stderr

    def test_degenerate_corpus_exits_4(self, runner, tmp_path):
        corpus = tmp_path / "corpus.jsonl"
        corpus.write_text('{"id": "1", "text": "tagless"}\n')
        result = runner.invoke(main, [
            "preprocess", "--corpus", str(corpus), "--workdir", str(tmp_path / "w"),
        ])
        assert result.exit_code == 4

    def test_stale_thesaurus_exits_3(self, runner, corpus_file, tmp_path):
        work = str(tmp_path / "work")
        runner.invoke(main, ["preprocess", "--corpus", str(corpus_file), "--workdir", work])
        runner.invoke(main, ["embed-toy", "--workdir", work, "--dim", "8"])
        runner.invoke(main, ["centroids", "--workdir", work])
        runner.invoke(main, ["thesaurus", "--workdir", work, "--k", "1"])
        runner.invoke(main, ["embed-toy", "--workdir", work, "--dim", "8", "--seed", "99"])
        runner.invoke(main, ["centroids", "--workdir", work])
        runner.invoke(main, [
            "recommend", "--workdir", work, "--top-r", "1", "--threshold", "0.2",
        ])
        result = runner.invoke(main, [
            "evaluate", "--workdir", work, "--k", "1", "--top-r", "1",
            "--dictionary", str(tmp_path / "work" / "dictionary.bin"),
        ])
        assert result.exit_code == 3

    def test_corpus_and_demo_conflict(self, runner, tmp_path):
        result = runner.invoke(main, [
            "preprocess", "--corpus", "x.jsonl", "--demo", "--workdir", str(tmp_path),
        ])
        assert result.exit_code == 2

    def test_evaluate_needs_pairs_location(self, runner, tmp_path):
        result = runner.invoke(main, ["evaluate", "--workdir", str(tmp_path), "--k", "1"])
        assert result.exit_code == 2


class TestOutput:
    def test_summary_is_single_json_line(self, runner, tmp_path):
        result = runner.invoke(main, [
            "preprocess", "--demo", "--workdir", str(tmp_path / "w"),
        ])
        assert result.exit_code == 0
        lines = result.stdout.strip().splitlines()
        assert len(lines) == 1
        assert json.loads(lines[0])["stage"] == "preprocess"
