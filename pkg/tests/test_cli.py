from __future__ import annotations

import json
import shutil
from pathlib import Path

import pytest

from styleseam import cli
from synthdata import generate_corpus


def run_cli(capsys, *args: str) -> tuple[int, str]:
    code = cli.main([str(a) for a in args])
    captured = capsys.readouterr()
    return code, captured.out


@pytest.fixture(scope="session")
def trained(synth_corpus, tmp_path_factory) -> Path:
    out = tmp_path_factory.mktemp("trained")
    code = cli.main(
        [
            "train",
            "--dataset-root", str(synth_corpus),
            "--difficulty", "easy",
            "--split", "train",
            "--out", str(out),
        ]
    )
    assert code == 0
    return out


class TestStats:
    def test_fixture_counts(self, capsys, pan_fixture):
        code, out = run_cli(
            capsys, "stats", "--dataset-root", pan_fixture, "--difficulty", "easy", "--split", "train"
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["easy"]["train"] == {"documents": 4, "pairs": 7, "zeros": 3, "ones": 4}

    def test_all_difficulties(self, capsys, pan_fixture):
        code, out = run_cli(
            capsys, "stats", "--dataset-root", pan_fixture, "--difficulty", "all", "--split", "validation"
        )
        assert code == 0
        payload = json.loads(out)
        assert set(payload) == {"easy", "medium", "hard"}
        assert payload["medium"]["validation"]["zeros"] == 4

    def test_missing_directory_is_exit_2(self, capsys, tmp_path):
        code, _ = run_cli(capsys, "stats", "--dataset-root", tmp_path / "nope")
        assert code == 2

    def test_empty_directory_is_exit_2(self, capsys, tmp_path):
        (tmp_path / "easy" / "train").mkdir(parents=True)
        code, _ = run_cli(capsys, "stats", "--dataset-root", tmp_path, "--difficulty", "easy")
        assert code == 2

    def test_env_var_fallback(self, capsys, pan_fixture, monkeypatch):
        monkeypatch.setenv(cli.DATASET_ENV_VAR, str(pan_fixture))
        code, out = run_cli(capsys, "stats", "--difficulty", "hard", "--split", "train")
        assert code == 0
        assert json.loads(out)["hard"]["train"]["pairs"] == 7

    def test_no_root_at_all_is_exit_2(self, capsys, monkeypatch):
        monkeypatch.delenv(cli.DATASET_ENV_VAR, raising=False)
        code, _ = run_cli(capsys, "stats")
        assert code == 2

    def test_unlabeled_split_reports_null_counts(self, capsys, tmp_path):
        test_dir = tmp_path / "easy" / "test"
        test_dir.mkdir(parents=True)
        (test_dir / "problem-1.txt").write_text("A\nB\nC\n", encoding="utf-8")
        code, out = run_cli(
            capsys, "stats", "--dataset-root", tmp_path, "--difficulty", "easy", "--split", "test"
        )
        assert code == 0
        assert json.loads(out)["easy"]["test"] == {
            "documents": 1,
            "pairs": 2,
            "zeros": None,
            "ones": None,
        }


class TestTrain:
    def test_writes_artifacts(self, trained):
        assert (trained / cli.MODEL_FILENAME).is_file()
        assert (trained / cli.VOCABULARY_FILENAME).is_file()

    def test_test_split_rejected(self, capsys, synth_corpus, tmp_path):
        code, _ = run_cli(
            capsys,
            "train",
            "--dataset-root", synth_corpus,
            "--difficulty", "easy",
            "--split", "test",
            "--out", tmp_path,
        )
        assert code == 2

    def test_all_difficulty_rejected(self, capsys, synth_corpus, tmp_path):
        code, _ = run_cli(
            capsys,
            "train",
            "--dataset-root", synth_corpus,
            "--difficulty", "all",
            "--out", tmp_path,
        )
        assert code == 2


class TestPredictAndEvaluate:
    def test_pipeline(self, capsys, synth_corpus, trained, tmp_path):
        out = tmp_path / "pred"
        code, _ = run_cli(
            capsys,
            "predict",
            "--dataset-root", synth_corpus,
            "--difficulty", "easy",
            "--split", "validation",
            "--model", trained / cli.MODEL_FILENAME,
            "--out", out,
        )
        assert code == 0
        assert (out / cli.PREDICTIONS_FILENAME).is_file()
        solutions = sorted(out.glob("solution-problem-*.json"))
        assert len(solutions) == 50

        truth_dir = synth_corpus / "easy" / "validation"
        code, report_out = run_cli(
            capsys, "evaluate", out, truth_dir, "--difficulty", "easy", "--out", out
        )
        assert code == 0
        payload = json.loads(report_out)
        assert payload["easy"]["pairs"] > 0
        assert (out / cli.REPORT_FILENAME).is_file()

    def test_solution_label_count_matches_paragraphs(self, capsys, synth_corpus, trained, tmp_path):
        out = tmp_path / "pred"
        run_cli(
            capsys,
            "predict",
            "--dataset-root", synth_corpus,
            "--difficulty", "easy",
            "--split", "validation",
            "--model", trained / cli.MODEL_FILENAME,
            "--out", out,
        )
        doc = (synth_corpus / "easy" / "validation" / "problem-1.txt").read_text().splitlines()
        changes = json.loads((out / "solution-problem-1.json").read_text())["changes"]
        assert len(changes) == len(doc) - 1

    def test_gold_as_predictions_scores_one(self, capsys, pan_fixture, tmp_path):
        truth_dir = pan_fixture / "easy" / "validation"
        for truth_file in truth_dir.glob("truth-problem-*.json"):
            doc_id = truth_file.stem.split("-")[-1]
            changes = json.loads(truth_file.read_text())["changes"]
            (tmp_path / f"solution-problem-{doc_id}.json").write_text(json.dumps({"changes": changes}))
        code, out = run_cli(capsys, "evaluate", tmp_path, truth_dir, "--difficulty", "easy")
        assert code == 0
        assert json.loads(out)["easy"]["macro_f1"] == 1.0

    def test_coverage_gap_is_exit_2(self, capsys, pan_fixture, tmp_path):
        truth_dir = pan_fixture / "easy" / "validation"
        (tmp_path / "solution-problem-1.json").write_text('{"changes": [0, 0]}')
        code, _ = run_cli(capsys, "evaluate", tmp_path, truth_dir)
        assert code == 2

    def test_dimension_mismatch_is_exit_2(self, capsys, synth_corpus, trained, tmp_path):
        from styleseam.features import fit_vocabulary, save_vocabulary

        tiny = tmp_path / "tiny-vocab.json"
        save_vocabulary(fit_vocabulary(["alpha beta"], set()), tiny)
        code, _ = run_cli(
            capsys,
            "predict",
            "--dataset-root", synth_corpus,
            "--difficulty", "easy",
            "--split", "validation",
            "--model", trained / cli.MODEL_FILENAME,
            "--vocab", tiny,
            "--out", tmp_path / "out",
        )
        assert code == 2

    def test_predict_rerun_identical(self, capsys, synth_corpus, trained, tmp_path):
        outputs = []
        for name in ("a", "b"):
            out = tmp_path / name
            run_cli(
                capsys,
                "predict",
                "--dataset-root", synth_corpus,
                "--difficulty", "easy",
                "--split", "validation",
                "--model", trained / cli.MODEL_FILENAME,
                "--out", out,
            )
            outputs.append((out / cli.PREDICTIONS_FILENAME).read_bytes())
        assert outputs[0] == outputs[1]


class TestRandomBaselineCommand:
    def test_outputs_and_determinism(self, capsys, pan_fixture, tmp_path):
        outputs = []
        for name in ("a", "b"):
            out = tmp_path / name
            code, _ = run_cli(
                capsys,
                "random-baseline",
                "--dataset-root", pan_fixture,
                "--difficulty", "easy",
                "--split", "validation",
                "--seed", "5000",
                "--out", out,
            )
            assert code == 0
            outputs.append((out / cli.PREDICTIONS_FILENAME).read_bytes())
        assert outputs[0] == outputs[1]
        assert len(list((tmp_path / "a").glob("solution-problem-*.json"))) == 3


class TestEnsembleCommand:
    def _write_member(self, path: Path, scores: list[float], source: str) -> None:
        lines = [
            json.dumps({"doc_id": 1, "pair_index": i, "score": s, "source": source})
            for i, s in enumerate(scores)
        ]
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    def test_three_file_softmax_mean(self, capsys, tmp_path):
        files = []
        for name, scores in (("a", [0.2, 1.0]), ("b", [0.3, 1.0]), ("c", [0.9, 0.0])):
            path = tmp_path / f"{name}.ndjson"
            self._write_member(path, scores, name)
            files.append(path)
        out = tmp_path / "combined"
        code, _ = run_cli(capsys, "ensemble", *files, "--mode", "softmax_mean", "--out", out)
        assert code == 0
        lines = [json.loads(l) for l in (out / cli.PREDICTIONS_FILENAME).read_text().splitlines()]
        assert lines[0]["score"] == pytest.approx(1.4 / 3.0)

    def test_unanimous_majority_identity(self, capsys, tmp_path):
        source_file = tmp_path / "one.ndjson"
        self._write_member(source_file, [1.0, 0.0, 1.0], "m")
        copies = [source_file]
        for i in (2, 3):
            copy = tmp_path / f"copy{i}.ndjson"
            shutil.copy(source_file, copy)
            copies.append(copy)
        out = tmp_path / "combined"
        code, _ = run_cli(capsys, "ensemble", *copies, "--mode", "majority", "--out", out)
        assert code == 0
        lines = [json.loads(l) for l in (out / cli.PREDICTIONS_FILENAME).read_text().splitlines()]
        assert [l["score"] for l in lines] == [1.0, 0.0, 1.0]

    def test_even_count_majority_is_exit_2(self, capsys, tmp_path):
        files = []
        for name in ("a", "b"):
            path = tmp_path / f"{name}.ndjson"
            self._write_member(path, [1.0], name)
            files.append(path)
        code, _ = run_cli(capsys, "ensemble", *files, "--mode", "majority", "--out", tmp_path / "x")
        assert code == 2

    def test_coverage_mismatch_is_exit_2(self, capsys, tmp_path):
        a, b, c = tmp_path / "a.ndjson", tmp_path / "b.ndjson", tmp_path / "c.ndjson"
        self._write_member(a, [1.0, 0.0], "a")
        self._write_member(b, [1.0], "b")
        self._write_member(c, [0.0, 1.0], "c")
        code, _ = run_cli(capsys, "ensemble", a, b, c, "--mode", "majority", "--out", tmp_path / "x")
        assert code == 2


class TestSolutionsCommand:
    def test_conversion(self, capsys, tmp_path):
        preds = tmp_path / "preds.ndjson"
        preds.write_text(
            '{"doc_id": 4, "pair_index": 0, "score": 0.9, "source": "m"}\n'
            '{"doc_id": 4, "pair_index": 1, "score": 0.1, "source": "m"}\n'
        )
        out = tmp_path / "solutions"
        code, _ = run_cli(capsys, "solutions", preds, "--out", out)
        assert code == 0
        assert json.loads((out / "solution-problem-4.json").read_text()) == {"changes": [1, 0]}


class TestConfigFile:
    def test_config_supplies_values(self, capsys, pan_fixture, tmp_path):
        config = tmp_path / "run.json"
        config.write_text(
            json.dumps({"dataset_root": str(pan_fixture), "difficulty": "medium", "split": "train"})
        )
        code, out = run_cli(capsys, "stats", "--config", config)
        assert code == 0
        assert json.loads(out)["medium"]["train"]["pairs"] == 9

    def test_flags_override_config(self, capsys, pan_fixture, tmp_path):
        config = tmp_path / "run.json"
        config.write_text(json.dumps({"dataset_root": str(pan_fixture), "difficulty": "medium"}))
        code, out = run_cli(capsys, "stats", "--config", config, "--difficulty", "hard")
        assert code == 0
        payload = json.loads(out)
        assert "hard" in payload and "medium" not in payload

    def test_unknown_key_is_exit_2(self, capsys, tmp_path):
        config = tmp_path / "run.json"
        config.write_text('{"dataset_roots": "/nope"}')
        code, _ = run_cli(capsys, "stats", "--config", config)
        assert code == 2


def test_synthetic_corpus_is_loadable(synth_corpus, capsys):
    code, out = run_cli(
        capsys, "stats", "--dataset-root", synth_corpus, "--difficulty", "easy", "--split", "train"
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["easy"]["train"]["documents"] == 100
    # both labels must be present or the training baseline is degenerate
    assert payload["easy"]["train"]["zeros"] > 10
    assert payload["easy"]["train"]["ones"] > 10
