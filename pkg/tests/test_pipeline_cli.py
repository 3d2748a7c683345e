import json
import os

import numpy as np
import pytest

from driverlens.cli import main
from driverlens.config import PipelineConfig, config_from_dict
from driverlens.errors import ConfigError
from driverlens.models import ModelSpec
from driverlens.synth import SynthSpec


def small_config_doc(out_dir, **overrides):
    doc = {
        "seed": 7,
        "input": {"synth": {"n_rows": 200, "n_features": 6, "n_informative": 2}},
        "splits": {"repeats": 2, "test_frac": 0.12},
        "models": ["LR", "GNB"],
        "lime": {"n_samples": 300},
        "select_k": 3,
        "n_explain": 6,
        "out_dir": str(out_dir),
    }
    doc.update(overrides)
    return doc


def write_config(tmp_path, doc, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc), encoding="utf-8")
    return str(path)


class TestConfigValidation:
    def test_all_violations_reported_at_once(self):
        with pytest.raises(ConfigError) as excinfo:
            PipelineConfig(
                seed=0,
                synth=SynthSpec(n_rows=100, n_features=6, n_informative=2),
                repeats=0,
                test_frac=1.5,
                select_k=0,
                threads=0,
            )
        message = str(excinfo.value)
        for fragment in ("repeats", "test_frac", "select_k", "threads"):
            assert fragment in message

    def test_input_required(self):
        with pytest.raises(ConfigError, match="input required"):
            PipelineConfig(seed=0)

    def test_csv_needs_target(self):
        with pytest.raises(ConfigError, match="target column"):
            PipelineConfig(seed=0, csv_path="x.csv")

    def test_unknown_top_level_key(self):
        with pytest.raises(ConfigError, match="unknown config key"):
            config_from_dict({"inputs": {}, "seed": 1})

    def test_unknown_algorithm_listed(self):
        doc = {"input": {"synth": {}}, "models": ["LR", "SVM"]}
        with pytest.raises(ConfigError, match="SVM"):
            config_from_dict(doc)

    def test_bad_lime_reported(self):
        doc = {"input": {"synth": {}}, "lime": {"kernel_width": -1.0}}
        with pytest.raises(ConfigError, match="kernel_width"):
            config_from_dict(doc)

    def test_default_models_cover_zoo(self):
        config = config_from_dict({"input": {"synth": {}}})
        assert [m.algorithm for m in config.models] == [
            "LR", "DTC", "RFC", "ETC", "GBC", "ABC", "KNN", "GNB", "MNB",
            "LDA", "QDA",
        ]

    def test_model_seeds_derived_per_algorithm(self):
        config = config_from_dict({"input": {"synth": {}}, "seed": 5})
        seeds = {m.algorithm: m.seed for m in config.models}
        assert len(set(seeds.values())) == len(seeds)  # all distinct
        again = config_from_dict({"input": {"synth": {}}, "seed": 5})
        assert {m.algorithm: m.seed for m in again.models} == seeds


class TestCliExitCodes:
    def test_schema_subcommand(self, capsys):
        assert main(["schema"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["schema_version"] == 1
        assert "models" in doc["fields"]

    def test_missing_config_file(self, tmp_path, capsys):
        code = main(["run", "--config", str(tmp_path / "none.json")])
        assert code == 1
        assert "error" in capsys.readouterr().err

    def test_invalid_json_config(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text("{not json", encoding="utf-8")
        assert main(["run", "--config", str(path)]) == 1

    def test_invalid_field_is_usage_error(self, tmp_path):
        doc = small_config_doc(tmp_path / "out", select_k=0)
        assert main(["run", "--config", write_config(tmp_path, doc)]) == 1

    def test_data_error_exit_2_and_no_partial_report(self, tmp_path, capsys):
        csv_path = tmp_path / "broken.csv"
        csv_path.write_text("a,b,label\n1,2,x\n3,y\n", encoding="utf-8")
        out_dir = tmp_path / "out"
        doc = small_config_doc(out_dir)
        doc["input"] = {"csv": str(csv_path), "target": "label"}
        code = main(["run", "--config", write_config(tmp_path, doc)])
        assert code == 2
        assert "line 3" in capsys.readouterr().err
        assert not (out_dir / "report.json").exists()

    def test_unknown_subcommand_is_usage_error(self, capsys):
        assert main(["explode"]) == 1


class TestCliStages:
    def test_synth_writes_csv(self, tmp_path, capsys):
        doc = small_config_doc(tmp_path / "out")
        assert main(["synth", "--config", write_config(tmp_path, doc)]) == 0
        assert (tmp_path / "out" / "synthetic.csv").exists()

    def test_prep_writes_scaler(self, tmp_path):
        doc = small_config_doc(tmp_path / "out")
        assert main(["prep", "--config", write_config(tmp_path, doc)]) == 0
        out = tmp_path / "out"
        assert (out / "scaler.json").exists()
        assert not (out / "metrics_before.json").exists()

    def test_train_writes_metrics(self, tmp_path):
        doc = small_config_doc(tmp_path / "out")
        assert main(["train", "--config", write_config(tmp_path, doc)]) == 0
        records = json.loads((tmp_path / "out" / "metrics_before.json").read_text())
        assert [r["model"] for r in records] == ["LR", "GNB"]
        assert not (tmp_path / "out" / "report.json").exists()

    def test_explain_writes_explanations(self, tmp_path):
        doc = small_config_doc(tmp_path / "out")
        assert main(["explain", "--config", write_config(tmp_path, doc)]) == 0
        payload = json.loads((tmp_path / "out" / "explanations.json").read_text())
        assert len(payload["explanations"]) == 6
        assert payload["model"] in ("LR", "GNB")

    def test_select_writes_ranking_and_chart(self, tmp_path):
        doc = small_config_doc(tmp_path / "out")
        assert main(["select", "--config", write_config(tmp_path, doc)]) == 0
        out = tmp_path / "out"
        assert (out / "ranking.json").exists()
        assert (out / "importance.svg").exists()
        assert not (out / "report.json").exists()

    def test_compare_prints_tables(self, tmp_path, capsys):
        doc = small_config_doc(tmp_path / "out")
        assert main(["compare", "--config", write_config(tmp_path, doc)]) == 0
        printed = capsys.readouterr().out
        assert printed.count("| Model Name | Accuracy |") == 2
        assert "Best model:" in printed

    def test_run_writes_all_artifacts(self, tmp_path):
        doc = small_config_doc(tmp_path / "out")
        assert main(["run", "--config", write_config(tmp_path, doc)]) == 0
        out = tmp_path / "out"
        for name in ("report.json", "report.md", "ranking.json", "importance.svg"):
            assert (out / name).exists(), name
        report = json.loads((out / "report.json").read_text())
        assert report["config"]["seed"] == 7
        assert len(report["before"]) == 2


class TestDeterminism:
    def test_same_seed_byte_identical(self, tmp_path):
        doc = small_config_doc(tmp_path / "out")
        config_path = write_config(tmp_path, doc)
        assert main(["run", "--config", config_path]) == 0
        first = (tmp_path / "out" / "report.json").read_bytes()
        assert main(["run", "--config", config_path]) == 0
        second = (tmp_path / "out" / "report.json").read_bytes()
        assert first == second

    def test_thread_count_byte_identical(self, tmp_path):
        doc = small_config_doc(tmp_path / "o1")
        path = write_config(tmp_path, doc)
        assert main(["run", "--config", path, "--threads", "1",
                     "--out", str(tmp_path / "o1")]) == 0
        assert main(["run", "--config", path, "--threads", "8",
                     "--out", str(tmp_path / "o2")]) == 0
        b1 = (tmp_path / "o1" / "report.json").read_bytes()
        b2 = (tmp_path / "o2" / "report.json").read_bytes()
        assert b1 == b2

    def test_seed_override_changes_results(self, tmp_path):
        doc = small_config_doc(tmp_path / "s1")
        path = write_config(tmp_path, doc)
        assert main(["run", "--config", path, "--out", str(tmp_path / "s1")]) == 0
        assert main(["run", "--config", path, "--seed", "123",
                     "--out", str(tmp_path / "s2")]) == 0
        r1 = json.loads((tmp_path / "s1" / "report.json").read_text())
        r2 = json.loads((tmp_path / "s2" / "report.json").read_text())
        assert r1["config"]["seed"] != r2["config"]["seed"]


def test_separable_synth_rfc_reaches_high_accuracy(tmp_path):
    # well-separated Gaussians are easily classified: the forest must clear
    # 0.9 test accuracy before feature selection
    from driverlens.pipeline import run_pipeline

    config = config_from_dict({
        "seed": 7,
        "input": {"synth": {"n_rows": 2000, "separation": 3.0}},
        "splits": {"repeats": 2, "test_frac": 0.12},
        "models": ["RFC"],
        "lime": {"n_samples": 400},
        "n_explain": 10,
        "out_dir": str(tmp_path / "out"),
    })
    report = run_pipeline(config)
    assert report.before[0].model == "RFC"
    assert report.before[0].accuracy >= 0.9


class TestCsvPipeline:
    def make_csv(self, tmp_path):
        rng = np.random.default_rng(0)
        lines = ["speed,road,temp,behavior"]
        roads = ["dry", "icy", "wet"]
        for i in range(120):
            c = int(rng.integers(0, 3))
            speed = rng.normal(40 + 15 * c, 4)
            temp = rng.normal(10, 5)
            road = roads[int(rng.integers(0, 3))]
            label = ["calm", "normal", "reckless"][c]
            lines.append(f"{speed:.3f},{road},{temp:.3f},{label}")
        path = tmp_path / "drivers.csv"
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return str(path)

    def test_csv_input_end_to_end(self, tmp_path):
        csv_path = self.make_csv(tmp_path)
        out_dir = tmp_path / "out"
        doc = small_config_doc(out_dir, select_k=2)
        doc["input"] = {"csv": csv_path, "target": "behavior"}
        assert main(["run", "--config", write_config(tmp_path, doc)]) == 0
        assert (out_dir / "encoding.json").exists()
        report = json.loads((out_dir / "report.json").read_text())
        assert len(report["selected_features"]) == 2
        md = (out_dir / "report.md").read_text()
        assert "| Model Name | Accuracy | F1 Score | EV | MSE | RMSE | R² | D² Score |" in md

    def test_leak_safe_flag(self, tmp_path):
        csv_path = self.make_csv(tmp_path)
        out_dir = tmp_path / "out"
        doc = small_config_doc(out_dir)
        doc["input"] = {"csv": csv_path, "target": "behavior"}
        path = write_config(tmp_path, doc)
        assert main(["run", "--config", path, "--leak-safe"]) == 0
        report = json.loads((out_dir / "report.json").read_text())
        assert report["config"]["leak_safe"] is True
