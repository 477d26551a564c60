import json

import pytest

from crnequil.cli import PipelineConfig, main, run_pipeline
from crnequil.models import path as model_path


def run(tmp_path, text=None, model=None, **kwargs):
    if model is not None:
        input_path = model_path(model)
    else:
        input_path = tmp_path / "net.crn"
        input_path.write_text(text, encoding="utf-8")
        input_path = str(input_path)
    cfg = PipelineConfig(input_path=input_path, **kwargs)
    return run_pipeline(cfg)


def strip_timing(report):
    out = dict(report)
    out.pop("timing", None)
    return out


class TestPipeline:
    def test_toy_full_run(self, tmp_path):
        code, report = run(tmp_path, model="toy")
        assert code == 0
        assert report["schema_version"] == 1
        assert report["summary"]["deficiency"] == 1
        assert report["decomposition"]["blocks"] == [["R1", "R4", "R5"], ["R2", "R3"]]
        assert report["translation"]["effective_deficiency"] == 0
        assert report["translation"]["kinetic_deficiency"] == 0
        assert report["verification"]["passed"] is True
        assert set(report["acr"]) == {"A", "B", "C"}

    def test_histidine_report_contents(self, tmp_path):
        code, report = run(tmp_path, model="histidine_kinase")
        assert code == 0
        block = report["translation"]["blocks"][0]
        assert block["efms"]["modes"] == [["R1", "R2", "R4"], ["R2", "R3"]]
        assert set(map(tuple, block["graph_edges"])) == {
            ("R2", "R1"),
            ("R4", "R2"),
            ("R1", "R4"),
            ("R2", "R3"),
            ("R3", "R2"),
        }
        assert report["translation"]["alpha"] == {"R1": "Y_p", "R2": "0", "R3": "0", "R4": "X_p"}

    def test_stage_prefix_outputs_match_full_run(self, tmp_path):
        def assert_subset(partial, full, path):
            if isinstance(partial, dict):
                assert isinstance(full, dict), path
                for key, value in partial.items():
                    assert key in full, (path, key)
                    assert_subset(value, full[key], f"{path}.{key}")
            elif isinstance(partial, list):
                assert isinstance(full, list) and len(partial) == len(full), path
                for i, (p, f) in enumerate(zip(partial, full)):
                    assert_subset(p, f, f"{path}[{i}]")
            else:
                assert partial == full, path

        _, full = run(tmp_path, model="histidine_kinase")
        for stage in ("parse", "decompose", "efm", "translate", "parametrize"):
            code, partial = run(tmp_path, model="histidine_kinase", stage=stage)
            assert code == 0
            for key in partial:
                if key in ("timing", "stage"):
                    continue
                assert_subset(partial[key], full[key], f"{stage}:{key}")

    def test_same_seed_identical_report(self, tmp_path):
        _, a = run(tmp_path, model="two_protein", seed=7)
        _, b = run(tmp_path, model="two_protein", seed=7)
        assert json.dumps(strip_timing(a)) == json.dumps(strip_timing(b))

    def test_missing_file_exit_1(self):
        code, report = run_pipeline(PipelineConfig(input_path="/nonexistent/file.crn"))
        assert code == 1
        assert report["error"]["stage"] == "parse"

    def test_syntax_error_exit_1(self, tmp_path):
        code, report = run(tmp_path, text="R1: A -> ; k1\n")
        assert code == 1
        assert "line 1" in report["error"]["message"]

    def test_untranslatable_network_exit_2(self, tmp_path):
        code, report = run(tmp_path, text="R1: A -> B ; k1\n")
        assert code == 2
        assert report["error"]["stage"] == "translate"

    def test_nonstandard_tolerance_and_samples(self, tmp_path):
        code, report = run(tmp_path, model="toy", samples=13, tolerance=1e-6)
        assert code == 0
        assert report["verification"]["samples"] == 13
        assert report["verification"]["tolerance"] == 1e-6

    def test_config_validation(self):
        with pytest.raises(ValueError):
            PipelineConfig(input_path="x", tolerance=-1.0)
        with pytest.raises(ValueError):
            PipelineConfig(input_path="x", stage="bogus")
        with pytest.raises(ValueError):
            PipelineConfig(input_path="x", max_blp_nodes=0)


class TestMain:
    def test_main_writes_output_file(self, tmp_path, capsys):
        out = tmp_path / "report.json"
        code = main(["--input", model_path("toy"), "--out", str(out), "--seed", "1"])
        assert code == 0
        report = json.loads(out.read_text(encoding="utf-8"))
        assert report["verification"]["passed"] is True
        assert capsys.readouterr().out == ""

    def test_main_stdout_and_stage(self, tmp_path, capsys):
        code = main(["--input", model_path("toy"), "--stage", "parse"])
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert report["stage"] == "parse"
        assert "network" in report and "verification" not in report

    def test_main_exit_codes(self, tmp_path):
        bad = tmp_path / "bad.crn"
        bad.write_text("R1: A -> B ; k1\n", encoding="utf-8")
        assert main(["--input", str(bad), "--out", str(tmp_path / "r.json")]) == 2
