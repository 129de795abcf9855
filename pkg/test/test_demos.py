import json

import pytest

from sym_workbench.demos import clean_sample_specs as cleanup
from sym_workbench.demos.populate_sample_specs import create_rank_one_spec, create_running_spec, create_split_spec
from sym_workbench.errors import EXIT_OK
from sym_workbench.harness import main


@pytest.fixture
def spec_dir(tmp_path, monkeypatch):
    specs = tmp_path / "data" / "specs"
    paths = {
        "RUNNING_SPEC_PATH": str(specs / "running_instance.json"),
        "TRIVIAL_SPEC_PATH": str(specs / "rank_one.json"),
        "SPLIT_SPEC_PATH": str(specs / "split_slopes.json"),
    }
    for name, value in paths.items():
        monkeypatch.setattr(cleanup, name, value)
    monkeypatch.setattr(cleanup, "SAMPLE_DIR", str(specs))
    monkeypatch.setattr(cleanup, "OUTPUT_DIR", str(tmp_path / "out"))
    return specs, paths


@pytest.mark.parametrize("create, name", [
    (create_rank_one_spec, "TRIVIAL_SPEC_PATH"),
    (create_split_spec, "SPLIT_SPEC_PATH"),
])
def test_sample_specs_build(spec_dir, tmp_path, create, name):
    _, paths = spec_dir
    path = create(paths[name])
    assert main(["sym-build", "--input", path, "--out", str(tmp_path / "out")]) == EXIT_OK
    report = json.loads((tmp_path / "out" / "verify_report.json").read_text())
    assert report["status"] == "pass"


def test_cleanup_removes_everything(spec_dir, tmp_path):
    specs, paths = spec_dir
    create_running_spec(paths["RUNNING_SPEC_PATH"])
    create_rank_one_spec(paths["TRIVIAL_SPEC_PATH"])
    (tmp_path / "out").mkdir()
    cleanup.clean_sample_specs()
    assert not specs.exists()
    assert not (tmp_path / "data").exists()
    assert not (tmp_path / "out").exists()
