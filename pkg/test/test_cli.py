import json

import pytest

from sym_workbench.errors import EXIT_INPUT, EXIT_OK, EXIT_VERIFICATION
from sym_workbench.harness import main

RING = ["--p", "3", "--r", "5", "--precision", "5", "--truncation", "9", "--denominator-budget", "3"]
RUNNING = ["--b", "1", "--z", "2", "--a", "2"]


def _read(path):
    return json.loads(path.read_text())


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    out = tmp_path_factory.mktemp("pipeline")
    codes = [main(["sym-build", *RING, *RUNNING, "--out", str(out)])]
    for command, source in (("deform", "structure"), ("connection", "deform"), ("dwork", "connection")):
        codes.append(main([command, "--input", str(out / f"{source}.json"), "--out", str(out)]))
    return out, codes


def test_ring_info(tmp_path):
    assert main(["ring-info", "--p", "5", "--r", "2", "--out", str(tmp_path)]) == EXIT_OK
    payload = _read(tmp_path / "ring.json")
    assert payload["provenance"]["p"] == 5
    assert payload["provenance"]["git_describe"]


def test_pipeline_passes(pipeline):
    _, codes = pipeline
    assert codes == [EXIT_OK] * 4


def test_structure_artifact(pipeline):
    out, _ = pipeline
    structure = _read(out / "structure.json")
    assert structure["ring"]["D"] == 3
    assert structure["spec"]["sigma"] == [0, 4]
    report = _read(out / "verify_report.json")
    assert report["status"] == "pass"
    assert report["dims_N"] == [1, 2, 2, 2, 1]


def test_deform_artifact(pipeline):
    out, _ = pipeline
    deform = _read(out / "deform.json")
    assert deform["truncation"] == 9
    assert deform["sequence"]["alt"][0] == "drops_to_m1"
    assert _read(out / "suff_report.json")["status"] == "pass"


def test_dwork_artifact(pipeline):
    out, _ = pipeline
    report = _read(out / "dwork_report.json")
    assert set(report["dwork"]) == {"N", "M"}
    assert report["velf"]["det_ok"]
    assert report["velf"]["pi_theta_ok"]
    assert report["provenance"]["T"] == 9


def test_rank_one_sym_build(tmp_path):
    code = main(["sym-build", "--p", "3", "--r", "3", "--b", "0", "--z", "2", "--a", "1", "--out", str(tmp_path)])
    assert code == EXIT_OK
    assert _read(tmp_path / "verify_report.json")["ranks_M"] == [1, 1, 1]


@pytest.mark.parametrize("extra", [
    ["--b", "1", "--z", "2", "--a", "3/2"],
    ["--b", "1", "--z", "2"],
    ["--b", "1", "--z", "2", "--a", "1/3"],
])
def test_sym_build_rejects_bad_specs(tmp_path, capsys, extra):
    assert main(["sym-build", *RING, *extra, "--out", str(tmp_path)]) == EXIT_INPUT
    assert "[error]" in capsys.readouterr().err


def test_unknown_command():
    assert main(["bogus"]) == EXIT_INPUT


def test_missing_input(tmp_path):
    assert main(["deform", "--out", str(tmp_path)]) == EXIT_INPUT
    assert main(["deform", "--input", str(tmp_path / "absent.json"), "--out", str(tmp_path)]) == EXIT_INPUT


def test_slopes(tmp_path):
    source = tmp_path / "phi.json"
    source.write_text(json.dumps({"matrices": [[[0, 1], [3, 0]]]}))
    assert main(["slopes", "--p", "3", "--r", "1", "--input", str(source), "--out", str(tmp_path)]) == EXIT_OK
    payload = _read(tmp_path / "slopes.json")
    assert payload["ungraded"] == ["1/2", "1/2"]
    assert payload["graded"][0]["degree"] == 0


def test_extpow(tmp_path):
    source = tmp_path / "window.json"
    source.write_text(json.dumps({"matrices": [[[1, 0, 0], [0, 1, 0], [0, 0, 3]]]}))
    code = main(["extpow", "--p", "3", "--r", "1", "--k", "2", "--trials", "3",
                 "--input", str(source), "--out", str(tmp_path)])
    # wedge^2 of diag(1, 1, 3) is diag(1, 3, 3): e1^e2 has slope 0, so psi# is not nilpotent
    assert code == EXIT_VERIFICATION
    report = _read(tmp_path / "extpow_report.json")
    assert report["ranks"] == [3]
    assert report["independence"]["status"] == "pass"
    w4 = next(c for c in report["window"]["checks"] if c["name"] == "W.4")
    assert w4["status"] == "fail"
    assert report["window"]["status"] == "fail"


def test_localmodel(tmp_path):
    code = main(["localmodel", "--p", "3", "--precision", "3", "--n", "3", "--k", "1", "--nu", "1", "--mu", "2",
                 "--samples", "20", "--out", str(tmp_path)])
    assert code == EXIT_OK
    payload = _read(tmp_path / "localmodel_report.json")
    assert payload["report"]["disagreements"] == 0
    assert main(["localmodel", "--n", "3", "--k", "1", "--nu", "2", "--mu", "3", "--out", str(tmp_path)]) == EXIT_INPUT
