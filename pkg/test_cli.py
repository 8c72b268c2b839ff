"""
Tests for the command-line driver and the check registry behind it.
"""

import json
import math

import pytest

from analysis.reports import ResidualReport
from checks import CheckContext, get_check_manager
from main import EXIT_FAIL, EXIT_INCOMPLETE, EXIT_INPUT, EXIT_PASS, VERIFY_CHECKS, main
from utils.errors import InputError


def run_json(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_group_command(capsys):
    code, document = run_json(capsys, ["group", "--p", "5"])
    assert code == EXIT_PASS
    assert document["command"] == "group"
    assert document["pass"] is True
    details = document["reports"]["group"]["details"]
    assert all(details["relations"].values())
    assert details["endpoint_order"]


def test_group_rejects_small_p(capsys):
    assert main(["group", "--p", "2"]) == EXIT_INPUT


def test_cycle_command(capsys):
    code, document = run_json(capsys, ["cycle", "--p", "3", "--form", "[1,1,-1]"])
    assert code == EXIT_PASS
    details = document["reports"]["cycle"]["details"]
    assert len(details["members"]) == 2
    assert details["certificate"] == {"2": True, "3": True}
    assert details["pole_involution"]


def test_cycle_depth_too_small(capsys):
    assert main(["cycle", "--p", "3", "--form", "[1,1,-1]", "--max-depth", "0"]) == EXIT_INCOMPLETE


@pytest.mark.parametrize("form", ["[1,1]", "not json", "[-1,1,1]", "[1,0,1]", "[2,3,-2]"])
def test_cycle_bad_seed(capsys, form):
    assert main(["cycle", "--p", "3", "--form", form]) == EXIT_INPUT


def test_verify_second_relation_trace(capsys, specs_dir):
    code, document = run_json(capsys, ["verify", str(specs_dir / "golden_p3_k1.json"), "--which", "r2"])
    assert code == EXIT_PASS
    report = document["reports"]["r2"]
    assert report["details"]["atoms_initial"] == 4
    assert report["details"]["atoms_merged"] == 2
    assert len(report["details"]["trace"]) == 3
    assert document["spec"]["p"] == 3


def test_verify_spec_flag_and_csv(capsys, specs_dir):
    code = main(["verify", "--spec", str(specs_dir / "golden_p3_k1.json"), "--which", "rpf1",
                 "--format", "csv"])
    lines = capsys.readouterr().out.splitlines()
    assert code == EXIT_PASS
    assert lines[0] == "check,s_re,s_im,residual"
    assert len(lines) == 101
    assert all(line.startswith("rpf1,") for line in lines[1:])


def test_output_format_from_environment(capsys, monkeypatch, specs_dir):
    monkeypatch.setenv("HECKE_RPF_OUTPUT_FORMAT", "csv")
    code = main(["verify", str(specs_dir / "golden_p3_k1.json"), "--which", "rpf2"])
    assert code == EXIT_PASS
    assert capsys.readouterr().out.startswith("check,s_re,s_im,residual")


def test_verify_writes_out_file(tmp_path, capsys, specs_dir):
    target = tmp_path / "report.json"
    code = main(["verify", str(specs_dir / "golden_p3_k1.json"), "--which", "lemma1", "--out", str(target)])
    assert code == EXIT_PASS
    assert capsys.readouterr().out == ""
    document = json.loads(target.read_text())
    assert document["reports"]["lemma1"]["details"]["anchor_error"] < 1e-10


def test_verify_functional_equation_on_golden_spec(capsys, specs_dir):
    code, document = run_json(capsys, ["verify", str(specs_dir / "golden_p3_k1.json"), "--which", "fe"])
    assert code == EXIT_PASS
    report = document["reports"]["fe"]
    assert report["pass"]
    assert report["max_residual"] <= 1e-8
    assert not report["details"].get("failures")


def test_reports_are_reproducible(capsys, specs_dir):
    argv = ["verify", str(specs_dir / "golden_p3_k1.json"), "--which", "rpf1,r2,lemma1", "--seed", "7"]
    assert main(argv) == EXIT_PASS
    first = capsys.readouterr().out
    assert main(argv) == EXIT_PASS
    assert capsys.readouterr().out == first
    assert main(argv + ["--format", "csv"]) == EXIT_PASS
    csv_first = capsys.readouterr().out
    assert main(argv + ["--format", "csv"]) == EXIT_PASS
    assert capsys.readouterr().out == csv_first


def test_tight_tolerance_fails(capsys, specs_dir):
    code = main(["verify", str(specs_dir / "golden_p3_k1.json"), "--which", "rpf1",
                 "--tolerance", "1e-30"])
    assert code == EXIT_FAIL


@pytest.mark.parametrize("argv", [
    ["verify", "--which", "r1"],
    ["verify", "missing.json"],
    ["verify", "SPEC", "--which", "bogus"],
    ["verify", "SPEC", "--tolerance", "-1"],
    ["verify", "SPEC", "--precision", "16"],
    ["frobnicate"],
])
def test_input_errors(capsys, specs_dir, argv):
    argv = [str(specs_dir / "golden_p3_k1.json") if a == "SPEC" else a for a in argv]
    assert main(argv) == EXIT_INPUT


def test_malformed_spec_documents(tmp_path, capsys):
    broken = tmp_path / "broken.json"
    broken.write_text("{\"p\": 3, \"k\": ")
    assert main(["verify", str(broken)]) == EXIT_INPUT

    even = tmp_path / "even.json"
    even.write_text(json.dumps({"p": 3, "k": 2, "terms": [{"seed_form": [1, 1, -1], "d": 1}]}))
    assert main(["verify", str(even)]) == EXIT_INPUT

    asymmetric = tmp_path / "asymmetric.json"
    asymmetric.write_text(json.dumps({"p": 3, "k": 1, "terms": [{"seed_form": [1, 2, -2], "d": 1}]}))
    assert main(["verify", str(asymmetric), "--which", "rpf1"]) == EXIT_INPUT


def test_series_and_functional_equation(tmp_path, capsys):
    coeffs = tmp_path / "delta_e6.json"
    assert main(["series", "delta_e6", "--terms", "50", "--out", str(coeffs)]) == EXIT_PASS
    document = json.loads(coeffs.read_text())
    assert document["weight"] == 18
    assert document["coeffs"][:3] == [1, -528, -4284]

    code, report = run_json(capsys, ["verify", "--coeffs", str(coeffs), "--which", "fe"])
    assert code == EXIT_PASS
    assert report["reports"]["fe"]["max_residual"] <= 1e-8
    assert "dirichlet" in report["reports"]["fe"]["details"]


def test_coeffs_need_fe(tmp_path, capsys):
    coeffs = tmp_path / "delta.json"
    assert main(["series", "delta", "--terms", "10", "--out", str(coeffs)]) == EXIT_PASS
    assert main(["verify", "--coeffs", str(coeffs), "--which", "r1"]) == EXIT_INPUT


# Check registry

def test_registry_names():
    manager = get_check_manager()
    assert set(VERIFY_CHECKS) | {"group", "cycle"} == set(manager.names())
    infos = {info.name: info for info in manager.get_check_list()}
    assert infos["rpf1"].needs == ["spec"]
    assert infos["group"].equations


def test_registry_errors():
    manager = get_check_manager()
    context = CheckContext(tolerance=1e-8, sample_count=10, seed=0, precision_bits=64)
    with pytest.raises(InputError):
        manager.get_check("nope")
    with pytest.raises(InputError):
        manager.run("rpf1", context)


def test_invmellin_check_runs_without_a_spec():
    context = CheckContext(tolerance=1e-8, sample_count=10, seed=0, precision_bits=64)
    report = get_check_manager().run("invmellin", context)
    assert report.passed, report.details
    assert [run["T"] for run in report.details["runs"]] == [60.0, 120.0, 240.0]


# Reports

def test_report_with_nan_residual_fails():
    report = ResidualReport("rpf1", 1e-8)
    report.add(0.5 + 1j, 1e-12)
    assert report.passed
    report.add(1.5 + 1j, float("nan"))
    assert not report.passed
    assert report.max_residual == math.inf
    report = ResidualReport("rpf1", 1e-8, residuals=[1e-12, float("inf")])
    assert not report.passed


def test_report_fail_reason():
    report = ResidualReport("r2", 1e-8, grid=[(1.0, 0.5)], residuals=[0.0])
    report.fail("symbolic sum does not cancel")
    assert not report.passed
    assert report.to_json()["details"]["failures"] == ["symbolic sum does not cancel"]
