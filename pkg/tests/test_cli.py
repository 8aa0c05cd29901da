import json
import os

import pytest

from main import build_parser, cmd_analyze, cmd_construct, run
from src.equation_io import load_equation
from src.report import render_json, render_text


def run_json(capsys, *argv):
    code = run(["--json", *argv])
    return code, json.loads(capsys.readouterr().out)


def test_parser_defaults():
    args = build_parser().parse_args(["verify", "eq.json"])
    assert args.radii == [50.0, 100.0, 200.0, 400.0]
    assert args.samples == 256
    assert args.terms == 512


def test_analyze_half_order(capsys, equations_dir):
    code, report = run_json(capsys, "analyze", os.path.join(equations_dir, "order_half_cosine.json"))
    assert code == 0
    assert report["exit_code"] == 0
    assert report["s_sequence"]["indices"] == [2, 0]
    assert report["profile"][0]["rho"] == "1/2"
    assert report["profile"][0]["type"] == "1"
    assert report["hull"]["ok"] is True
    assert report["degree_table"] == []


def test_analyze_third_order_text(capsys, equations_dir):
    code = run(["analyze", os.path.join(equations_dir, "order_third.json")])
    out = capsys.readouterr().out
    assert code == 0
    assert "ADMISSIBLE ORDERS AND TYPES" in out
    assert "1/3" in out
    assert "1.65096" in out
    assert "Hull cross-check: OK" in out


def test_empty_profile_exit_code(capsys, equations_dir):
    code, report = run_json(capsys, "analyze", os.path.join(equations_dir, "constant_coefficients.json"))
    assert code == 3
    assert report["profile"] == []


def test_delta_zero(equations_dir):
    result = cmd_analyze(os.path.join(equations_dir, "delta_zero.json"))
    assert result.exit_code == 3
    assert result.report["s_sequence"]["indices"] == [1]


def test_input_errors(capsys, tmp_path):
    assert run(["analyze", str(tmp_path / "absent.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"m": 1, "P": [[1]]}')
    assert run(["analyze", str(bad)]) == 2
    assert run(["construct", "--lambda", "3/2", "--sigma", "1"]) == 2
    assert run(["construct", "--lambda", "1/2", "--sigma", "1", "--sigma-float", "1.0"]) == 2
    assert run(["frobnicate"]) == 2
    capsys.readouterr()


def test_construct_writes_equation(capsys, tmp_path, equations_dir):
    out = str(tmp_path / "constructed.yaml")
    code, report = run_json(capsys, "construct", "--lambda", "1/2", "--sigma", "1", "--out", out)
    assert code == 0
    assert report["construction"]["A0_over_Ap"] == "1/4"
    assert report["construction"]["A0_over_A1"] == "1/2"
    assert report["construction"]["round_trip"] is True
    assert report["preview"][:3] == ["1", "1/2", "1/24"]
    assert load_equation(out) == load_equation(os.path.join(equations_dir, "half_order_unit_type.yaml"))


def test_construct_from_float_sigma():
    result = cmd_construct("1/3", sigma_float="0.75")
    assert result.exit_code == 0
    assert result.report["construction"]["sigma"] == "3/4"
    assert any("rationalized" in w for w in result.report["warnings"])


def test_solve_half_order(capsys, equations_dir):
    code, report = run_json(capsys, "solve", os.path.join(equations_dir, "order_half_cosine.json"),
                            "--terms", "128", "--precision-bits", "128")
    assert code == 0
    basis = report["basis"]
    assert basis["dimension"] == 2
    assert basis["order_below_one"] == 1
    order = [m for m in basis["members"] if m["class"] == "order"]
    assert order[0]["rho"] == "1/2"
    assert order[0]["match"] == "match"


def test_solve_rejects_too_few_terms(capsys, equations_dir):
    code = run(["solve", os.path.join(equations_dir, "order_half_cosine.json"), "--terms", "8"])
    capsys.readouterr()
    assert code == 2


@pytest.mark.parametrize("name", ["order_third.json", "order_three_quarters.yaml"])
def test_solve_matches_single_order_member(capsys, equations_dir, name):
    code, report = run_json(capsys, "solve", os.path.join(equations_dir, name))
    assert code == 0
    basis = report["basis"]
    assert basis["order_below_one"] == 1
    matched = [m for m in basis["members"] if m.get("match") == "match"]
    assert len(matched) == 1
    assert matched[0]["class"] == "order"


@pytest.mark.parametrize("name, L_exact", [
    ("order_half_cosine.json", 1.0),
    ("order_third.json", 1.6509636244473134),
])
def test_verify_default_radii(capsys, equations_dir, name, L_exact):
    code, report = run_json(capsys, "verify", os.path.join(equations_dir, name))
    assert code == 0
    assert len(report["growth"]) == 1
    growth = report["growth"][0]
    assert growth["refused"] == []
    assert growth["L_exact"] == pytest.approx(L_exact, rel=1e-9)
    assert growth["verdict"] == "pass"
    assert abs(growth["L_fit"] / L_exact - 1) <= 0.15
    assert growth["agreement"] is True


def test_verify_three_quarters_with_longer_prefix(capsys, equations_dir):
    code, report = run_json(capsys, "verify", os.path.join(equations_dir, "order_three_quarters.yaml"),
                            "--terms", "800")
    assert code == 0
    assert len(report["growth"]) == 1
    growth = report["growth"][0]
    assert growth["refused"] == []
    assert abs(growth["L_fit"] / growth["L_exact"] - 1) <= 0.15


def test_render_text_and_json_agree_on_content(equations_dir):
    result = cmd_analyze(os.path.join(equations_dir, "order_half_cosine.json"))
    result.report["exit_code"] = result.exit_code
    text = render_text(result.report)
    assert text.startswith("=" * 60)
    assert "Exit code: 0" in text
    doc = json.loads(render_json(result.report))
    assert doc["profile"][0]["type_decimal"].startswith("1.0000")
