"""End-to-end command-line checks through main(argv)."""

import json

import numpy as np
import pytest

from haarkit.cli import format_float, main, to_json
from malformed_charts import MALFORMED


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_format_float_17_digits_round_trip():
    for x in (np.pi, 1 / 3, 2e-308, 123456.789, -0.0, 1e17):
        assert float(format_float(x)) == float(x)
    assert format_float(float("nan")) == "NaN"
    assert format_float(-0.0) == "0"


def test_to_json_is_deterministic():
    record = {"a": [1.0, 2.5], "b": True, "c": None, "d": "x\"y\\z", "e": 7}
    text = to_json(record)
    assert text == to_json(record)
    assert json.loads(text) == {"a": [1.0, 2.5], "b": True, "c": None,
                                "d": 'x"y\\z', "e": 7}


def test_density_json(capsys):
    code, out, _ = run(capsys, "density", "--chart", "builtin:so3-euler",
                       "--point", "0,1.5707963267948966,0")
    assert code == 0
    record = json.loads(out)
    assert record["chart"] == "so3_euler"
    assert abs(record["density"] - 1 / (8 * np.pi**2)) < 1e-9


def test_density_closed_form_flag(capsys):
    code, out, _ = run(capsys, "density", "--chart", "builtin:so3-quat",
                       "--point", "1.5707963267948966,1.5707963267948966,1",
                       "--numeric", "--closed-form")
    assert code == 0
    record = json.loads(out)
    assert abs(record["density"] - record["closed_form_density"]) < 1e-9


def test_density_closed_form_needs_builtin(tmp_path, capsys):
    path = tmp_path / "c.chart"
    path.write_text("chart c { params: a in [0, 2*pi]; group: so(2); "
                    "matrix: [[cos(a), -sin(a)], [sin(a), cos(a)]]; }")
    code, _, err = run(capsys, "density", "--chart", str(path),
                       "--point", "1", "--closed-form")
    assert code == 1
    assert "built-in" in err


def test_density_outside_domain(capsys):
    code, _, err = run(capsys, "density", "--chart", "builtin:so2-angle",
                       "--point", "7")
    assert code == 1
    assert "outside" in err


def test_normalize_constant(capsys):
    code, out, _ = run(capsys, "normalize", "--chart", "builtin:so3-euler")
    assert code == 0
    assert abs(json.loads(out)["C"] - 8 * np.pi**2) < 1e-5


def test_sample_deterministic_output(capsys):
    argv = ("sample", "--group", "so3", "--chart", "euler", "-n", "3",
            "--seed", "17")
    code1, out1, _ = run(capsys, *argv)
    code2, out2, _ = run(capsys, *argv)
    assert code1 == code2 == 0
    assert out1 == out2
    rows = [json.loads(line) for line in out1.strip().splitlines()]
    assert len(rows) == 3
    m = np.array(rows[0]["R"])
    assert np.abs(m @ m.T - np.eye(3)).max() < 1e-12


def test_sample_csv_format(capsys):
    code, out, _ = run(capsys, "sample", "--group", "so2", "-n", "2",
                       "--seed", "1", "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 2
    assert len(lines[0].split(",")) == 4


def test_sample_quaternion_lines(capsys):
    code, out, _ = run(capsys, "sample", "--group", "so3", "--chart",
                       "quaternion", "-n", "2", "--seed", "5")
    assert code == 0
    q = np.array(json.loads(out.strip().splitlines()[0])["q"])
    assert abs(np.linalg.norm(q) - 1.0) < 1e-12


def test_check_chart_reports_invariance(capsys):
    code, out, _ = run(capsys, "check-chart", "--chart", "builtin:so2-shifted")
    assert code == 0
    record = json.loads(out)
    assert record["status"] == "ok"
    assert record["invariance_max_residual"] < 1e-8


def test_check_chart_detects_partial_cover(tmp_path, capsys):
    # covers only half of SO(2): normalizes fine but is not invariant
    path = tmp_path / "half.chart"
    path.write_text("chart half { params: a in [0, pi]; group: so(2); "
                    "matrix: [[cos(a), -sin(a)], [sin(a), cos(a)]]; }")
    code, _, err = run(capsys, "check-chart", "--chart", str(path))
    assert code == 2
    assert "invariance" in err


def test_dim_default_methods(capsys):
    code, out, _ = run(capsys, "dim", "--group", "so3", "--order", "8")
    assert code == 0 and out.strip() == "91"
    code, out, _ = run(capsys, "dim", "--group", "so2", "--order", "6")
    assert code == 0 and out.strip() == "20"


def test_dim_both_json(capsys):
    code, out, _ = run(capsys, "dim", "--group", "o3", "--order", "6",
                       "--method", "both", "--format", "json")
    assert code == 0
    record = json.loads(out)
    assert record["closed"] == 15
    assert abs(record["quadrature"] - 15) < 1e-6


def test_reynolds_round_trip(tmp_path, capsys):
    tensor = {"dim": 3, "order": 2,
              "entries": [float(x) for x in range(1, 10)]}
    path = tmp_path / "t.json"
    path.write_text(json.dumps(tensor))
    code, out, _ = run(capsys, "reynolds", "--group", "so3",
                       "--tensor", str(path))
    assert code == 0
    record = json.loads(out)
    got = np.array(record["entries"]).reshape(3, 3)
    trace = 1.0 + 5.0 + 9.0
    assert np.abs(got - trace / 3.0 * np.eye(3)).max() < 1e-6


def test_orbit_moments_diag(capsys):
    code, out, _ = run(capsys, "orbit-moments", "--group", "so3",
                       "--diag", "1,2,3", "--nodes", "16")
    assert code == 0
    record = json.loads(out)
    m1 = np.array(record["m1"])
    assert np.abs(m1 - 2.0 * np.eye(3)).max() < 1e-8
    assert np.array(record["m2"]).shape == (3, 3, 3, 3)


def test_orbit_moments_needs_one_seed(capsys):
    code, _, err = run(capsys, "orbit-moments", "--group", "so3")
    assert code == 1
    assert "seed-tensor" in err or "diag" in err


def test_chart_change_auto(capsys):
    code, out, _ = run(capsys, "chart-change", "--chart1", "builtin:so3-euler",
                       "--chart2", "builtin:so3-polar", "--point", "0.5,1.0,2.0")
    assert code == 0
    assert json.loads(out)["residual"] < 1e-8


def test_chart_change_shift(capsys):
    code, out, _ = run(capsys, "chart-change", "--chart1", "builtin:so2-angle",
                       "--chart2", "builtin:so2-shifted", "--point", "2.0",
                       "--map", "shift:-3.141592653589793")
    assert code == 0
    assert json.loads(out)["residual"] < 1e-9


def test_chart_change_rejects_double_cover(capsys):
    code, _, err = run(capsys, "chart-change", "--chart1", "builtin:so3-quat",
                       "--chart2", "builtin:so3-euler", "--point", "1,1,1")
    assert code == 1
    assert "double-cover" in err


def test_out_flag_writes_file(tmp_path, capsys):
    target = tmp_path / "out.json"
    code, out, _ = run(capsys, "normalize", "--chart", "builtin:so2-angle",
                       "--out", str(target))
    assert code == 0
    assert out == ""
    assert abs(json.loads(target.read_text())["C"] - 2 * np.pi) < 1e-8


def test_usage_errors_exit_1(capsys):
    assert run(capsys, "sample")[0] == 1              # missing --group
    assert run(capsys, "nonsense")[0] == 1            # unknown command
    assert run(capsys)[0] == 1                        # no command
    assert run(capsys, "dim", "--group", "so3", "--order", "x")[0] == 1


def test_degenerate_chart_exits_2(tmp_path, capsys):
    path = tmp_path / "d.chart"
    path.write_text("chart d { params: t in [0, 1]; group: so(2); "
                    "matrix: [[1, 0], [0, 1]]; }")
    code, _, err = run(capsys, "normalize", "--chart", str(path))
    assert code == 2
    assert "degenerate" in err


@pytest.mark.parametrize("label,source", MALFORMED, ids=[m[0] for m in MALFORMED])
def test_malformed_chart_diagnostics(label, source, tmp_path, capsys):
    path = tmp_path / "bad.chart"
    path.write_text(source)
    code, out, err = run(capsys, "check-chart", "--chart", str(path))
    assert code != 0
    assert "line" in err and "column" in err
