import csv
import io
import json

import pytest

from ellqg.cli import main, report_to_json
from ellqg.verify import RunConfig, run_suite


def _run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


def test_verify_rmatrix_defaults_pass(capsys):
    code, out = _run(capsys, ["verify", "--suite", "rmatrix", "--N", "2"])
    assert code == 0
    report = json.loads(out)
    assert report["pass"] is True
    assert all(check["pass"] for check in report["checks"])
    assert report["config"]["suite"] == "rmatrix"


def test_transfer_suite_reports_identification_check(capsys):
    code, out = _run(capsys, ["verify", "--suite", "transfer", "--N", "2", "--ell", "1"])
    assert code == 0
    report = json.loads(out)
    names = {check["name"]: check for check in report["checks"]}
    assert "theorem_T_equals_M" in names
    assert names["theorem_T_equals_M"]["max_residual"] < 1e-8


def _strip_wall_time(text):
    data = json.loads(text)
    for check in data["checks"]:
        check.pop("wall_time_s")
    return json.dumps(data, sort_keys=True)


def test_reports_are_deterministic(capsys):
    argv = ["verify", "--suite", "theta", "--seed", "777"]
    _, first = _run(capsys, argv)
    _, second = _run(capsys, argv)
    # byte-identical up to the wall-time fields, residuals included
    assert _strip_wall_time(first) == _strip_wall_time(second)


def test_failed_check_still_emits_report_and_exits_1(capsys):
    code, out = _run(capsys, ["verify", "--suite", "theta", "--tol", "1e-30"])
    assert code == 1
    report = json.loads(out)
    assert report["pass"] is False


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as err:
        main(["verify", "--suite", "no_such_suite"])
    assert err.value.code == 2
    with pytest.raises(SystemExit) as err:
        main(["verify", "--suite", "theta", "--tau-im", "-1.0"])
    assert err.value.code == 2


def test_out_writes_file(tmp_path, capsys):
    path = tmp_path / "report.json"
    code = main(["verify", "--suite", "theta", "--out", str(path)])
    assert code == 0
    assert json.loads(path.read_text())["pass"] is True
    assert capsys.readouterr().out == ""


def test_json_floats_have_17_significant_digits():
    text = report_to_json({"x": 1.0 / 3.0, "flag": True, "none": None})
    assert text == '{"x": 0.33333333333333331, "flag": true, "none": null}\n'


def _rows(out):
    return list(csv.reader(io.StringIO(out)))


def test_table_ruijsenaars_zero_coupling_is_all_ones(capsys):
    code, out = _run(
        capsys,
        ["table", "--what", "ruijsenaars_coeffs", "--N", "2", "--ell", "0", "--samples", "3"],
    )
    assert code == 0
    rows = _rows(out)
    assert rows[0] == ["J", "lambda_index", "re", "im"]
    for row in rows[1:]:
        assert abs(float(row[2]) - 1.0) < 1e-12
        assert abs(float(row[3])) < 1e-12


def test_table_gm_ratio_small_gamma_near_one(capsys):
    code, out = _run(
        capsys,
        ["table", "--what", "gm_ratio", "--N", "2", "--ell", "1",
         "--gamma-re", "1e-4", "--gamma-im", "0", "--samples", "2"],
    )
    assert code == 0
    for row in _rows(out)[1:]:
        assert abs(complex(float(row[3]), float(row[4])) - 1.0) < 1e-3


def test_table_transfer_coeffs_single_top_row_per_lambda(capsys):
    samples = 2
    code, out = _run(
        capsys,
        ["table", "--what", "transfer_coeffs", "--N", "2", "--ell", "1",
         "--samples", str(samples)],
    )
    assert code == 0
    rows = _rows(out)[1:]
    top_rows = [row for row in rows if row[0] == "0+1"]
    assert len(top_rows) == samples
    # the top exterior coefficient does not depend on lambda
    vals = [complex(float(r[2]), float(r[3])) for r in top_rows]
    assert abs(vals[0] - vals[1]) < 1e-10 * abs(vals[0])


def test_run_suite_rejects_unknown_suite():
    with pytest.raises(ValueError):
        run_suite(RunConfig(suite="bogus"))
