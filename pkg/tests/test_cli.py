import io
import json
import subprocess
import sys

import pytest

from toricmle.cli import RunConfig, canonical_json, main, run


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_models_list():
    code, out, _ = call("models", "list")
    assert code == 0
    rows = json.loads(out)
    assert len(rows) == 16
    by_model = {r["model"]: r for r in rows if r["model"]}
    assert by_model["S5"]["ml_degree"] == 3
    assert by_model["S3"]["degree"] == 3


def test_mle_uniform_cubic():
    code, out, _ = call("mle", "--model", "S3", "--data", "1,1,1,1")
    assert code == 0
    doc = json.loads(out)
    assert doc["birch"]["p_hat"] == pytest.approx([0.25] * 4, abs=1e-12)


def test_mle_both_methods_report_agreement():
    code, out, _ = call("mle", "--model", "S4_A2", "--data", "4,9,2,17,6", "--method", "both")
    assert code == 0
    doc = json.loads(out)
    assert doc["agreement"] <= 1e-8
    assert doc["closed_form"]["method"].startswith("closed_form_")


def test_mle_from_csv(tmp_path):
    path = tmp_path / "counts.csv"
    path.write_text("3\n5\n7\n11\n")
    code, out, _ = call("mle", "--model", "S3", "--csv", str(path))
    assert code == 0
    assert json.loads(out)["data"] == [3, 5, 7, 11]


def test_mldegree_command():
    code, out, _ = call("mldegree", "--model", "S3", "--trials", "3", "--seed", "1")
    assert code == 0
    doc = json.loads(out)
    assert doc["count"] == 3 == doc["expected"]


def test_verify_command():
    code, out, _ = call("verify", "--model", "S3", "--samples", "5", "--seed", "2")
    assert code == 0
    doc = json.loads(out)
    assert doc["max_abs_delta_p"] <= 1e-8
    assert doc["printed_polynomials"]
    for rep in doc["discrepancy_reports"]:
        assert rep["model"] == "S3"


@pytest.mark.parametrize("argv", [
    ("mle", "--model", "S99", "--data", "1,2,3"),
    ("mle", "--model", "S3", "--data", "1,2,x,4"),
    ("mle", "--model", "S3", "--data", "1,2,3"),
    ("mle", "--model", "S3", "--data", "0,2,3,4"),
    ("mle", "--model", "S3", "--data=-1,2,3,4"),
    ("mle", "--model", "S3", "--csv", "/nonexistent/counts.csv"),
    ("mldegree", "--model", "S3", "--trials", "0"),
    ("verify", "--model", "S5", "--samples", "2"),
    ("frobnicate",),
])
def test_usage_errors_exit_2(argv):
    code, _, err = call(*argv)
    assert code == 2
    assert err


def test_computation_failure_exits_3(monkeypatch):
    from toricmle import cli
    from toricmle.errors import ConvergenceError

    def boom(*a, **k):
        raise ConvergenceError("no convergence", last_iterate=[1.0, 2.0], residual=0.5)

    monkeypatch.setattr(cli, "solve_birch", boom)
    code, out, err = call("mle", "--model", "S3", "--data", "1,2,3,4")
    assert code == 3 and out == ""
    diag = json.loads(err)
    assert diag["error"] == "ConvergenceError"
    assert diag["last_iterate"] == [1.0, 2.0]


def test_format_from_environment(monkeypatch):
    monkeypatch.setenv("TORICMLE_FORMAT", "table")
    code, out, _ = call("mle", "--model", "S3", "--data", "1,1,1,1")
    assert code == 0
    assert "p_hat" in out
    with pytest.raises(json.JSONDecodeError):
        json.loads(out)
    # the flag wins over the environment
    code, out, _ = call("mle", "--model", "S3", "--data", "1,1,1,1", "--format", "json")
    json.loads(out)


def test_identical_seeds_give_identical_bytes():
    a = call("verify", "--model", "S4", "--samples", "3", "--seed", "9")[1]
    b = call("verify", "--model", "S4", "--samples", "3", "--seed", "9")[1]
    assert a == b
    a = call("mldegree", "--model", "S5", "--trials", "2", "--seed", "4")[1]
    b = call("mldegree", "--model", "S5", "--trials", "2", "--seed", "4")[1]
    assert a == b


def test_json_round_trip_is_byte_identical():
    _, out, _ = call("mle", "--model", "S4", "--data", "3,1,4,1,5", "--method", "both")
    assert canonical_json(json.loads(out)) + "\n" == out


def test_canonical_json_details():
    assert canonical_json({"b": 1, "a": [0.1, float("nan"), True, None]}) == \
        '{"a":[0.10000000000000001,null,true,null],"b":1}'


def test_run_config_directly():
    payload = run(RunConfig(command="mle", model="S3", data=[1, 1, 1, 1]))
    assert payload["model"] == "S3"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "toricmle", "mle", "--model", "S3", "--data", "2,2,2,2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["birch"]["p_hat"] == pytest.approx([0.25] * 4)


def test_help_goes_to_the_given_stream():
    code, out, _ = call("--help")
    assert code == 0
    assert "mldegree" in out
