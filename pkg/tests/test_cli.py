import io
import json
import subprocess
import sys

import pytest

from cubesum.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, run


def _run(argv, environ=None):
    out = io.StringIO()
    code = run(argv, out=out, environ=environ or {})
    return code, out.getvalue()


def test_check_17():
    code, text = _run(["check", "17"])
    assert code == EXIT_OK
    rep = json.loads(text)
    assert rep["schema"] == 1
    assert rep["op"] == "criterion.check"
    assert rep["result"]["verdict"] == "GuaranteedCubeSum"
    assert rep["result"]["d_has_root"] is False
    assert "config" in rep and rep["config"]["oracle_max_p"] == 200


@pytest.mark.parametrize("argv", [["check", "18"], ["check", "19"], ["nope"], ["check"], ["check", "17", "--bogus"]])
def test_usage_errors(argv):
    code, _ = _run(argv)
    assert code == EXIT_USAGE


def test_byte_identical_output():
    assert _run(["check", "53"]) == _run(["check", "53"])
    assert _run(["lvalue", "17", "--deriv"]) == _run(["lvalue", "17", "--deriv"])


def test_config_precedence(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"precision_digits": 30, "oracle_max_p": 50, "cache_dir": "from-file"}))
    env = {"SYLV_PRECISION": "40", "SYLV_CACHE": str(tmp_path / "env")}
    code, text = _run(["check", "17", "--config", str(cfg), "--precision", "35"], env)
    c = json.loads(text)["config"]
    assert code == 0
    assert c["precision_digits"] == 35  # flag beats env and file
    assert c["cache_dir"] == str(tmp_path / "env")  # env beats file
    assert c["oracle_max_p"] == 50  # file beats default
    _, text = _run(["check", "17", "--config", str(cfg)], env)
    assert json.loads(text)["config"]["precision_digits"] == 40


def test_flags_before_subcommand():
    _, text = _run(["--oracle-max", "0", "check", "17"])
    assert json.loads(text)["config"]["oracle_max_p"] == 0


def test_bad_config(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"colour": "blue"}))
    assert _run(["check", "17", "--config", str(cfg)])[0] == EXIT_USAGE
    assert _run(["check", "17", "--workers", "0"])[0] == EXIT_USAGE


def test_text_and_csv_formats():
    code, text = _run(["check", "17", "--format", "text"])
    assert code == 0 and "result.verdict: GuaranteedCubeSum" in text
    code, text = _run(["scan", "2", "300", "--format", "csv"])
    assert code == 0
    lines = text.splitlines()
    assert lines[0] == "p,has_root,nine_div,verdict"
    assert lines[1] == "17,0,0,GuaranteedCubeSum"


def test_scan_resume(tmp_path):
    path = tmp_path / "scan.csv"
    code, text = _run(["scan", "2", "2000", "--out", str(path), "--block", "500"])
    assert code == 0
    full = json.loads(text)["result"]
    # cut the file back to an earlier checkpoint plus a dangling row
    lines = path.read_text().splitlines()
    cut = [i for i, l in enumerate(lines) if l.startswith("#checkpoint")][1]
    path.write_text("\n".join(lines[: cut + 1] + ["9999,1,1,Inconclusive"]) + "\n")
    code, text = _run(["scan", "2", "2000", "--out", str(path), "--block", "500"])
    assert json.loads(text)["result"]["counts"] == full["counts"]
    assert "9999" not in path.read_text()
    assert _run(["scan", "2", "3000", "--out", str(path)])[0] == EXIT_USAGE


def test_qcheck_and_analytic_commands():
    assert _run(["qcheck", "--identity", "theta", "--order", "200"])[0] == EXIT_OK
    assert _run(["qcheck", "--identity", "modular-eq", "--order", "80"])[0] == EXIT_OK
    assert _run(["qcheck", "--identity", "sumkron", "--order", "100"])[0] == EXIT_OK
    assert _run(["qcheck", "--identity", "theta", "--order", "500", "--order-cap", "100"])[0] == EXIT_USAGE
    assert _run(["moduli", "17"])[0] == EXIT_OK
    assert _run(["periods", "17"])[0] == EXIT_OK


def test_cm_verify_reports_f_literal():
    code, text = _run(["cm-verify"])
    rep = json.loads(text)["result"]
    assert rep["psi_pass"] is True
    assert rep["f_error_vs_-3w"] < 1e-10
    assert code == (EXIT_OK if rep["f_pass"] else EXIT_FAIL)


def test_lvalue_and_classify(tmp_path):
    code, text = _run(["lvalue", "17", "--deriv", "--cache-dir", str(tmp_path)])
    rep = json.loads(text)["result"]
    assert code == 0 and rep["sign"] == -1 and rep["terms"] > 0 and rep["tail_bound"] < 1e-9
    assert (tmp_path / "a_ell.csv").exists()
    code, text = _run(["classify", "17", "--cache-dir", str(tmp_path)])
    assert json.loads(text)["result"]["classification"] == "POnly"


def test_example17_and_gz():
    code, text = _run(["example17"])
    assert code == 0 and json.loads(text)["result"]["ok"]
    code, text = _run(["gz-check"])
    rep = json.loads(text)["result"]
    assert code == (EXIT_OK if rep["in_band"] and rep["second_ok"] else EXIT_FAIL)


def test_selftest():
    code, text = _run(["selftest"])
    rep = json.loads(text)
    assert code == EXIT_OK, [c for c in rep["result"]["checks"] if not c["pass"]]


def test_console_script_module():
    out = subprocess.run([sys.executable, "-m", "cubesum.cli", "check", "17"], capture_output=True, text=True)
    assert out.returncode == 0 and '"schema": 1' in out.stdout
