import json

import pytest

from main import run_command


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for var in ("VQFP_CONFIG", "VQFP_THREADS", "VQFP_SEED", "VQFP_LOG_LEVEL", "VQFP_LOG_FILE"):
        monkeypatch.delenv(var, raising=False)


def _run(capsys, *argv):
    code = run_command(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_certify_origin(capsys, example_path):
    code, out, err = _run(capsys, "certify", str(example_path), "--point", "0")
    assert code == 0
    payload = json.loads(out)
    assert payload["status"] == "CertifiedPareto"
    assert payload["route"] == "PointwisePsd"
    assert "Pareto optimal" in err


def test_json_only_keeps_stderr_quiet(capsys, example_path):
    code, out, err = _run(capsys, "--json-only", "certify", str(example_path), "--point=-0.25")
    assert code == 0
    assert json.loads(out)["status"] == "CertifiedPareto"
    assert err == ""


def test_certify_exit_codes(capsys, example_path):
    assert _run(capsys, "certify", str(example_path), "--point", "1")[0] == 2
    assert _run(capsys, "certify", str(example_path), "--point", "5")[0] == 4
    assert _run(capsys, "certify", str(example_path), "--point", "1,2")[0] == 4
    assert _run(capsys, "certify", str(example_path), "--point", "0", "--route", "h")[0] == 3


def test_dump_eigen(capsys, example_path):
    code, out, _ = _run(capsys, "certify", str(example_path), "--point", "0", "--dump-eigen")
    assert code == 0
    assert len(json.loads(out)["eigen"]) == 3


def test_kkt_command(capsys, example_path):
    code, out, _ = _run(capsys, "kkt", str(example_path), "--point", "0", "--tau-hint", "0.5,1,0.25")
    assert code == 0
    assert json.loads(out)["found"]
    assert _run(capsys, "kkt", str(example_path), "--point", "1")[0] == 2


def test_oracle_commands(capsys, example_path):
    code, out, _ = _run(capsys, "oracle", str(example_path), "--step", "0.01", "--point", "2")
    assert code == 0
    assert json.loads(out)["dominated"]
    code, out, _ = _run(capsys, "oracle", str(example_path), "--step", "0.05", "--front")
    assert code == 0
    assert json.loads(out)
    assert _run(capsys, "oracle", str(example_path), "--step", "0.05")[0] == 4
    code, out, _ = _run(capsys, "oracle", str(example_path), "--step", "0.01", "--point", "2", "--lipschitz-margin")
    assert json.loads(out)["dominated"]
    code, out, _ = _run(capsys, "oracle", str(example_path), "--step", "0.01", "--point", "0", "--lipschitz-margin")
    assert not json.loads(out)["dominated"]


def test_search_with_weights(capsys, example_path):
    code, out, _ = _run(capsys, "search", str(example_path), "--weights", "0.25,1,0.25", "--x0", "1")
    assert code == 0
    entry = json.loads(out)[0]
    assert entry["converged"]
    assert entry["certified"]
    assert entry["point"][0] == pytest.approx(0.0, abs=1e-6)


def test_dual_check_roundtrip(capsys, example_path):
    code, out, _ = _run(capsys, "dual-check", str(example_path), "--roundtrip", "--point", "0")
    assert code == 0
    assert json.loads(out)["strong_duality"]["status"] == "NotConstructible"


def test_eigen_command(capsys, example_path):
    code, out, _ = _run(capsys, "eigen", str(example_path))
    assert code == 0
    assert json.loads(out)[2]["A"]["eigenvalues"] == [-2.0]


def test_report_to_a_file(capsys, example_path, tmp_path):
    target = tmp_path / "report.json"
    code, out, _ = _run(capsys, "--out", str(target), "certify", str(example_path), "--point", "0")
    assert code == 0
    assert out == ""
    assert json.loads(target.read_text(encoding="utf-8"))["status"] == "CertifiedPareto"


def test_usage_errors(capsys, example_path):
    assert _run(capsys)[0] == 64
    assert _run(capsys, "certify", str(example_path))[0] == 64
    assert _run(capsys, "frobnicate")[0] == 64


def test_missing_instance(capsys, tmp_path):
    assert _run(capsys, "certify", str(tmp_path / "nope.json"), "--point", "0")[0] == 4


def test_mistyped_config_is_an_input_error(capsys, example_path, tmp_path):
    user = tmp_path / "cfg.json"
    user.write_text(json.dumps({"z_tol": "tight"}), encoding="utf-8")
    code, out, err = _run(capsys, "--config", str(user), "certify", str(example_path), "--point", "0")
    assert code == 4
    assert out == ""
    assert "ConfigError" in err
