import io
import json
import subprocess
import sys

import jsonschema
import pytest

from popa.cli import load_schema, run


def call(*argv):
    buf = io.StringIO()
    code = run(list(argv), out=buf)
    text = buf.getvalue()
    return code, (json.loads(text) if text.strip() else None)


@pytest.fixture
def power_spec(tmp_path):
    p = tmp_path / "power.json"
    p.write_text(json.dumps({"family": "power", "rho": [1, 0], "sigma": [1, 0], "v": [1, 0], "gamma": 2.0}))
    return str(p)


def test_eval_example():
    code, doc = call("eval", "--rho", "1,0", "--x", "1,2", "--y", "3,4")
    assert code == 0 and doc["result"] == [7, 10]
    jsonschema.validate(doc, load_schema("report"))


def test_eval_exact():
    code, doc = call("eval", "--rho", "1,0", "--x", "1/2,3", "--op", "inverse", "--exact")
    assert code == 0 and doc["result"] == ["-1/3", "-2"]


def test_bo_example():
    code, doc = call("bo", "--rho", "1", "--sigma", "1", "--kappa", "1", "--t", "3")
    assert code == 0 and doc["psi"] == 3.0
    code, doc = call("bo", "--rho", "0", "--sigma", "inf", "--kappa", "2", "--verify", "1000", "--seed", "1")
    assert code == 0 and doc["metrics"]["max_residual"] <= 1e-10


def test_verify_hom_example(power_spec):
    code, doc = call("verify-hom", "--spec", power_spec, "--pairs", "10000", "--seed", "42", "--tol", "1e-9")
    assert code == 0 and doc["passed"] and doc["seed"] == 42


def test_verify_hom_constraint_failure(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"family": "power", "rho": [1, 0], "sigma": [1, 0], "v": [0.9, 0], "gamma": 2.0}))
    code, doc = call("verify-hom", "--spec", str(p))
    assert code == 1 and not doc["passed"]


def test_corrupted_spec_exit_2(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text("{not json")
    assert call("verify-hom", "--spec", str(p))[0] == 2
    p.write_text(json.dumps({"family": "power", "rho": [1, 0]}))
    assert call("verify-hom", "--spec", str(p))[0] == 2
    assert call("verify-hom", "--spec", str(tmp_path / "missing.json"))[0] == 2


def test_classify(power_spec):
    code, doc = call("classify", "--spec", power_spec)
    assert code == 0 and doc["family"] == "power"
    jsonschema.validate(doc["spec"], load_schema("homspec"))
    assert abs(doc["spec"]["gamma"] - 2.0) <= 1e-6


def test_witness_case2():
    code, doc = call("witness", "--rho", "1,0", "--u", "4,0", "--v=-3,0", "--exact")
    assert code == 0
    assert doc["steps"] == [{"case": "case2", "delta": "4/5"}]
    assert doc["word"][1]["element"] == ["-3/5", "0"]
    assert doc["value"] == ["1", "0"]


def test_witness_combination():
    code, doc = call("witness", "--rho", "1,0", "--gens=-3,0;4,0", "--alphas", "1,1", "--exact")
    assert code == 0 and doc["value"] == ["1", "0"] and doc["perm"] == [1, 0]


def test_grv_and_evt():
    code, doc = call("grv", "--problem", "builtin:log", "--x", "1")
    assert code == 0 and abs(doc["value"] - 0.6931471805599453) <= 1e-4
    code, doc = call("grv", "--problem", "builtin:dehaan", "--gamma", "0.5", "--x", "4")
    assert code == 0 and doc["value"] == pytest.approx(2.0)
    code, doc = call("evt", "gev", "--gamma", "0", "--x", "0")
    assert code == 0 and doc["value"] == pytest.approx(0.36787944117144233, abs=1e-12)
    code, doc = call("evt", "E", "--kappa", "2", "--gamma=-1", "--t", "2")
    assert doc["value"] == pytest.approx(1.0)


def test_evt_fit_csv(tmp_path):
    p = tmp_path / "e.csv"
    rows = ["t,E_obs"] + [f"{t},{2 * (t ** 0.5 - 1) / 0.5}" for t in range(1, 11)]
    p.write_text("\n".join(rows) + "\n")
    code, doc = call("evt", "fit", "--csv", str(p))
    assert code == 0
    assert abs(doc["kappa"] - 2) <= 1e-3 and abs(doc["gamma"] - 0.5) <= 1e-3


def test_haar():
    code, doc = call("haar", "--rho", "1", "--lo", "0", "--hi", "1", "--n", "100000", "--seed", "3")
    assert code == 0 and abs(doc["metrics"]["estimate"] - 0.693147) <= 3 * doc["metrics"]["se"]
    code, doc = call("haar", "--rho", "1,0", "--lo", "0,0", "--hi", "1,1", "--translate", "0.5,0.3",
                     "--side", "left", "--density", "right", "--n", "100000")
    assert code == 1 and doc["metrics"]["z"] > 5


def test_domain_error_exit_2():
    assert call("eval", "--rho", "1,0", "--x=-2,0", "--op", "inverse")[0] == 2
    assert call("eval", "--rho", "1,0", "--x", "1,2")[0] == 2  # circle without --y
    assert call("nonsense")[0] == 2


def test_seed_from_env(monkeypatch):
    monkeypatch.setenv("POPA_SEED", "123")
    code, doc = call("bo", "--rho", "1", "--sigma", "1", "--kappa", "1", "--t", "3")
    assert doc["seed"] == 123
    monkeypatch.setenv("POPA_SEED", "x")
    assert call("bo", "--rho", "1", "--sigma", "1", "--kappa", "1", "--t", "3")[0] == 2


def test_digest_tracks_inputs():
    a = call("bo", "--rho", "1", "--sigma", "1", "--kappa", "1", "--t", "3")[1]["inputs_digest"]
    b = call("bo", "--rho", "1", "--sigma", "1", "--kappa", "1", "--t", "3")[1]["inputs_digest"]
    c = call("bo", "--rho", "1", "--sigma", "1", "--kappa", "1", "--t", "4")[1]["inputs_digest"]
    assert a == b != c


def test_console_script_runs():
    out = subprocess.run([sys.executable, "-m", "popa.cli", "eval", "--rho", "1,0", "--x", "1,2", "--y", "3,4"],
                         capture_output=True, text=True, check=True)
    assert json.loads(out.stdout)["result"] == [7.0, 10.0]
