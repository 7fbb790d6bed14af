import json
import os
import subprocess
import sys

import numpy as np
import pytest

from adslab.cli import certificate_json, describe, load_config, main
from adslab.errors import ConfigError
from adslab.experiments import KINDS, resolve_thresholds
from adslab.surface_group import as_target, build_fuchsian_rep, relator_jacobian


def test_describe_every_kind(capsys):
    for kind in KINDS:
        assert main(["describe", kind]) == 0
        out = capsys.readouterr().out
        assert out.startswith(kind) and "certifies:" in out
    assert "infinitesimal rigidity" in describe("rigidity")


def test_unknown_kind():
    assert main(["describe", "wormhole"]) == 1
    assert main(["wormhole"]) == 1


def test_schema(capsys):
    assert main(["schema"]) == 0
    schema = json.loads(capsys.readouterr().out)
    assert schema["additionalProperties"] is False


def test_bad_configs(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"genus": 1}))
    assert main(["rep", "--config", str(p)]) == 1
    p.write_text(json.dumps({"kind": "hull"}))
    assert main(["rep", "--config", str(p)]) == 1
    p.write_text("{not json")
    assert main(["rep", "--config", str(p)]) == 1
    assert main(["rep", "--config", str(tmp_path / "missing.json")]) == 1
    assert load_config(None, "rep") == {"kind": "rep"}
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "missing.json"), "rep")


def test_rep_writes_certificate(tmp_path, capsys):
    assert main(["rep", "--out", str(tmp_path)]) == 0
    cert = json.loads((tmp_path / "certificate_rep.json").read_text())
    assert cert["passed"] and cert["kind"] == "rep"
    assert cert["sections"]["rep"]["results"]["fuchsian_gF"]["dims"] == [9, 3, 6]
    rows = (tmp_path / "summary_rep.csv").read_text().splitlines()
    assert rows[0] == "section,verdict,passed" and len(rows) > 1
    assert "PASSED" in capsys.readouterr().out


def test_json_to_stdout_is_deterministic(capsys):
    assert main(["rep", "--json"]) == 0
    a = capsys.readouterr().out
    assert main(["rep", "--json"]) == 0
    b = capsys.readouterr().out
    assert a == b
    assert json.loads(a)["seed"] == 0


def test_failing_verdict_exit_code(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"thresholds": {"rank_gap_cohomology": 1e300}}))
    assert main(["rep", "--config", str(p), "--out", str(tmp_path)]) == 2
    cert = json.loads((tmp_path / "certificate_rep.json").read_text())
    assert cert["passed"] is False


def test_class_override_retargets_thresholds():
    thr = resolve_thresholds({}, tol_alg=1e-3, tol_fd=None)
    assert thr["killing_fit"] == 1e-3 and thr["gauss_codazzi"] == 1e-5
    assert resolve_thresholds({"killing_fit": 5.0}, tol_alg=1e-3)["killing_fit"] == 5.0


def test_ambiguous_rank_exit_code(tmp_path):
    # put the cutoff on the smallest nonzero singular value of the first relator system
    sv = np.linalg.svd(relator_jacobian(as_target(build_fuchsian_rep(2), "G"), "g"), compute_uv=False)
    rel = float(sv[-1] / sv[0])
    assert main(["rep", "--rank-rel", repr(rel), "--out", str(tmp_path)]) == 3
    cert = json.loads((tmp_path / "certificate_rep.json").read_text())
    assert cert["error"]["type"] == "RankAmbiguous"
    assert cert["error"]["cutoff"] > 0


def test_off_output(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"output": {"off": True, "json": False, "csv": False}}))
    assert main(["hull", "--config", str(p), "--out", str(tmp_path)]) == 0
    offs = sorted(f for f in os.listdir(tmp_path) if f.endswith(".off"))
    assert offs == ["surface_ads_minus.off", "surface_ads_plus.off",
                    "surface_mink_minus.off", "surface_mink_plus.off"]
    assert (tmp_path / "surface_ads_plus.off").read_text().startswith("OFF\n")


def test_certificate_json_handles_non_finite():
    text = certificate_json({"a": float("inf"), "b": np.float64(1.5), "c": np.array([1, 2])})
    assert json.loads(text) == {"a": "inf", "b": 1.5, "c": [1, 2]}


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "adslab", "describe", "gc"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.startswith("gc")
