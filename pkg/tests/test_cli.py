import json
import math
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from kenmotsu import builtin
from kenmotsu.cli import main
from kenmotsu.geometry import curvature
from kenmotsu.loader import ManifestError, load_manifest, parse_manifest
from kenmotsu.report import Report

ROOT = Path(__file__).resolve().parent.parent
MANIFEST = ROOT / "manifests" / "kenmotsu3.toml"
XI_MANIFEST = ROOT / "manifests" / "kenmotsu3_xi.toml"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--json")
    return code, json.loads(out)


# --- exit codes -------------------------------------------------------------------


def test_check_kenmotsu3_passes(capsys):
    code, out, _ = run(capsys, "check", "--builtin", "kenmotsu3")
    assert code == 0
    assert "overall: PASS" in out


def test_check_perturbed3_fails(capsys):
    code, doc = run_json(capsys, "check", "--builtin", "perturbed3")
    assert code == 1
    e = {x["name"]: x for x in doc["entries"]}
    assert e["kenmotsu.condition"]["verdict"] == "fail"
    assert e["kenmotsu.condition"]["residual"] > 1e-2


@pytest.mark.parametrize(
    "argv, fragment",
    [
        (["check", "--manifest", "missing.toml"], "missing.toml"),
        (["check", "--builtin", "nope"], "unknown builtin"),
        (["check", "--builtin", "flat3"], "no structure block"),
        (["soliton", "--builtin", "flat3"], "no soliton block"),
        (["check", "--builtin", "hyperbolic3", "--epsilon", "-1"], "pinned"),
        (["check", "--builtin", "kenmotsu3", "--param", "beta=2"], "unknown parameter"),
        (["check", "--builtin", "kenmotsu3", "--param", "alpha"], "NAME=VALUE"),
        (["check"], "required"),
        (["frobnicate"], "invalid choice"),
        (["curvature", "--builtin", "kenmotsu3", "--point", "0,0"], "3 coordinates"),
        (["curvature", "--builtin", "kenmotsu3", "--point", "a,b,c"], "comma-separated"),
    ],
)
def test_input_errors(capsys, argv, fragment):
    code, out, err = run(capsys, *argv)
    assert code == 2
    assert out == ""
    lines = err.strip().splitlines()
    assert len(lines) == 1
    assert lines[0].startswith("error: ")
    assert fragment in lines[0]


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("[manifold]\ncoords=['x','y','z']\n[metric]\ng=[['1','0','0'],['0','1','0'],['0','0','1']]\n[extra]\n", "unknown section"),
        ("[manifold]\ncoords=['x','y','z']\ncolor=1\n[metric]\ng=[['1','0','0'],['0','1','0'],['0','0','1']]\n", "unknown key"),
        ("[manifold]\ncoords=['x','y','z']\n", "missing section"),
        ("[manifold]\ncoords=['x','y','z']\ndim=5\n[metric]\ng=[['1','0','0'],['0','1','0'],['0','0','1']]\n", "dim"),
        ("[manifold\n", "malformed"),
        ("[manifold]\ncoords=['x','y','z']\n[metric]\ng=[['1','0','0'],['0','1','0'],['0','0','1']]\n[tolerances]\nspeling=1e-3\n", "tolerance"),
        ("[manifold]\ncoords=['x','y','z']\n[metric]\ng=[['1','x','0'],['0','1','0'],['0','0','1']]\n", "symmetric"),
        ("[manifold]\ncoords=['x','y','z']\n[metric]\ng=[['1','0','0'],['0','1','0'],['0','0','q']]\n", "q"),
    ],
)
def test_bad_manifests(tmp_path, capsys, text, fragment):
    path = tmp_path / "bad.toml"
    path.write_text(text)
    with pytest.raises(ManifestError):
        load_manifest(path)
    code, _, err = run(capsys, "curvature", "--manifest", str(path))
    assert code == 2
    assert len(err.strip().splitlines()) == 1
    assert fragment in err


def test_manifest_matches_builtin():
    spec = load_manifest(MANIFEST)
    ref = builtin("kenmotsu3")
    assert spec.name == "kenmotsu3"
    assert spec.metric == ref.metric
    assert spec.structure.phi == ref.structure.phi
    assert spec.soliton == ref.soliton
    assert spec.sample_points() == ref.sample_points()
    p = (0.3, -0.2, 0.1)
    assert np.array_equal(curvature(spec, p).riemann, curvature(ref, p).riemann)


def test_manifest_name_defaults_to_stem(tmp_path):
    text = MANIFEST.read_text().replace('name = "kenmotsu3"\n', "")
    path = tmp_path / "mine.toml"
    path.write_text(text)
    assert load_manifest(path).name == "mine"


def test_parse_manifest_numbers_as_expressions():
    spec = parse_manifest("[manifold]\ncoords=['x','y','z']\n[metric]\ng=[[1,0,0],[0,1,0],[0,0,1]]\n")
    assert spec.epsilon == 1.0
    assert np.array_equal(spec.metric_at((0.0, 0.0, 0.0)), np.eye(3))


def test_manifest_error_type():
    with pytest.raises(ManifestError):
        parse_manifest("[manifold]\ncoords='xyz'\n[metric]\ng=[]\n")


def test_tolerance_override(tmp_path, capsys):
    text = MANIFEST.read_text().replace("default = 1e-8", 'default = 1e-8\n"kenmotsu.condition" = 1e-300')
    path = tmp_path / "strict.toml"
    path.write_text(text)
    code, doc = run_json(capsys, "check", "--manifest", str(path))
    e = {x["name"]: x for x in doc["entries"]}
    assert e["kenmotsu.condition"]["tolerance"] == 1e-300
    assert code == (0 if e["kenmotsu.condition"]["residual"] < 1e-300 else 1)


# --- reports ------------------------------------------------------------------------


@pytest.mark.parametrize("cmd", ["check", "classify", "soliton"])
def test_json_deterministic_and_round_trips(capsys, cmd):
    _, a, _ = run(capsys, cmd, "--manifest", str(MANIFEST), "--json")
    _, b, _ = run(capsys, cmd, "--manifest", str(MANIFEST), "--json")
    assert a == b
    rep = Report.from_json(a)
    assert rep.to_json() + "\n" == a
    assert Report.from_json(rep.to_json()) == rep
    assert rep.digest.startswith("sha256:")
    assert rep.engine.startswith("kenmotsu ")
    for e in rep.entries:
        if e.tolerance is not None and e.residual is not None:
            assert (e.verdict == "pass") == (e.residual < e.tolerance)


def test_seed_and_samples_change_points(capsys):
    _, a = run_json(capsys, "check", "--builtin", "kenmotsu3", "--seed", "1", "--samples", "2")
    _, b = run_json(capsys, "check", "--builtin", "kenmotsu3", "--seed", "2", "--samples", "2")
    assert len(a["points"]) == 5
    assert a["points"][:3] == b["points"][:3]
    assert a["points"][3:] != b["points"][3:]
    assert a["seed"] == 1


def test_text_report_has_table(capsys):
    code, out, _ = run(capsys, "classify", "--builtin", "kenmotsu5", "--epsilon", "-1")
    assert code == 0
    assert "space_form.sectional" in out
    assert "kappa = 1" in out


def test_classify_flat3(capsys):
    code, doc = run_json(capsys, "classify", "--builtin", "flat3")
    assert code == 0
    e = {x["name"]: x for x in doc["entries"]}
    assert e["structure"]["verdict"] == "skipped"
    assert doc["constants"]["kappa"] == 0.0


# --- soliton ---------------------------------------------------------------------------


@pytest.mark.parametrize("eps", ["1", "-1"])
def test_soliton_solve_lambda(capsys, eps):
    code, doc = run_json(capsys, "soliton", "--builtin", "kenmotsu3", "--epsilon", eps, "--solve-lambda")
    assert code == 0
    e = {x["name"]: x for x in doc["entries"]}
    assert e["soliton.residual"]["residual"] < 1e-10
    assert e["soliton.lambda_target"]["verdict"] == "pass"
    assert doc["constants"]["lambda_solved"] == pytest.approx(2 * float(eps), abs=1e-8)


def test_soliton_xi_manifest_fails(capsys):
    code, doc = run_json(capsys, "soliton", "--manifest", str(XI_MANIFEST), "--solve-lambda")
    assert code == 1
    e = {x["name"]: x for x in doc["entries"]}
    assert e["soliton.residual"]["verdict"] == "fail"
    assert e["soliton.eta_eta_coefficient"]["residual"] == pytest.approx(2.0, abs=1e-9)
    assert e["soliton.residual_at_solved_lambda"]["residual"] >= 0.5
    assert e["soliton.lambda_target"]["verdict"] == "skipped"


def test_soliton_param_override(capsys):
    code, doc = run_json(capsys, "soliton", "--builtin", "kenmotsu3", "--param", "alpha=0")
    assert code == 0


# --- curvature dump ------------------------------------------------------------------------


def test_curvature_json_golden(capsys):
    code, doc = run_json(capsys, "curvature", "--builtin", "kenmotsu3", "--point", "0,0,0")
    assert code == 0
    t = doc["tensors"]
    gamma = np.array(t["gamma"]["components"])
    riem = np.array(t["riemann"]["components"])
    assert gamma[2, 0, 0] == pytest.approx(-1.0)
    assert gamma[0, 0, 2] == pytest.approx(1.0)
    assert gamma[2, 0, 1] == 0.0
    # R(d1, d3) d3 = -d1
    assert riem[0, 2, 0, 2] == pytest.approx(-1.0)
    assert t["scalar"]["components"] == pytest.approx(-6.0)
    assert t["gamma"]["variance"] == ["u", "l", "l"]


@pytest.mark.parametrize("eps", [1.0, -1.0])
def test_curvature_json_at_z1(capsys, eps):
    _, doc = run_json(capsys, "curvature", "--builtin", "kenmotsu3", "--epsilon", str(int(eps)), "--point", "0,0,1")
    gamma = np.array(doc["tensors"]["gamma"]["components"])
    assert gamma[2, 0, 0] == pytest.approx(-eps * math.e**2, rel=1e-14)


def test_curvature_flat_zeros(capsys):
    code, doc = run_json(capsys, "curvature", "--builtin", "flat3", "--point", "0.5,-1,2")
    assert code == 0
    for name, t in doc["tensors"].items():
        assert not np.any(np.array(t["components"])), name
    code, out, _ = run(capsys, "curvature", "--builtin", "flat3")
    assert "gamma: all zero" in out
    assert "scalar = 0" in out


def test_curvature_text_labels(capsys):
    _, out, _ = run(capsys, "curvature", "--builtin", "kenmotsu3", "--point", "0,0,1")
    assert "gamma^z_xx = -7.38905609893" in out
    assert "riemann^x_zxz = -1" in out


# --- console entry point ---------------------------------------------------------------


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "kenmotsu.cli", "check", "--builtin", "perturbed3"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 1
    proc = subprocess.run(
        [sys.executable, "-m", "kenmotsu.cli", "check", "--manifest", "missing.toml"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 2
    assert proc.stderr.startswith("error: ")
