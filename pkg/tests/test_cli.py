import csv
import json
import math
import subprocess
import sys
from importlib import resources

import pytest

jsonschema = pytest.importorskip("jsonschema")
from referencing import Registry, Resource  # noqa: E402


def run_cli(*argv, **kw):
    return subprocess.run([sys.executable, "-m", "lorkam.cli", *argv],
                          capture_output=True, text=True, **kw)


def _registry():
    reg = Registry()
    root = resources.files("lorkam") / "schemas"
    for entry in root.iterdir():
        if entry.name.endswith(".json"):
            schema = json.loads(entry.read_text())
            reg = reg.with_resource(schema["$id"],
                                    Resource.from_contents(schema))
    return reg


REGISTRY = _registry()


def validate(payload, schema_id):
    schema = REGISTRY.contents(schema_id)
    jsonschema.Draft202012Validator(
        schema, registry=REGISTRY).validate(payload)


def test_distance_json_matches_schema_and_values():
    out = run_cli("distance", "--metric", "cylinder",
                  "--x", "0,0", "--y", "4,1")
    assert out.returncode == 0
    payload = json.loads(out.stdout)
    validate(payload, "lorkam/distance.json")
    assert payload["relation"] == "chronological"
    assert payload["d"] == pytest.approx(math.sqrt(15), abs=1e-10)
    assert payload["multiplicity"] == 1


def test_distance_reports_both_crease_maximizers():
    out = run_cli("distance", "--x", "0,0",
                  "--y", f"4,{math.pi}")
    payload = json.loads(out.stdout)
    validate(payload, "lorkam/distance.json")
    assert payload["multiplicity"] == 2
    windings = sorted(m["winding"] for m in payload["maximizers"])
    assert windings == [-1, 0]


def test_geodesic_csv_endpoint(tmp_path):
    path = tmp_path / "ray.csv"
    out = run_cli("geodesic", "--metric", "cylinder", "--x", "0,0",
                  "--v", "1,0.5", "--tmax", "4", "--csv", str(path))
    assert out.returncode == 0
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "x0", "x1"]
    last = [float(c) for c in rows[-1]]
    assert last == pytest.approx([4.0, 4.0, 2.0], abs=1e-9)


def test_geodesic_json_matches_schema():
    out = run_cli("geodesic", "--metric", "warped:2+cos", "--x", "0,0",
                  "--v", "1,0.2", "--tmax", "3", "--samples", "11")
    payload = json.loads(out.stdout)
    validate(payload, "lorkam/geodesic.json")
    assert payload["terminated_by"] == "horizon"
    assert payload["energy_drift"] < 1e-8


def test_cutlocus_json_with_classification():
    out = run_cli("cutlocus", "--x", "0,0", "--v", "1,0.5", "--classify")
    payload = json.loads(out.stdout)
    validate(payload, "lorkam/cutlocus.json")
    assert payload["status"] == "finite"
    assert payload["alpha"] == pytest.approx(2 * math.pi, abs=1e-6)
    assert payload["classification"]["kind"] == "multiple_maximizers"
    assert payload["classification"]["cut_point"]["theta_rep"] == \
        pytest.approx(-math.pi, abs=1e-3)


def test_aubry_json():
    out = run_cli("aubry", "--x", "0,0", "--v", "1,0", "--horizon", "32")
    payload = json.loads(out.stdout)
    validate(payload, "lorkam/aubry.json")
    assert payload["status"] == "in_aubry_up_to_horizon"


def test_lo_json():
    out = run_cli("lo", "--x", "0,0", "--y", f"5,{math.pi}",
                  "--t", "1.05", "--s", "0.05")
    payload = json.loads(out.stdout)
    validate(payload, "lorkam/lo.json")
    assert payload["sandwich"]["lower_ok"]
    assert payload["sandwich"]["upper_ok"]
    assert payload["sandwich"]["lower"] <= payload["value"] + 1e-12


def test_retract_json():
    out = run_cli("retract", "--x", "0,0", "--y", "4,1",
                  "--mode", "point", "--tau-samples", "5")
    payload = json.loads(out.stdout)
    validate(payload, "lorkam/retract.json")
    assert len(payload["images"]) == 5
    assert payload["images"][-1]["coords"][0] == \
        pytest.approx(4 * math.pi, abs=1e-6)


def test_verify_subset_json(tmp_path):
    path = tmp_path / "verify.json"
    out = run_cli("verify", "--suite", "1,2", "--json", str(path))
    assert out.returncode == 0
    assert "[PASS] criterion  1" in out.stdout
    payload = json.loads(path.read_text())
    validate(payload, "lorkam/verify.json")
    assert payload["all_ok"]
    assert [r["index"] for r in payload["results"]] == [1, 2]


def test_deterministic_bytes_with_seed():
    argv = ("distance", "--metric", "warped:2+cos",
            "--x", "0,0", "--y", "3,0.7", "--seed", "11")
    a = run_cli(*argv)
    b = run_cli(*argv)
    assert a.stdout == b.stdout
    assert a.returncode == 0


def test_domain_error_exit_code():
    out = run_cli("distance", "--x", "0,0", "--y=-2,0")
    assert out.returncode == 2
    assert "error:" in out.stderr


def test_solver_error_exit_code():
    out = run_cli("distance", "--winding-bound", "1",
                  "--x", "0,0", "--y", f"8,{2 * math.pi - 0.5}")
    assert out.returncode == 3


def test_usage_error_exit_code():
    out = run_cli("distance", "--x", "0,0")
    assert out.returncode == 64
