from __future__ import annotations

import json
import os

import pytest

from fpclab.cli import main
from fpclab.ising import IsingModel, chain_model, save_model


def run(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_build_graph_writes_graph_and_manifest(tmp_path, capsys):
    out = tmp_path / "g.json"
    code, stdout, _ = run(["build-graph", "--b", "3", "--c", "1", "--level", "1",
                           "--out", str(out)], capsys)
    assert code == 0
    assert "16 vertices" in stdout and "24 edges" in stdout
    assert out.exists()
    manifest = json.loads((tmp_path / "g.json.manifest.json").read_text())
    assert manifest["command"] == "build-graph"
    assert manifest["params"]["b"] == 3
    assert set(manifest["versions"]) == {"fpclab", "python", "numpy"}
    assert list(manifest["outputs"].values())[0]  # sha256 recorded


def test_invalid_spec_is_a_usage_error(capsys):
    code, _, stderr = run(["build-graph", "--b", "4", "--c", "1", "--level", "1"], capsys)
    assert code == 2
    assert "even" in stderr


def test_unknown_subcommand_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_code_params_formula_only(capsys):
    code, stdout, _ = run(["code-params", "--b", "14", "--c", "12", "--level", "1",
                           "--formula-only"], capsys)
    assert code == 0
    assert "n = 37856" in stdout and "k = 2" in stdout


def test_code_params_resource_gate(tmp_path, capsys):
    code, _, stderr = run(["code-params", "--b", "3", "--c", "1", "--level", "4"], capsys)
    assert code == 3
    assert "--force" in stderr
    # formula-only path never materializes, so no gate
    code, stdout, _ = run(["code-params", "--b", "3", "--c", "1", "--level", "4",
                           "--formula-only"], capsys)
    assert code == 0
    assert "n = 143857216" in stdout


def test_code_params_rank_certificate(tmp_path, capsys):
    report = tmp_path / "report.json"
    code, stdout, _ = run(["code-params", "--b", "3", "--c", "1", "--level", "1",
                           "--out", str(report)], capsys)
    assert code == 0
    doc = json.loads(report.read_text())
    assert doc["n"] == 896 and doc["k"] == 2
    assert doc["k_from_ranks"] == 2 and doc["k_agreement"]


def test_verify_round_trips_exported_files(tmp_path, capsys):
    exp = tmp_path / "exp"
    code, _, _ = run(["code-params", "--b", "3", "--c", "1", "--level", "1",
                      "--export", str(exp)], capsys)
    assert code == 0
    code, stdout, _ = run(["verify", "--b", "3", "--c", "1", "--level", "1",
                           "--from", str(exp)], capsys)
    assert code == 0
    assert "[pass]" in stdout and "[FAIL]" not in stdout


def test_verify_flags_corrupted_export(tmp_path, capsys):
    exp = tmp_path / "exp"
    run(["code-params", "--b", "3", "--c", "1", "--level", "0",
         "--export", str(exp)], capsys)
    hz = exp / "hz.txt"
    lines = hz.read_text().splitlines()
    first = lines[1].split()
    lines[1] = f"{first[0]} {(int(first[1]) + 1) % 33}"
    hz.write_text("\n".join(lines) + "\n")
    code, stdout, stderr = run(["verify", "--b", "3", "--c", "1", "--level", "0",
                                "--from", str(exp)], capsys)
    assert code == 1
    assert "[FAIL]" in stdout
    assert "invariant failure" in stderr


def test_verify_full_battery(capsys):
    code, stdout, _ = run(["verify", "--b", "3", "--c", "1", "--level", "1"], capsys)
    assert code == 0
    for name in ("counting-closed-forms", "kunneth-degree-4", "sector-isomorphism",
                 "degeneracy-closed-form"):
        assert f"[pass] {name}" in stdout


def test_dualize_checks_identity(tmp_path, capsys):
    model_path = tmp_path / "cyc.json"
    save_model(chain_model(4, 0.3, periodic=True), model_path)
    out = tmp_path / "dual.json"
    code, stdout, _ = run(["dualize", "--model", str(model_path),
                           "--out", str(out)], capsys)
    assert code == 0
    assert "rel err" in stdout
    doc = json.loads(out.read_text())
    assert doc["identity"]["relative_error"] <= 1e-9
    assert doc["prefactor"]["lam"] == 4


def test_dualize_rejects_zero_coupling(tmp_path, capsys):
    model_path = tmp_path / "zero.json"
    save_model(IsingModel(2, [((0, 1), 0.0)]), model_path)
    code, _, stderr = run(["dualize", "--model", str(model_path)], capsys)
    assert code == 2
    assert "error" in stderr


def test_sector_embeds_generators(tmp_path, capsys):
    out = tmp_path / "z.json"
    code, stdout, _ = run(["sector", "--b", "3", "--c", "1", "--level", "0",
                           "--sector", "Z", "--beta", "0.4", "--out", str(out)], capsys)
    assert code == 0
    assert "5 constraint generators" in stdout
    doc = json.loads(out.read_text())
    assert doc["spins"] == 33
    assert len(doc["constraint_generators"]["vectors"]) == 5


def test_simulate_is_seed_deterministic(tmp_path, capsys):
    argv = ["simulate", "--square", "4", "--betas", "0.3:0.5:3", "--sweeps", "300",
            "--burn-in", "30", "--seed", "11"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(argv + ["--out", str(a)], capsys)[0] == 0
    assert run(argv + ["--out", str(b)], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert (tmp_path / "a_aggregated.csv").read_bytes() == \
        (tmp_path / "b_aggregated.csv").read_bytes()


def test_simulate_validates_arguments(tmp_path, capsys):
    code, _, stderr = run(["simulate", "--square", "4", "--betas", "bogus",
                           "--seed", "1", "--out", str(tmp_path / "x.csv")], capsys)
    assert code == 2
    code, _, stderr = run(["simulate", "--seed", "1",
                           "--out", str(tmp_path / "y.csv")], capsys)
    assert code == 2
    assert "exactly one" in stderr


def test_barrier_report(tmp_path, capsys):
    out = tmp_path / "barrier.json"
    code, stdout, _ = run(["barrier", "--b", "3", "--c", "1", "--level", "2",
                           "--out", str(out)], capsys)
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["count"] == 8 and doc["closed_form"] == 8 and doc["exact"]
    assert len(doc["crossed_edges"]) == 8


def test_crossing_handles_disjoint_and_absent(tmp_path, capsys):
    sim = ["simulate", "--square", "4", "--sweeps", "300", "--burn-in", "30",
           "--seed", "2"]
    run(sim + ["--betas", "0.30:0.40:3", "--out", str(tmp_path / "s.csv")], capsys)
    run(sim + ["--betas", "0.60:0.70:3", "--out", str(tmp_path / "l.csv")], capsys)
    code, _, stderr = run(["crossing", "--small", str(tmp_path / "s_aggregated.csv"),
                           "--large", str(tmp_path / "l_aggregated.csv")], capsys)
    assert code == 2  # grids do not overlap
    # identical curves cross degenerately, still exit 0
    code, stdout, _ = run(["crossing", "--small", str(tmp_path / "s_aggregated.csv"),
                           "--large", str(tmp_path / "s_aggregated.csv")], capsys)
    assert code == 0
    assert "degenerate" in stdout


def test_replay_reproduces_and_detects_tampering(tmp_path, capsys):
    out = tmp_path / "obs.csv"
    code, _, _ = run(["simulate", "--square", "4", "--betas", "0.3:0.4:2",
                      "--sweeps", "300", "--burn-in", "30", "--seed", "5",
                      "--out", str(out)], capsys)
    assert code == 0
    manifest = tmp_path / "obs.csv.manifest.json"
    code, stdout, _ = run(["replay", "--manifest", str(manifest)], capsys)
    assert code == 0
    assert "byte-identically" in stdout
    doc = json.loads(manifest.read_text())
    key = next(iter(doc["outputs"]))
    doc["outputs"][key] = "0" * 64
    bad = tmp_path / "tampered.json"
    bad.write_text(json.dumps(doc))
    code, _, stderr = run(["replay", "--manifest", str(bad)], capsys)
    assert code == 1
    assert "mismatch" in stderr
