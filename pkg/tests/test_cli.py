import json
import subprocess
import sys

import numpy as np
import pytest

from multipeak.constants import CSV_COLUMNS
from multipeak.groundstate import GroundState

@pytest.fixture(scope="session")
def cache_dir(tmp_path_factory):
    return str(tmp_path_factory.mktemp("gs-cache"))


@pytest.fixture(scope="session")
def warp_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("warp") / "bumpy.csv"
    t = np.linspace(0.0, np.pi, 201)
    f = np.sin(t) * (1.0 + 0.15 * np.sin(t) ** 2)
    lines = ["# t,f"] + [f"{float(a)!r},{float(b)!r}" for a, b in zip(t, f)]
    path.write_text("\n".join(lines) + "\n")
    return str(path)


def run_cli(*argv, expect=0):
    proc = subprocess.run(
        [sys.executable, "-m", "multipeak.cli", *argv],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == expect, proc.stdout + proc.stderr
    return proc


def test_ground_state_record(cache_dir, tmp_path):
    out = tmp_path / "gs.json"
    run_cli("ground-state", "--n", "3", "--m", "3",
            "--cache-dir", cache_dir, "--out", str(out))
    doc = json.loads(out.read_text())
    assert doc["p"] == 3.0
    assert doc["provenance"]["version"]
    assert doc["provenance"]["grid"]["n_nodes"] == 4000
    rep = doc["identity_report"]
    assert rep["e_energy"] < 1e-8
    assert rep["e_pohozaev"] < 1e-8
    assert rep["e_alpha"] < 1e-12
    gs = GroundState.from_dict(doc["record"])
    assert gs(0.0) == pytest.approx(doc["record"]["u0"], rel=1e-14)


def test_ground_state_rejects_supercritical(cache_dir):
    proc = run_cli("ground-state", "--n", "3", "--p", "6",
                   "--cache-dir", cache_dir, expect=1)
    doc = json.loads(proc.stdout)
    assert doc["error"] == "SubcriticalViolation"
    assert "detail" in doc


def test_exponent_flags_are_exclusive(cache_dir):
    proc = run_cli("ground-state", "--n", "3", "--m", "3", "--p", "3.0",
                   "--cache-dir", cache_dir, expect=1)
    assert json.loads(proc.stdout)["error"] == "ValueError"


def test_psi_record(cache_dir, tmp_path):
    out = tmp_path / "psi.json"
    run_cli("psi", "--n", "3", "--m", "3",
            "--cache-dir", cache_dir, "--out", str(out))
    doc = json.loads(out.read_text())
    assert doc["correction"]["discrete_residual"] < 1e-8
    assert -1.2 < doc["correction"]["tail_exponent"] < -0.8
    assert max(abs(v) for v in doc["identity_report"].values()) < 1e-6


def test_constants_record(cache_dir, tmp_path):
    out = tmp_path / "const.json"
    run_cli("constants", "--n", "3", "--m", "3", "--seed", "11",
            "--cache-dir", cache_dir, "--out", str(out))
    doc = json.loads(out.read_text())
    row = doc["constants"]
    assert row["N"] == 6 and row["beta"] < 0
    assert doc["gamma"]["spread"] < 1e-8
    assert doc["provenance"]["seed"] == 11


def test_beta_table_enumeration(cache_dir, tmp_path):
    out = tmp_path / "beta.csv"
    run_cli("beta-table", "--max-N", "7",
            "--cache-dir", cache_dir, "--out", str(out))
    lines = out.read_text().splitlines()
    comments = [l for l in lines if l.startswith("#")]
    body = [l for l in lines if not l.startswith("#")]
    assert any("version" in c for c in comments)
    assert body[0] == ",".join(CSV_COLUMNS)
    rows = [l.split(",") for l in body[1:]]
    assert [(r[0], r[1]) for r in rows] == [("3", "3"), ("3", "4"), ("4", "3")]
    beta_col = CSV_COLUMNS.index("beta")
    assert all(float(r[beta_col]) < 0 for r in rows)


def test_beta_table_rejects_small_range(cache_dir):
    proc = run_cli("beta-table", "--max-N", "5", "--cache-dir", cache_dir, expect=1)
    assert json.loads(proc.stdout)["error"] == "ValueError"


def test_phi_scan_sphere_warns_but_succeeds(cache_dir, tmp_path):
    out = tmp_path / "scan.csv"
    run_cli("phi-scan", "--n", "3", "--m", "3",
            "--cache-dir", cache_dir, "--out", str(out))
    lines = out.read_text().splitlines()
    header = [l for l in lines if not l.startswith("#")][0]
    assert header == "t,s,lap_s,ric2,riem2,phi"
    doc = json.loads((tmp_path / "scan.points.json").read_text())
    assert "NoInteriorCritical" in doc["warning"]
    assert doc["points"] == []


def test_phi_scan_warped_finds_symmetric_point(cache_dir, tmp_path, warp_csv):
    out = tmp_path / "warp_scan.csv"
    run_cli("phi-scan", "--n", "3", "--m", "3", "--model", "warped",
            "--profile", warp_csv, "--cache-dir", cache_dir, "--out", str(out))
    doc = json.loads((tmp_path / "warp_scan.points.json").read_text())
    assert doc["warning"] is None
    assert doc["points"]
    mid = min(doc["points"], key=lambda c: abs(c["t"] - np.pi / 2))
    assert mid["t"] == pytest.approx(np.pi / 2, abs=1e-5)
    assert all(c["kind"] in ("min", "max", "degenerate") for c in doc["points"])


def test_phi_scan_needs_profile_for_warped(cache_dir):
    proc = run_cli("phi-scan", "--n", "3", "--m", "3", "--model", "warped",
                   "--cache-dir", cache_dir, expect=1)
    assert json.loads(proc.stdout)["error"] == "ValueError"


def test_energy_check_single_peak_report(cache_dir, tmp_path):
    out = tmp_path / "energy.json"
    run_cli("energy-check", "--n", "3", "--m", "3", "--K", "1",
            "--eps", "0.1,0.07,0.05,0.035",
            "--cache-dir", cache_dir, "--out", str(out))
    doc = json.loads(out.read_text())
    assert [pe["epsilon"] for pe in doc["per_eps"]] == [0.1, 0.07, 0.05, 0.035]
    for pe in doc["per_eps"]:
        assert pe["admissible"] is True
        bd = pe["breakdown"]
        total = (bd["term_alpha"] + bd["term_beta"] + bd["term_phi"]
                 + bd["term_interaction"] + bd["remainder"])
        assert bd["J_measured"] == pytest.approx(total, abs=1e-12)
    fit = doc["coefficient_fit"]
    assert fit["eps2_coeff"] == pytest.approx(doc["predicted"]["eps2_coeff"], rel=1e-2)
    assert doc["residual_slopes"]["W_slope"] == pytest.approx(2.0, abs=0.2)


def test_energy_check_short_ladder_skips_fit(cache_dir, tmp_path):
    # 3 basis terms: fewer than 4 rungs cannot support a fit
    out = tmp_path / "energy_short.json"
    run_cli("energy-check", "--n", "3", "--m", "3", "--K", "1",
            "--eps", "0.1,0.07", "--cache-dir", cache_dir, "--out", str(out))
    doc = json.loads(out.read_text())
    assert "coefficient_fit" not in doc
    assert "predicted" not in doc
    assert "4 epsilon" in doc["note"]
    assert len(doc["per_eps"]) == 2


def test_energy_check_flags_inadmissible_pair(cache_dir, tmp_path):
    out = tmp_path / "energy2.json"
    run_cli("energy-check", "--n", "3", "--m", "3", "--K", "2",
            "--eps", "0.05", "--cache-dir", cache_dir, "--out", str(out))
    doc = json.loads(out.read_text())
    pe = doc["per_eps"][0]
    assert pe["admissible"] is False
    assert pe["margin"] < 0
    assert pe["breakdown"]["term_interaction"] < 0


def test_energy_check_validates_K(cache_dir):
    proc = run_cli("energy-check", "--n", "3", "--m", "3", "--K", "3",
                   "--cache-dir", cache_dir, expect=1)
    assert json.loads(proc.stdout)["error"] == "ValueError"


def test_config_file_supplies_flags(cache_dir, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("n = 3\nm = 3\neps = 0.1,0.07  # short ladder\n")
    out = tmp_path / "cfg_energy.json"
    run_cli("energy-check", "--config", str(cfg),
            "--cache-dir", cache_dir, "--out", str(out))
    doc = json.loads(out.read_text())
    assert doc["provenance"]["grid"]["eps_ladder"] == [0.1, 0.07]


def test_cache_is_content_addressed(cache_dir, tmp_path):
    run_cli("ground-state", "--n", "3", "--m", "3",
            "--cache-dir", cache_dir, "--out", str(tmp_path / "a.json"))
    import pathlib

    entries = sorted(pathlib.Path(cache_dir).glob("gs-*.json"))
    assert entries
    doc = json.loads(entries[0].read_text())
    assert doc["n"] == 3


@pytest.mark.parametrize(
    "argv",
    [
        ("ground-state", "--n", "3", "--m", "3"),
        ("psi", "--n", "3", "--m", "3"),
        ("constants", "--n", "3", "--m", "3", "--seed", "5"),
        ("beta-table", "--max-N", "6"),
        ("phi-scan", "--n", "3", "--m", "3"),
        ("energy-check", "--n", "3", "--m", "3", "--eps", "0.1,0.07"),
    ],
    ids=["ground-state", "psi", "constants", "beta-table", "phi-scan", "energy"],
)
def test_reruns_are_byte_identical(cache_dir, tmp_path, argv):
    a, b = tmp_path / "a.out", tmp_path / "b.out"
    run_cli(*argv, "--cache-dir", cache_dir, "--out", str(a))
    run_cli(*argv, "--cache-dir", cache_dir, "--out", str(b))
    assert a.read_bytes() == b.read_bytes()
