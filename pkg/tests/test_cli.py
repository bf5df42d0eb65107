import json
import math
import subprocess
import sys

import pytest

from steerkit.cli import main
from steerkit.states import save_density, werner_derivative


def run_json(args, tmp_path, name="out.json"):
    out = tmp_path / name
    code = main([*args, "--out", str(out)])
    return code, (json.loads(out.read_text()) if out.exists() else None)


# ---------------------------------------------------------------------------
# build


def test_build_mum_projective(tmp_path):
    code, payload = run_json(["build", "mum", "--d", "2", "--target", "projective"], tmp_path)
    assert code == 0
    assert abs(payload["kappa"] - 1.0) < 1e-12
    assert payload["validation"]["passed"] is True
    assert len(payload["effects"]) == 3 and len(payload["effects"][0]) == 2


def test_build_gsic_max_t(tmp_path):
    code, payload = run_json(["build", "gsic", "--d", "3", "--target", "max-t"], tmp_path)
    assert code == 0
    assert 1.0 / 27.0 < payload["a"] <= 1.0 / 9.0
    assert payload["validation"]["passed"] is True


def test_build_degenerate_t_exits_2(tmp_path):
    assert main(["build", "mum", "--d", "2", "--t", "0"]) == 2


def test_build_infeasible_t_exits_2():
    assert main(["build", "mum", "--d", "3", "--t", "0.9"]) == 2


# ---------------------------------------------------------------------------
# evaluate


def test_evaluate_munro_gap_state(tmp_path):
    code, payload = run_json(
        ["evaluate", "--family", "munro-mems", "--params", "C=0.69"], tmp_path
    )
    assert code == 0
    assert payload["criterion"] == "Cor1-H"
    assert payload["detected"] is True
    assert payload["measurement"] == {"kind": "pauli-correlation", "d": 2}


def test_evaluate_not_detected_cases(tmp_path):
    code, payload = run_json(
        ["evaluate", "--family", "werner-derivative", "--params", "p=0.5,theta=0.7853981633974483"],
        tmp_path,
    )
    assert code == 0 and payload["detected"] is False  # H = 1.5 < sqrt(3)
    code, payload = run_json(
        ["evaluate", "--family", "max-steerable-mixed", "--params", "tau=-0.5"], tmp_path
    )
    assert code == 0 and payload["detected"] is True  # H = 2 > sqrt(3)


def test_evaluate_explicit_criterion_carries_measurement_provenance(tmp_path):
    code, payload = run_json(
        ["evaluate", "--family", "munro-mems", "--params", "C=0.8", "--criterion", "thm1-mum"],
        tmp_path,
    )
    assert code == 0
    meas = payload["measurement"]
    assert meas["kind"] == "mum" and meas["d"] == 2
    assert abs(meas["kappa"] - 1.0) < 1e-12
    assert meas["qubit_side"]["conjugated"] is True


def test_evaluate_measurement_overrides(tmp_path):
    code, payload = run_json(
        [
            "evaluate",
            "--family",
            "munro-mems",
            "--params",
            "C=0.9",
            "--criterion",
            "thm1-mum",
            "--t-qudit",
            "0.2",
            "--no-conjugate",
        ],
        tmp_path,
    )
    assert code == 0
    assert payload["measurement"]["t"] == 0.2
    assert payload["measurement"]["kappa"] < 1.0
    assert payload["measurement"]["qubit_side"]["conjugated"] is False


def test_evaluate_state_file(tmp_path):
    path = tmp_path / "state.json"
    save_density(path, werner_derivative(0.9, math.pi / 4))
    code, payload = run_json(["evaluate", "--state", str(path)], tmp_path)
    assert code == 0 and payload["detected"] is True
    assert payload["state"] == {"file": str(path)}


def test_evaluate_bad_state_file_exits_3(tmp_path):
    path = tmp_path / "garbage.json"
    path.write_text("{broken")
    assert main(["evaluate", "--state", str(path)]) == 3


def test_evaluate_missing_state_exits_3():
    assert main(["evaluate"]) == 3


def test_unwritable_output_exits_4():
    assert (
        main(
            [
                "evaluate",
                "--family",
                "munro-mems",
                "--params",
                "C=0.8",
                "--out",
                "/nonexistent-dir/report.json",
            ]
        )
        == 4
    )


# ---------------------------------------------------------------------------
# sweep


def test_sweep_single_axis_schema_and_boundary(tmp_path):
    out = tmp_path / "msm.csv"
    code = main(
        ["sweep", "--family", "max-steerable-mixed", "--axis", "tau=-1:1:201", "--out", str(out)]
    )
    assert code == 0
    lines = out.read_text().strip().split("\n")
    assert lines[0] == "tau,j,threshold,margin,detected"
    rows = [line.split(",") for line in lines[1:]]
    assert len(rows) == 201
    flips = [
        (float(a[0]), float(b[0]))
        for a, b in zip(rows, rows[1:])
        if a[4] != b[4]
    ]
    assert len(flips) == 1
    tau_star = (1.0 - math.sqrt(3.0)) / 2.0
    assert flips[0][0] <= tau_star <= flips[0][1] + 1e-12


def test_sweep_two_axis_matches_closed_form(tmp_path):
    out = tmp_path / "werner.csv"
    code = main(
        [
            "sweep",
            "--family",
            "werner-derivative",
            "--axis",
            "p=0:1:21",
            "--axis",
            "theta=0:0.7853981633974483:21",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    lines = out.read_text().strip().split("\n")
    assert lines[0] == "p,theta,j,threshold,margin,detected"
    assert len(lines) == 1 + 21 * 21
    for line in lines[1:]:
        p, theta, j, thr, margin, flag = line.split(",")
        p, theta = float(p), float(theta)
        expected = p * (1 + 2 * math.sin(2 * theta)) > math.sqrt(3.0)
        assert flag == ("1" if expected else "0")


def test_sweep_no_detection_below_half_p(tmp_path):
    out = tmp_path / "empty.csv"
    code = main(
        [
            "sweep",
            "--family",
            "werner-derivative",
            "--axis",
            "p=0:0.5:11",
            "--axis",
            "theta=0:0.7853981633974483:11",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    assert all(line.endswith(",0") for line in out.read_text().strip().split("\n")[1:])


def test_sweep_measurement_override_shifts_threshold(tmp_path):
    from steerkit.measurements import mum_kappa_closed_form

    out = tmp_path / "soft.csv"
    code = main(
        [
            "sweep",
            "--family",
            "munro-mems",
            "--axis",
            "C=0.6:1:5",
            "--criterion",
            "thm1-mum",
            "--t-qudit",
            "0.1",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    kappa = mum_kappa_closed_form(2, 0.1)
    mu = 1.0 / math.sqrt(3.0)
    # bob side stays projective (kappa = 1); threshold follows the kappa mix
    expected = math.sqrt(kappa + 1.0) * math.sqrt(8.0) / (2.0 * mu) - 3.0 * (1.0 - mu) / (2.0 * mu)
    for line in out.read_text().strip().split("\n")[1:]:
        assert abs(float(line.split(",")[2]) - expected) < 1e-12


def test_sweep_jobs_deterministic(tmp_path):
    args = ["sweep", "--family", "munro-mems", "--axis", "C=0:1:41"]
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main([*args, "--out", str(out1)]) == 0
    assert main([*args, "--jobs", "2", "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_sweep_rejects_bad_axis():
    assert main(["sweep", "--family", "munro-mems", "--axis", "C=0:1:1"]) == 3
    assert main(["sweep", "--family", "munro-mems", "--axis", "nope"]) == 3


# ---------------------------------------------------------------------------
# boundary


def test_boundary_bad_bracket_exits_5():
    assert (
        main(
            [
                "boundary",
                "--family",
                "munro-mems",
                "--param",
                "C",
                "--bracket",
                "0",
                "0.5",
            ]
        )
        == 5
    )


def test_boundary_reports_reference(tmp_path):
    code, payload = run_json(
        ["boundary", "--family", "munro-mems", "--param", "C", "--bracket", "0", "1"], tmp_path
    )
    assert code == 0
    assert abs(payload["boundary"] - payload["reference"]) < 1e-6
    assert abs(payload["reference"] - (1 + math.sqrt(3)) / 4) < 1e-12


# ---------------------------------------------------------------------------
# simulate


def test_simulate_deterministic_bytes(tmp_path):
    args = [
        "simulate",
        "--family",
        "munro-mems",
        "--params",
        "C=0.9",
        "--shots",
        "20000",
        "--seed",
        "11",
    ]
    out1, out2 = tmp_path / "s1.json", tmp_path / "s2.json"
    assert main([*args, "--out", str(out1)]) == 0
    assert main([*args, "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_simulate_detects_clear_margin(tmp_path):
    code, payload = run_json(
        [
            "simulate",
            "--family",
            "munro-mems",
            "--params",
            "C=0.9",
            "--shots",
            "1000000",
            "--seed",
            "1",
        ],
        tmp_path,
    )
    assert code == 0
    assert payload["verdict"] == "Detected"
    assert abs(payload["estimate"]["j_hat"] - payload["j_exact"]) < 5 * payload["estimate"]["std_error"]


def test_simulate_near_boundary_inconclusive(tmp_path):
    code, payload = run_json(
        [
            "simulate",
            "--family",
            "munro-mems",
            "--params",
            "C=0.6831",
            "--shots",
            "1000",
            "--seed",
            "2",
        ],
        tmp_path,
    )
    assert code == 0
    assert payload["verdict"] == "Inconclusive"


# ---------------------------------------------------------------------------
# misc plumbing


def test_out_dir_env_var(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("STEERKIT_OUT_DIR", str(tmp_path))
    assert main(["evaluate", "--family", "munro-mems", "--params", "C=0.8", "--out", "report.json"]) == 0
    assert (tmp_path / "report.json").exists()


def test_console_entry_point_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "steerkit.cli", "evaluate", "--family", "munro-mems", "--params", "C=0.69"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["detected"] is True


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
