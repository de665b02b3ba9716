import json
import os

import pytest

from hintlock.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_entropy_uniform_constant_column(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"source": {"uniform": 4}, "alpha": [0, 0.5, 1, 2, "inf"]}))
    code, out, err = run(capsys, "entropy", str(cfg))
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("suite,instance,check")
    values = {line.split(",")[4] for line in lines[1:] if line.split(",")[1].startswith("alpha")}
    assert values == {"2"}  # 2.0 bits at every order
    assert "0 failures" in err


def test_guess_and_task_commands(capsys):
    cfg = json.dumps({"source": {"uniform": 4}, "rho": [0.5, 1, 2], "z_count": 2})
    code, out, _ = run(capsys, "guess", cfg)
    assert code == 0 and "optimal-above-floor" in out
    code, out, _ = run(capsys, "task", json.dumps({"source": {"uniform": 4}, "z_count": 5}))
    assert code == 0 and "achievability" in out


def test_twohint_command_and_determinism(tmp_path, capsys):
    cfg = tmp_path / "two.json"
    cfg.write_text(
        json.dumps(
            {
                "source": {"uniform": 4},
                "rho": [1.0],
                "version": "guessing",
                "scheme": {"kind": "two-hint", "cs": 2, "c1": 2, "c2": 1, "m1_size": 4, "m2_size": 4},
            }
        )
    )
    out1 = tmp_path / "r1.csv"
    out2 = tmp_path / "r2.csv"
    assert main(["twohint", str(cfg), "--rational", "--seed", "7", "--out", str(out1)]) == 0
    assert main(["twohint", str(cfg), "--rational", "--seed", "7", "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    body = out1.read_text()
    assert "bob-direct-g" in body and "seed=7" in body


def test_disks_command(capsys):
    cfg = json.dumps(
        {
            "source": {"uniform": 16},
            "rho": [1.0],
            "scheme": {"delta": 3, "nu": 2, "eta": 1, "s": 4, "p": 2, "r": 2},
        }
    )
    code, out, _ = run(capsys, "disks", cfg, "--rational")
    assert code == 0
    assert "nu-subset-recovery" in out and "eta-subset-independence" in out


def test_distortion_command(capsys):
    cfg = json.dumps({"source": {"x": [0, 1, 2], "p": [0.5, 0.3, 0.2]}, "rho": [1.0], "n": 1,
                      "distortion": {"hamming": True, "delta": 0.0}})
    code, out, _ = run(capsys, "distortion", cfg)
    assert code == 0 and "greedy-above-oracle" in out


def test_exponent_command_negative_infinity(capsys):
    cfg = json.dumps({"rho": [1.0], "entropy_rate": 1.5, "rates": {"r1": 0.5, "r2": 0.5}})
    code, out, _ = run(capsys, "exponent", cfg)
    assert code == 0
    assert "-inf" in out


def test_exponent_boundary_label(capsys):
    cfg = json.dumps({"rho": [1.0], "entropy_rate": 1.5, "rates": {"r1": 0.75, "r2": 0.75}})
    code, out, _ = run(capsys, "exponent", cfg)
    assert code == 0 and "boundary-flagged" in out


def test_verify_all_passes(tmp_path, capsys):
    out1 = tmp_path / "v1.csv"
    out2 = tmp_path / "v2.csv"
    assert main(["verify-all", "{}", "--seed", "3", "--out", str(out1)]) == 0
    assert main(["verify-all", "{}", "--seed", "3", "--out", str(out2), "--jobs", "2"]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    assert ",1," in out1.read_text()


def test_config_parse_error_diagnostics(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["entropy", "{bad json"])
    assert "line" in str(exc.value) and "col" in str(exc.value)


def test_missing_source_file(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["entropy", json.dumps({"source": {"path": "/nonexistent/p.json"}})])
    assert "does not exist" in str(exc.value)


def test_jobs_env_override(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("HINTLOCK_JOBS", "2")
    out = tmp_path / "v.csv"
    assert main(["verify-all", "{}", "--out", str(out)]) == 0
    assert out.exists()
