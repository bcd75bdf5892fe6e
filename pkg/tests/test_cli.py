import json

import numpy as np
import pytest

from firmkinetics.cli import main
from firmkinetics.simplex import sample_simplex_block
from firmkinetics.seeding import spawn_rng


@pytest.fixture
def mini_plan(tmp_path):
    payload = {
        "schema_version": 1,
        "name": "cli_mini",
        "economy": {
            "firm_count": 30,
            "mode": "coupled",
            "turnover": {"kind": "constant", "lambda": 0.0},
            "steps": 3_000,
            "burn_in": 500,
            "record_stride": 50,
            "seed": 12,
        },
        "outputs": ["histogram"],
        "output_dir": str(tmp_path / "out"),
    }
    path = tmp_path / "plan.json"
    path.write_text(json.dumps(payload))
    return path, tmp_path


def test_run_writes_files_and_exits_zero(mini_plan, capsys):
    path, tmp = mini_plan
    assert main(["run", str(path)]) == 0
    out = capsys.readouterr().out.strip().splitlines()
    assert any("histogram.csv" in line for line in out)
    assert any("manifest.json" in line for line in out)
    assert (tmp / "out/cli_mini/cli_mini__histogram.csv").exists()


def test_run_bad_plan_exits_one(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["run", str(bad)]) == 1
    assert "error" in capsys.readouterr().err


def test_sweep_requires_axis(mini_plan, capsys):
    path, _ = mini_plan
    assert main(["sweep", str(path)]) == 1
    assert "no sweep axis" in capsys.readouterr().err


def test_seed_flag_overrides_plan_seed(mini_plan, capsys):
    path, tmp = mini_plan
    assert main(["run", str(path), "--seed", "777"]) == 0
    manifest = json.loads((tmp / "out/cli_mini/cli_mini__manifest.json").read_text())
    assert manifest["cells"][0]["seed"] == 777


def test_output_dir_flag(mini_plan, tmp_path):
    path, _ = mini_plan
    dest = tmp_path / "elsewhere"
    assert main(["run", str(path), "--output-dir", str(dest)]) == 0
    assert (dest / "cli_mini/cli_mini__manifest.json").exists()


def test_validate_passes_for_sound_plan(mini_plan, capsys):
    path, _ = mini_plan
    assert main(["validate", str(path)]) == 0
    out = capsys.readouterr().out
    assert "PASS determinism_replay" in out
    assert "PASS conservation_drift" in out


def test_sample_simplex_stdout_matches_library(capsys):
    assert main(["sample-simplex", "--n", "3", "--count", "4", "--seed", "9"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "eps_0,eps_1,eps_2"
    got = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
    expected = sample_simplex_block(3, 4, spawn_rng(9))
    assert np.array_equal(got, expected)  # stdout round-trips exactly


def test_sample_simplex_to_file(tmp_path):
    dest = tmp_path / "eps.csv"
    assert main(
        ["sample-simplex", "--n", "2", "--count", "5", "--seed", "3", "--out", str(dest)]
    ) == 0
    rows = dest.read_text().strip().splitlines()
    assert rows[0] == "eps_0,eps_1"
    assert len(rows) == 6


def test_sample_simplex_rejects_bad_arity(capsys):
    assert main(["sample-simplex", "--n", "1", "--count", "5", "--seed", "3"]) == 1
