# -*- coding: utf-8 -*-

import csv
import json
import os

import pytest

import schwarzflow.cli as cli


def read_json(out_dir, name):
    with open(os.path.join(out_dir, name)) as f:
        return json.load(f)


def write_config(out_dir, text):
    path = os.path.join(out_dir, "run.cfg")
    with open(path, "w") as f:
        f.write(text)
    return path


def test_lemma36(out_dir, capsys):
    assert cli.main(["-o", out_dir, "lemma36"]) == 0
    data = read_json(out_dir, "lemma36.json")
    assert data["holds"] is True
    assert data["schema"] == 1
    manifest = read_json(out_dir, "manifest.json")
    assert manifest["exit_code"] == 0
    assert manifest["command"] == "lemma36"
    assert any(path.endswith("lemma36.json")
               for path in manifest["artifacts"])
    assert "total" in capsys.readouterr().out


def test_lemma36_without_plateau_fails(out_dir, capsys):
    assert cli.main(["-o", out_dir, "lemma36", "--n", "1"]) == 1
    assert "failed: ne2" in capsys.readouterr().out
    assert read_json(out_dir, "manifest.json")["exit_code"] == 1


def test_json_summary(out_dir, capsys):
    assert cli.main(["--json", "-o", out_dir, "lemma36"]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["holds"] is True


def test_verify_geometry(out_dir):
    assert cli.main(["-o", out_dir, "verify-geometry", "--samples", "3"]) == 0
    with open(os.path.join(out_dir, "geometry_oracle.csv")) as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["r", "p", "s", "component", "closed_form", "oracle",
                       "abs_err"]
    assert len(rows) > 1
    assert read_json(out_dir, "geometry.json")["passed"] is True


def test_verify_geometry_detects_fault(out_dir):
    code = cli.main(["--inject-fault", "R_0101", "-o", out_dir,
                     "verify-geometry", "--samples", "3"])
    assert code == 1


def test_missing_command(out_dir, capsys):
    assert cli.main(["-o", out_dir]) == 2


def test_unknown_option():
    assert cli.main(["lemma36", "--frobnicate"]) == 2


def test_bad_config(out_dir, capsys):
    path = write_config(out_dir, "background = flat\n")
    assert cli.main(["-c", path, "-o", out_dir, "lemma36"]) == 2
    assert "config error" in capsys.readouterr().err


def test_eigen_rejects_small_grid(out_dir, capsys):
    assert cli.main(["-o", out_dir, "eigen", "--grid-n", "8"]) == 2
    assert read_json(out_dir, "manifest.json")["exit_code"] == 2


def test_eigen(out_dir):
    path = write_config(out_dir, "residual_threshold = 1.0\n")
    assert cli.main(["-c", path, "-o", out_dir, "eigen",
                     "--grid-n", "64"]) == 0
    data = read_json(out_dir, "eigen.json")
    assert -2.0 < data["lambda"] < 0.0
    assert data["grid_n"] == 64
    with open(os.path.join(out_dir, "mode.csv")) as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["p", "r", "u0", "u1", "u2"]
    assert len(rows) == 65


def test_flow_zero_amplitude(out_dir):
    path = write_config(out_dir, "\n".join([
        "eigen_n = 256", "grid_n = 256", "s_max = 12", "epsilon = 0",
        "dt = 1e-3", "t_end = 0.5", ""]))
    assert cli.main(["-c", path, "-o", out_dir, "flow"]) == 0
    summary = read_json(out_dir, "flow_summary.json")
    assert summary["drift"] <= 1e-8
    assert read_json(out_dir, "manifest.json")["exit_code"] == 0


@pytest.mark.slow
def test_flow(out_dir):
    path = write_config(out_dir, "\n".join([
        "eigen_n = 256", "grid_n = 256", "s_max = 12", "epsilon = 1e-3",
        "t_end = -7.4", "record_every = 20", ""]))
    assert cli.main(["-c", path, "-o", out_dir, "flow"]) == 0
    summary = read_json(out_dir, "flow_summary.json")
    assert summary["reason"] == "t_end"
    assert summary["growth"]["points"] >= 3
    assert summary["growth_matches"] is True
    assert summary["lambda_gap"] <= 0.05
    with open(os.path.join(out_dir, "trajectory.csv")) as f:
        header = next(csv.reader(f))
    assert header[0] == "t"


@pytest.mark.slow
def test_ancient(out_dir):
    path = write_config(out_dir, "\n".join([
        "eigen_n = 256", "grid_n = 256", "s_max = 12", "dt = 1e-3",
        "record_every = 20",
        "epsilons = 0.0625, 0.03125, 0.015625, 0.0078125",
        "t_common = -3.0", ""]))
    code = cli.main(["-c", path, "-o", out_dir, "ancient", "--workers", "2"])
    assert code == 0
    data = read_json(out_dir, "ancient.json")
    assert len(data["rows"]) == 4
    distances = data["distances"]
    assert all(b < a for a, b in zip(distances, distances[1:]))
    assert data["deturck"]["passed"] is True
    assert read_json(out_dir, "manifest.json")["exit_code"] == 0
