import json

import numpy as np
import pytest

from nlflux.cli import main


def run(args):
    return main(args)


def test_adjoint_check(tmp_path, capsys):
    code = run(["adjoint-check", "--dim", "1", "--grid", "16",
                "--delta", "0.25", "--out", str(tmp_path), "--trials", "25"])
    assert code == 0
    out = capsys.readouterr().out
    assert "max adjointness residual" in out
    header = (tmp_path / "results.csv").read_text().splitlines()[0]
    assert header == "trial,residual"


def test_unknown_config_key_rejected(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"cells_per_side": 8, "mystery": 1}))
    code = run(["solve-bp", "--config", str(cfg), "--out", str(tmp_path)])
    assert code == 2


def test_invalid_grid_is_config_error(tmp_path):
    code = run(["solve-bp", "--dim", "1", "--grid", "0",
                "--delta", "0.25", "--out", str(tmp_path)])
    assert code == 2


def test_nonconvergence_exit_code(tmp_path):
    code = run(["solve-bp", "--dim", "1", "--grid", "16", "--delta", "0.25",
                "--out", str(tmp_path), "--max-iters", "300",
                "--tol-gap", "1e-14", "--tol-primal", "1e-14"])
    assert code == 3


def test_solve_bp_report_and_schema(tmp_path):
    code = run(["solve-bp", "--dim", "1", "--grid", "16", "--delta", "0.25",
                "--out", str(tmp_path), "--antisym", "on"])
    assert code == 0
    lines = (tmp_path / "results.csv").read_text().splitlines()
    assert lines[0] == "value,dual_value,gap,primal_residual,iterations,converged"
    report = json.loads((tmp_path / "report.json").read_text())
    # resolved defaults are materialized for provenance
    assert report["config"]["solver"]["max_iters"] == 200000
    assert report["config"]["kernel_profile"] == "constant"
    assert report["report"]["converged"] is True


def test_sweep_beta_schema_and_rerun_identical(tmp_path):
    args = ["sweep-beta", "--dim", "1", "--grid", "12", "--delta", "0.25",
            "--out", str(tmp_path), "--seed", "7"]
    assert run(args) == 0
    first = (tmp_path / "results.csv").read_bytes()
    assert run(args) == 0
    second = (tmp_path / "results.csv").read_bytes()
    assert first == second
    header = first.decode().splitlines()[0]
    assert header == "beta,p_beta,norm12,half_beta_norm2sq,gap"
    assert b"\r" not in first  # plain newline endings


def test_sweep_gamma_schema(tmp_path):
    code = run(["sweep-gamma", "--dim", "1", "--grid", "12", "--delta", "0.25",
                "--gamma-values", "0.5,0.1", "--out", str(tmp_path)])
    assert code == 0
    lines = (tmp_path / "results.csv").read_text().splitlines()
    assert lines[0] == "gamma,p_hat,lower_cert,upper_cert"
    assert len(lines) == 3


def test_sweep_delta_matches_library(tmp_path):
    from nlflux import (ScalarField, SolverConfig, build_grid, delta_sweep)

    code = run(["sweep-delta", "--dim", "1", "--grid", "24", "--delta", "0.25",
                "--delta-values", "0.25,0.15", "--out", str(tmp_path),
                "--step-ratio", "4.0", "--tol-gap", "1e-7",
                "--tol-primal", "1e-8"])
    assert code == 0
    lines = (tmp_path / "results.csv").read_text().splitlines()
    assert lines[0] == "delta,d_star,p_star_antisym,local_ref"

    g = build_grid(1, 24, 0.25)
    f = ScalarField.on_omega(g, 1.0)
    config = SolverConfig(tol_primal=1e-8, tol_gap=1e-7, step_ratio=4.0)
    res = delta_sweep(f, [0.25, 0.15], config)
    for line, row in zip(lines[1:], res.rows):
        cells = line.split(",")
        assert float(cells[1]) == row["d_star"]
        assert float(cells[2]) == row["p_star_antisym"]


def test_dualnorm_example_outputs(tmp_path):
    code = run(["dualnorm-example", "--grid", "8,16", "--antisym", "both",
                "--out", str(tmp_path), "--tol-gap", "1e-6"])
    assert code == 0
    lines = (tmp_path / "results.csv").read_text().splitlines()
    assert lines[0] == "N,free_value,antisym_value,gap,iters_antisym"
    assert len(lines) == 3
    for n in (8, 16):
        mat = np.loadtxt(tmp_path / f"dualnorm_qantisym_N{n}.csv",
                         delimiter=",")
        assert mat.shape == (n, n)
        assert np.max(np.abs(mat + mat.T)) <= 1e-12
        free = np.loadtxt(tmp_path / f"dualnorm_qfree_N{n}.csv",
                          delimiter=",")
        assert free.shape == (n, n)


def test_design_gamma_command(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "dimension": 1, "cells_per_side": 12, "delta": 0.25,
        "source": {"type": "CONSTANT", "payload": 1.0},
        "budget": {"gamma": 0.1, "kappa_bar": 1.0},
        "solver": {"seed": 0},
    }))
    code = run(["design-gamma", "--config", str(cfg), "--out", str(tmp_path)])
    assert code == 0
    lines = (tmp_path / "results.csv").read_text().splitlines()
    assert lines[0] == "gamma,p_hat,lower_cert,upper_cert"
    row = lines[1].split(",")
    assert float(row[2]) <= float(row[1]) <= float(row[3]) + 1e-9


def test_cell_values_source(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "dimension": 1, "cells_per_side": 8, "delta": 0.3,
        "source": {"type": "CELL_VALUES",
                   "payload": [1, 1, 0, 0, 0, 0, -1, -1]},
    }))
    code = run(["solve-bp", "--config", str(cfg), "--out", str(tmp_path)])
    assert code == 0
