"""Experiment runner: every solver and sweep behind one command-line tool.

Each subcommand writes ``report.json`` (the full resolved configuration
plus solve reports) and ``results.csv`` with a fixed column schema into
the output directory.  Exit codes: 0 success, 2 configuration error,
3 non-convergence, 4 certificate violation.  All failures also print a
single diagnostic line on stderr.
"""

import argparse
import csv
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from .design import (DesignBudget, delta_sweep, local_reference_1d,
                     solve_design_gamma)
from .fields import ScalarField, Symmetry, TwoPointField
from .geometry import (ConfigurationError, build_full_interaction_grid,
                       build_grid, build_kernel)
from .operators import (NumericalError, nonlocal_divergence,
                        nonlocal_gradient, pair_inner, omega_inner)
from .solvers import (SolverConfig, _dual_norm_antisym_impl, dual_norm_free,
                      free_norm_maximizer, solve_basis_pursuit,
                      solve_dual_temperature, solve_tikhonov)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NO_CONVERGENCE = 3
EXIT_CERTIFICATE = 4

_SOLVER_KEYS = {"max_iters", "tol_primal", "tol_gap", "step_ratio",
                "over_relaxation", "seed"}
_CONFIG_KEYS = {"dimension", "cells_per_side", "delta", "kernel_profile",
                "source", "budget", "solver", "output_dir", "antisym",
                "beta_values", "gamma_values", "delta_values", "grid_sizes",
                "trials"}


class CliConfigError(ValueError):
    pass


def _fmt(x):
    return format(float(x), ".17g")


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([c if isinstance(c, str) else _fmt(c)
                             if isinstance(c, float) else str(c)
                             for c in row])


def _write_matrix_csv(path, matrix):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        for row in matrix:
            writer.writerow([_fmt(v) for v in row])


def _load_config(args):
    cfg = {}
    if args.config:
        with open(args.config) as fh:
            cfg = json.load(fh)
        unknown = set(cfg) - _CONFIG_KEYS
        if unknown:
            raise CliConfigError(f"unknown config fields: {sorted(unknown)}")
        if "solver" in cfg:
            bad = set(cfg["solver"]) - _SOLVER_KEYS
            if bad:
                raise CliConfigError(f"unknown solver fields: {sorted(bad)}")

    def pick(flag, key, default=None):
        if flag is not None:
            return flag
        return cfg.get(key, default)

    resolved = {
        "dimension": int(pick(args.dim, "dimension", 1)),
        "cells_per_side": int(pick(args.grid, "cells_per_side", 16)),
        "delta": float(pick(args.delta, "delta", 0.25)),
        "kernel_profile": str(cfg.get("kernel_profile", "constant")),
        "source": cfg.get("source", {"type": "CONSTANT", "payload": 1.0}),
        "output_dir": str(pick(args.out, "output_dir", ".")),
    }
    if args.source_const is not None:
        resolved["source"] = {"type": "CONSTANT",
                              "payload": float(args.source_const)}
    solver = dict(cfg.get("solver", {}))
    for key, flag in (("max_iters", args.max_iters),
                      ("tol_primal", args.tol_primal),
                      ("tol_gap", args.tol_gap),
                      ("step_ratio", args.step_ratio),
                      ("over_relaxation", args.theta),
                      ("seed", args.seed)):
        if flag is not None:
            solver[key] = flag
    resolved["solver"] = dataclasses.asdict(SolverConfig(**solver))
    for key in ("budget", "antisym", "beta_values", "gamma_values",
                "delta_values", "grid_sizes", "trials"):
        if key in cfg:
            resolved[key] = cfg[key]
    if resolved["kernel_profile"] != "constant":
        raise CliConfigError(
            f"unsupported kernel profile {resolved['kernel_profile']!r}")
    return resolved


def _build_problem(resolved):
    grid = build_grid(resolved["dimension"], resolved["cells_per_side"],
                      resolved["delta"])
    kernel = build_kernel(grid)
    src = resolved["source"]
    kind = src.get("type", "CONSTANT")
    if kind == "CONSTANT":
        f = ScalarField.on_omega(grid, float(src.get("payload", 1.0)))
    elif kind == "CELL_VALUES":
        f = ScalarField.on_omega(grid, np.asarray(src["payload"], dtype=float))
    else:
        raise CliConfigError(f"unknown source type {kind!r}")
    return grid, kernel, f


def _report(out_dir, resolved, payload):
    data = {"config": resolved}
    data.update(payload)
    with open(Path(out_dir) / "report.json", "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _report_dict(rep):
    return dataclasses.asdict(rep)


# ---------------------------------------------------------------------------
# subcommands


def _cmd_adjoint_check(resolved):
    grid, kernel, _ = _build_problem(resolved)
    rng = np.random.default_rng(resolved["solver"]["seed"])
    trials = int(resolved.get("trials", 100))
    worst = 0.0
    rows = []
    for t in range(trials):
        u = ScalarField.on_omega(grid, rng.standard_normal(grid.n_omega))
        q = TwoPointField(grid, rng.standard_normal(grid.n_pairs))
        gv = nonlocal_gradient(u, kernel)
        dq = nonlocal_divergence(q, kernel)
        lhs = omega_inner(grid, dq.values, u.values)
        rhs = -pair_inner(grid, q.values, gv.values)
        denom = (np.sqrt(pair_inner(grid, q.values, q.values))
                 * np.sqrt(pair_inner(grid, gv.values, gv.values)) + 1.0)
        resid = abs(lhs - rhs) / denom
        worst = max(worst, resid)
        rows.append((t, resid))
    out = Path(resolved["output_dir"])
    _write_csv(out / "results.csv", ["trial", "residual"], rows)
    _report(out, resolved, {"max_residual": worst, "trials": trials})
    print(f"max adjointness residual: {worst:.3e}")
    return EXIT_OK if worst <= 1e-12 else EXIT_CERTIFICATE


def _cmd_solve_bp(resolved):
    grid, kernel, f = _build_problem(resolved)
    antisym = bool(resolved.get("antisym", True))
    config = SolverConfig(**resolved["solver"])
    q, rep = solve_basis_pursuit(f, kernel, antisym, config)
    out = Path(resolved["output_dir"])
    _write_csv(out / "results.csv",
               ["value", "dual_value", "gap", "primal_residual",
                "iterations", "converged"],
               [(rep.optimal_value, rep.dual_value, rep.gap,
                 rep.primal_residual, rep.iterations, rep.converged)])
    _report(out, resolved, {"report": _report_dict(rep),
                            "antisymmetric": antisym})
    return EXIT_OK if rep.converged else EXIT_NO_CONVERGENCE


def _cmd_solve_dual(resolved):
    grid, kernel, f = _build_problem(resolved)
    config = SolverConfig(**resolved["solver"])
    u, rep = solve_dual_temperature(f, kernel, config)
    out = Path(resolved["output_dir"])
    _write_csv(out / "results.csv",
               ["value", "dual_value", "gap", "primal_residual",
                "iterations", "converged"],
               [(rep.optimal_value, rep.dual_value, rep.gap,
                 rep.primal_residual, rep.iterations, rep.converged)])
    _report(out, resolved, {"report": _report_dict(rep)})
    return EXIT_OK if rep.converged else EXIT_NO_CONVERGENCE


def _cmd_sweep_beta(resolved):
    grid, kernel, f = _build_problem(resolved)
    config = SolverConfig(**resolved["solver"])
    betas = [float(b) for b in resolved.get("beta_values",
                                            (1e-1, 1e-2, 1e-3, 1e-4))]
    rows = []
    reports = {}
    all_converged = True
    for beta in betas:
        q, rep = solve_tikhonov(f, kernel, beta, config)
        rows.append((beta, rep.optimal_value, rep.breakdown["norm_12"],
                     rep.breakdown["half_beta_norm2_sq"], rep.gap))
        reports[f"beta={beta:g}"] = _report_dict(rep)
        all_converged = all_converged and rep.converged
    out = Path(resolved["output_dir"])
    _write_csv(out / "results.csv",
               ["beta", "p_beta", "norm12", "half_beta_norm2sq", "gap"], rows)
    _report(out, resolved, {"reports": reports})
    if not all_converged:
        return EXIT_NO_CONVERGENCE
    # certificate: p_beta must be nonincreasing as beta decreases
    values = [row[1] for row in rows]
    if any(v2 > v1 + 1e-9 for v1, v2 in zip(values, values[1:])):
        print("sweep-beta: regularized values are not monotone",
              file=sys.stderr)
        return EXIT_CERTIFICATE
    return EXIT_OK


def _cmd_sweep_gamma(resolved):
    grid, kernel, f = _build_problem(resolved)
    config = SolverConfig(**resolved["solver"])
    budget_cfg = resolved.get("budget", {})
    kappa_bar = float(budget_cfg.get("kappa_bar", 1.0))
    gammas = [float(g) for g in resolved.get("gamma_values", (0.5, 0.1, 0.02))]
    rows = []
    reports = {}
    all_converged = True
    cert_ok = True
    for gamma in gammas:
        budget = DesignBudget(gamma=gamma, kappa_bar=kappa_bar)
        q, kappa, rep = solve_design_gamma(f, kernel, budget, config)
        lo = rep.breakdown["lower_certificate"]
        up = rep.breakdown["upper_certificate"]
        rows.append((gamma, rep.optimal_value, lo, up))
        reports[f"gamma={gamma:g}"] = _report_dict(rep)
        all_converged = all_converged and rep.converged
        slack = 10.0 * config.tol_gap * max(1.0, up)
        cert_ok = cert_ok and (lo <= rep.optimal_value + slack
                               and rep.optimal_value <= up + slack)
    out = Path(resolved["output_dir"])
    _write_csv(out / "results.csv",
               ["gamma", "p_hat", "lower_cert", "upper_cert"], rows)
    _report(out, resolved, {"reports": reports})
    if not cert_ok:
        print("sweep-gamma: sandwich certificate violated", file=sys.stderr)
        return EXIT_CERTIFICATE
    return EXIT_OK if all_converged else EXIT_NO_CONVERGENCE


def _cmd_sweep_delta(resolved):
    grid, kernel, f = _build_problem(resolved)
    config = SolverConfig(**resolved["solver"])
    deltas = [float(d) for d in resolved.get("delta_values", (0.2, 0.1, 0.05))]
    result = delta_sweep(f, deltas, config)
    rows = [(row["delta"], row["d_star"], row["p_star_antisym"],
             row["local_ref"]) for row in result.rows]
    out = Path(resolved["output_dir"])
    _write_csv(out / "results.csv",
               ["delta", "d_star", "p_star_antisym", "local_ref"], rows)
    _report(out, resolved, {"rows": result.rows,
                            "dual_trend_monotone": result.dual_trend_monotone})
    if not all(row["converged"] for row in result.rows):
        return EXIT_NO_CONVERGENCE
    if not result.dual_trend_monotone:
        print("sweep-delta: dual values do not trend toward the local "
              "reference", file=sys.stderr)
        return EXIT_CERTIFICATE
    return EXIT_OK


def _dualnorm_field(grid):
    return TwoPointField.from_function(
        grid, lambda x, xp: -np.sin(np.pi * x) + np.sin(np.pi * xp),
        Symmetry.ANTISYMMETRIC)


def _pair_matrix(grid, values):
    n = grid.n_omega
    mat = np.zeros((n, n))
    mat[grid.pair_i, grid.pair_j] = values
    return mat


def _cmd_dualnorm_example(resolved):
    config = SolverConfig(**resolved["solver"])
    sizes = [int(n) for n in resolved.get("grid_sizes",
                                          [resolved["cells_per_side"]])]
    which = str(resolved.get("antisym", "both"))
    out = Path(resolved["output_dir"])
    rows = []
    info = {}
    for n in sizes:
        grid = build_full_interaction_grid(1, n)
        p = _dualnorm_field(grid)
        free_value = dual_norm_free(p)
        antisym_value, q_a, iters = _dual_norm_antisym_impl(p, config)
        rows.append((n, free_value, antisym_value,
                     free_value - antisym_value, iters))
        info[f"N={n}"] = {"free_value": free_value,
                          "antisym_value": antisym_value,
                          "iterations_antisym": iters}
        if which in ("both", "off"):
            q_free = free_norm_maximizer(p)
            _write_matrix_csv(out / f"dualnorm_qfree_N{n}.csv",
                              _pair_matrix(grid, q_free.values))
        if which in ("both", "on"):
            _write_matrix_csv(out / f"dualnorm_qantisym_N{n}.csv",
                              _pair_matrix(grid, q_a.values))
    _write_csv(out / "results.csv",
               ["N", "free_value", "antisym_value", "gap", "iters_antisym"],
               rows)
    _report(out, resolved, {"values": info})
    return EXIT_OK


def _cmd_design_gamma(resolved):
    grid, kernel, f = _build_problem(resolved)
    config = SolverConfig(**resolved["solver"])
    budget_cfg = resolved.get("budget", {})
    budget = DesignBudget(gamma=float(budget_cfg.get("gamma", 0.1)),
                          kappa_bar=float(budget_cfg.get("kappa_bar", 1.0)))
    q, kappa, rep = solve_design_gamma(f, kernel, budget, config)
    lo = rep.breakdown["lower_certificate"]
    up = rep.breakdown["upper_certificate"]
    out = Path(resolved["output_dir"])
    _write_csv(out / "results.csv",
               ["gamma", "p_hat", "lower_cert", "upper_cert"],
               [(budget.gamma, rep.optimal_value, lo, up)])
    _report(out, resolved, {"report": _report_dict(rep)})
    slack = 10.0 * config.tol_gap * max(1.0, up)
    if not (lo <= rep.optimal_value + slack
            and rep.optimal_value <= up + slack):
        print("design-gamma: sandwich certificate violated", file=sys.stderr)
        return EXIT_CERTIFICATE
    return EXIT_OK if rep.converged else EXIT_NO_CONVERGENCE


_COMMANDS = {
    "adjoint-check": _cmd_adjoint_check,
    "solve-bp": _cmd_solve_bp,
    "solve-dual": _cmd_solve_dual,
    "sweep-beta": _cmd_sweep_beta,
    "sweep-gamma": _cmd_sweep_gamma,
    "sweep-delta": _cmd_sweep_delta,
    "dualnorm-example": _cmd_dualnorm_example,
    "design-gamma": _cmd_design_gamma,
}


def _parser():
    parser = argparse.ArgumentParser(
        prog="nlflux",
        description="nonlocal sparse-flux experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", default=None,
                       help="JSON experiment configuration")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--dim", type=int, default=None)
        p.add_argument("--grid", default=None,
                       help="cells per side (comma list for dualnorm-example)")
        p.add_argument("--delta", type=float, default=None)
        p.add_argument("--source-const", type=float, default=None,
                       help="constant heat source value")
        p.add_argument("--max-iters", type=int, default=None)
        p.add_argument("--tol-primal", type=float, default=None)
        p.add_argument("--tol-gap", type=float, default=None)
        p.add_argument("--step-ratio", type=float, default=None)
        p.add_argument("--theta", type=float, default=None)
        p.add_argument("--antisym", default=None,
                       help="on/off/both depending on the subcommand")
        p.add_argument("--beta-values", default=None,
                       help="comma-separated regularization weights")
        p.add_argument("--gamma-values", default=None,
                       help="comma-separated material fractions")
        p.add_argument("--delta-values", default=None,
                       help="comma-separated horizons")
        p.add_argument("--kappa-bar", type=float, default=None)
        p.add_argument("--trials", type=int, default=None)
    return parser


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        grid_sizes = None
        if args.grid is not None and "," in str(args.grid):
            grid_sizes = [int(x) for x in str(args.grid).split(",")]
            args.grid = grid_sizes[0]
        elif args.grid is not None:
            args.grid = int(args.grid)
        resolved = _load_config(args)
        if grid_sizes and args.command == "dualnorm-example":
            resolved["grid_sizes"] = grid_sizes
        elif args.command == "dualnorm-example" and "grid_sizes" not in resolved:
            resolved["grid_sizes"] = [resolved["cells_per_side"]]
        if args.antisym is not None:
            if args.command in ("solve-bp",):
                resolved["antisym"] = args.antisym not in ("off", "false", "0")
            else:
                resolved["antisym"] = args.antisym
        if args.beta_values:
            resolved["beta_values"] = [float(x)
                                       for x in args.beta_values.split(",")]
        if args.gamma_values:
            resolved["gamma_values"] = [float(x)
                                        for x in args.gamma_values.split(",")]
        if args.delta_values:
            resolved["delta_values"] = [float(x)
                                        for x in args.delta_values.split(",")]
        if args.kappa_bar is not None:
            resolved.setdefault("budget", {})["kappa_bar"] = args.kappa_bar
        if args.trials is not None:
            resolved["trials"] = args.trials
        Path(resolved["output_dir"]).mkdir(parents=True, exist_ok=True)
    except (CliConfigError, ConfigurationError, ValueError, OSError,
            json.JSONDecodeError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        return _COMMANDS[args.command](resolved)
    except (CliConfigError, ConfigurationError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"certificate violation: {exc}", file=sys.stderr)
        return EXIT_CERTIFICATE


if __name__ == "__main__":
    sys.exit(main())
