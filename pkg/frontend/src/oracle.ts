/**
 * Fixture minting: run the interior-point reference solves and write
 * the JSON fixtures consumed (as frozen files) by the primary test
 * suite.  Case names and the JSON schema are fixed:
 * {case, inputs, value, tolerance, minted_at}.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { basisPursuitModel, buildGrid1d, dualNormModel, freeDualNormDirect,
         sineField, tikhonovModel } from "./problems.js";
import { solveSocp } from "./socp.js";

export interface Fixture {
  case: string;
  inputs: Record<string, unknown>;
  value: number | Record<string, number>;
  tolerance: number;
  minted_at: string;
}

export class OracleError extends Error {}

const SOLVE_OPTS = { tol: 1e-7, maxIters: 100 };

function solveOrThrow(describe: string, model: { problem: any }): number {
  const sol = solveSocp(model.problem, SOLVE_OPTS);
  if (sol.status !== "optimal") {
    throw new OracleError(`reference solve did not reach optimality `
      + `(${describe}): gap ${sol.gap}`);
  }
  return sol.pobj;
}

export function mintCase(name: string): Fixture {
  const minted = new Date().toISOString().slice(0, 10);
  if (name === "bp-1d-16" || name === "bp-antisym-1d-16") {
    const antisym = name === "bp-antisym-1d-16";
    const grid = buildGrid1d(16, 0.25);
    const model = basisPursuitModel(grid, 1.0, antisym);
    const value = solveOrThrow(model.describe, model);
    return {
      case: name,
      inputs: { dimension: 1, cells_per_side: 16, delta: 0.25,
                source_const: 1.0, antisymmetric: antisym },
      value, tolerance: 1e-5, minted_at: minted,
    };
  }
  const dualFree = name.match(/^dualnorm-free-(\d+)$/);
  if (dualFree) {
    const n = parseInt(dualFree[1], 10);
    const grid = buildGrid1d(n, 0.5, true);
    const value = freeDualNormDirect(grid, sineField(grid));
    return {
      case: name,
      inputs: { dimension: 1, cells_per_side: n, full_interaction: true,
                field: "-sin(pi x) + sin(pi x')", antisymmetric: false },
      value, tolerance: 1e-7, minted_at: minted,
    };
  }
  const dualAnti = name.match(/^dualnorm-antisym-(\d+)$/);
  if (dualAnti) {
    const n = parseInt(dualAnti[1], 10);
    const grid = buildGrid1d(n, 0.5, true);
    const model = dualNormModel(grid, sineField(grid), true);
    const value = -solveOrThrow(model.describe, model); // max -> min sign
    return {
      case: name,
      inputs: { dimension: 1, cells_per_side: n, full_interaction: true,
                field: "-sin(pi x) + sin(pi x')", antisymmetric: true },
      value, tolerance: 1e-5, minted_at: minted,
    };
  }
  if (name === "tikhonov-1d-16") {
    const grid = buildGrid1d(16, 0.25);
    const betas = [1e-1, 1e-2, 1e-3, 1e-4];
    const value: Record<string, number> = {};
    for (const beta of betas) {
      const model = tikhonovModel(grid, 1.0, beta);
      value[beta.toString()] = solveOrThrow(model.describe, model);
    }
    return {
      case: name,
      inputs: { dimension: 1, cells_per_side: 16, delta: 0.25,
                source_const: 1.0, antisymmetric: true,
                beta_values: betas },
      value, tolerance: 1e-5, minted_at: minted,
    };
  }
  throw new OracleError(`unknown oracle case ${name}`);
}

export const ALL_CASES = [
  "bp-1d-16", "bp-antisym-1d-16",
  "dualnorm-free-8", "dualnorm-free-16", "dualnorm-free-32",
  "dualnorm-antisym-8", "dualnorm-antisym-16", "dualnorm-antisym-32",
  "tikhonov-1d-16",
];

export function mintAll(outDir: string): Fixture[] {
  fs.mkdirSync(outDir, { recursive: true });
  const out: Fixture[] = [];
  for (const name of ALL_CASES) {
    const fixture = mintCase(name);
    const file = path.join(outDir, `${name}.json`);
    fs.writeFileSync(file, JSON.stringify(fixture, null, 2) + "\n");
    out.push(fixture);
  }
  return out;
}
