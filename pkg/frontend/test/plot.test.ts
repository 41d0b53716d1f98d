import { execFileSync } from "node:child_process";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { SchemaError, readTable } from "../src/csv.js";
import { renderDualnormFigures } from "../src/plot.js";

let csvDir: string;
const cleanup: string[] = [];

beforeAll(() => {
  csvDir = fs.mkdtempSync(path.join(os.tmpdir(), "nlflux-plot-"));
  cleanup.push(csvDir);
  execFileSync("python3",
               ["-m", "nlflux.cli", "dualnorm-example", "--grid", "8,16",
                "--antisym", "both", "--tol-gap", "1e-6", "--out", csvDir],
               { stdio: ["ignore", "pipe", "pipe"] });
}, 120_000);

afterAll(() => {
  for (const dir of cleanup) fs.rmSync(dir, { recursive: true, force: true });
});

describe("figure rendering", () => {
  it("renders all four panels as PNG files", () => {
    const outDir = path.join(csvDir, "figures");
    const result = renderDualnormFigures(csvDir, outDir);
    expect(result.files.length).toBe(4);
    for (const file of result.files) {
      const bytes = fs.readFileSync(file);
      expect(bytes.length).toBeGreaterThan(200);
      // PNG signature
      expect(Array.from(bytes.subarray(0, 4))).toEqual([137, 80, 78, 71]);
    }
  });

  it("checks the antisymmetric solution matrix to 1e-12", () => {
    const result = renderDualnormFigures(csvDir,
                                         path.join(csvDir, "figures2"));
    expect(result.antisymmetryDefect).toBeLessThanOrEqual(1e-12);
  });

  it("rejects a schema mismatch", () => {
    const bad = fs.mkdtempSync(path.join(os.tmpdir(), "nlflux-bad-"));
    cleanup.push(bad);
    fs.writeFileSync(path.join(bad, "results.csv"),
                     "N,free_value,wrong,gap,iters_antisym\n8,1,2,3,4\n");
    expect(() => renderDualnormFigures(bad, path.join(bad, "figs")))
      .toThrow(SchemaError);
    expect(fs.existsSync(path.join(bad, "figs", "fig1a_suprema.png")))
      .toBe(false);
  });

  it("rejects an empty CSV without producing images", () => {
    const empty = fs.mkdtempSync(path.join(os.tmpdir(), "nlflux-empty-"));
    cleanup.push(empty);
    fs.writeFileSync(path.join(empty, "results.csv"), "");
    expect(() => renderDualnormFigures(empty, path.join(empty, "figs")))
      .toThrow(SchemaError);
    expect(fs.existsSync(path.join(empty, "figs", "fig1a_suprema.png")))
      .toBe(false);
  });

  it("rejects a corrupted antisymmetric matrix", () => {
    const dir = fs.mkdtempSync(path.join(os.tmpdir(), "nlflux-broken-"));
    cleanup.push(dir);
    for (const f of fs.readdirSync(csvDir)) {
      if (f.endsWith(".csv")) {
        fs.copyFileSync(path.join(csvDir, f), path.join(dir, f));
      }
    }
    const matFile = path.join(dir, "dualnorm_qantisym_N16.csv");
    const rows = fs.readFileSync(matFile, "utf8").trim().split("\n")
      .map((l) => l.split(",").map(Number));
    rows[0][1] += 1e-6; // break antisymmetry
    fs.writeFileSync(matFile,
                     rows.map((r) => r.join(",")).join("\n") + "\n");
    expect(() => renderDualnormFigures(dir, path.join(dir, "figs")))
      .toThrow(/antisymmetry/);
  });

  it("validates the summary schema it reads", () => {
    const table = readTable(path.join(csvDir, "results.csv"),
                            ["N", "free_value", "antisym_value", "gap",
                             "iters_antisym"]);
    expect(table.rows.length).toBe(2);
    expect(table.rows[0][0]).toBe(8);
  });
});
