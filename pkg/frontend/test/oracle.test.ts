import { execFileSync } from "node:child_process";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";
import { afterAll, describe, expect, it } from "vitest";

import { ALL_CASES, mintCase } from "../src/oracle.js";

const FIXTURES = path.resolve(__dirname, "..", "..", "fixtures");

function committed(name: string) {
  return JSON.parse(fs.readFileSync(path.join(FIXTURES, `${name}.json`),
                                    "utf8"));
}

const tmpDirs: string[] = [];

function tmpDir(): string {
  const dir = fs.mkdtempSync(path.join(os.tmpdir(), "nlflux-oracle-"));
  tmpDirs.push(dir);
  return dir;
}

afterAll(() => {
  for (const dir of tmpDirs) fs.rmSync(dir, { recursive: true, force: true });
});

function runPrimary(args: string[], outDir: string): string {
  execFileSync("python3", ["-m", "nlflux.cli", ...args, "--out", outDir],
               { stdio: ["ignore", "pipe", "pipe"] });
  return fs.readFileSync(path.join(outDir, "results.csv"), "utf8");
}

describe("fixture minting", () => {
  it("reproduces every committed fixture within its stored tolerance",
     () => {
    for (const name of ALL_CASES) {
      const fresh = mintCase(name);
      const stored = committed(name);
      if (typeof fresh.value === "number") {
        expect(Math.abs(fresh.value - stored.value))
          .toBeLessThanOrEqual(stored.tolerance);
      } else {
        for (const [key, v] of Object.entries(fresh.value)) {
          expect(Math.abs(v - stored.value[key]))
            .toBeLessThanOrEqual(stored.tolerance);
        }
      }
    }
  }, 120_000);

  it("rejects unknown cases", () => {
    expect(() => mintCase("bp-77d")).toThrow(/unknown oracle case/);
  });
});

describe("agreement with the primary solver (through its CLI)", () => {
  it("basis pursuit values match the fixtures", () => {
    for (const [name, flag] of [["bp-1d-16", "off"],
                                ["bp-antisym-1d-16", "on"]] as const) {
      const stored = committed(name);
      const csv = runPrimary(
        ["solve-bp", "--dim", "1", "--grid", "16", "--delta", "0.25",
         "--antisym", flag], tmpDir());
      const value = Number(csv.split("\n")[1].split(",")[0]);
      expect(Math.abs(value - stored.value))
        .toBeLessThanOrEqual(Math.max(stored.tolerance, 1e-3 * stored.value));
    }
  }, 120_000);

  it("tikhonov sweep values match the fixture grid", () => {
    const stored = committed("tikhonov-1d-16");
    const csv = runPrimary(
      ["sweep-beta", "--dim", "1", "--grid", "16", "--delta", "0.25"],
      tmpDir());
    const lines = csv.trim().split("\n").slice(1);
    expect(lines.length).toBe(4);
    for (const line of lines) {
      const [beta, pBeta] = line.split(",").map(Number);
      const target = stored.value[beta.toString()];
      expect(target).toBeDefined();
      expect(Math.abs(pBeta - target))
        .toBeLessThanOrEqual(Math.max(stored.tolerance, 1e-3 * target));
    }
  }, 120_000);

  it("dual-norm values match the fixtures", () => {
    const csv = runPrimary(
      ["dualnorm-example", "--grid", "8,16", "--antisym", "both",
       "--tol-gap", "1e-6"], tmpDir());
    const lines = csv.trim().split("\n").slice(1);
    for (const line of lines) {
      const [n, free, anti] = line.split(",").map(Number);
      const freeStored = committed(`dualnorm-free-${n}`);
      const antiStored = committed(`dualnorm-antisym-${n}`);
      expect(Math.abs(free - freeStored.value))
        .toBeLessThanOrEqual(freeStored.tolerance);
      expect(Math.abs(anti - antiStored.value))
        .toBeLessThanOrEqual(Math.max(antiStored.tolerance, 1e-4));
    }
  }, 120_000);
});
