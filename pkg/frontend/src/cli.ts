/**
 * Frontend entry point.
 *
 *   node dist/cli.js mint [--out DIR]          re-mint all oracle fixtures
 *   node dist/cli.js plot --csv DIR [--out DIR]  render Fig-1-style panels
 */

import * as path from "node:path";
import * as process from "node:process";

import { mintAll } from "./oracle.js";
import { renderDualnormFigures } from "./plot.js";
import { SchemaError } from "./csv.js";

function arg(name: string, fallback?: string): string | undefined {
  const at = process.argv.indexOf(`--${name}`);
  if (at >= 0 && at + 1 < process.argv.length) return process.argv[at + 1];
  return fallback;
}

function main(): number {
  const command = process.argv[2];
  if (command === "mint") {
    const out = arg("out", path.join("..", "fixtures"))!;
    const fixtures = mintAll(out);
    for (const f of fixtures) {
      const v = typeof f.value === "number"
        ? f.value.toPrecision(12)
        : JSON.stringify(f.value);
      console.log(`${f.case}: ${v}`);
    }
    return 0;
  }
  if (command === "plot") {
    const csvDir = arg("csv");
    if (!csvDir) {
      console.error("plot: --csv DIR is required");
      return 2;
    }
    const out = arg("out", path.join(csvDir, "figures"))!;
    try {
      const result = renderDualnormFigures(csvDir, out);
      for (const f of result.files) console.log(f);
      return 0;
    } catch (err) {
      if (err instanceof SchemaError) {
        console.error(`plot: ${err.message}`);
        return 2;
      }
      throw err;
    }
  }
  console.error("usage: cli.js mint [--out DIR] | plot --csv DIR [--out DIR]");
  return 2;
}

process.exit(main());
