/** RFC-4180-style CSV reading with fixed-schema validation. */

import * as fs from "node:fs";

export class SchemaError extends Error {}

export interface Table {
  header: string[];
  rows: number[][];
}

export function readCsv(path: string): string[][] {
  const text = fs.readFileSync(path, "utf8");
  const lines = text.split("\n").filter((l) => l.length > 0);
  return lines.map((l) => l.split(","));
}

/** Read a headered numeric table and check the exact column schema. */
export function readTable(path: string, expected: string[]): Table {
  const cells = readCsv(path);
  if (cells.length === 0) {
    throw new SchemaError(`${path}: empty CSV`);
  }
  const header = cells[0];
  if (header.length !== expected.length
      || header.some((c, i) => c !== expected[i])) {
    throw new SchemaError(
      `${path}: header [${header.join(",")}] does not match `
      + `[${expected.join(",")}]`);
  }
  if (cells.length === 1) {
    throw new SchemaError(`${path}: no data rows`);
  }
  const rows = cells.slice(1).map((cols, r) => {
    if (cols.length !== expected.length) {
      throw new SchemaError(`${path}: row ${r + 1} has ${cols.length} cells`);
    }
    return cols.map((c) => {
      const v = Number(c);
      if (!Number.isFinite(v)) {
        if (c === "True") return 1;
        if (c === "False") return 0;
        throw new SchemaError(`${path}: non-numeric cell '${c}'`);
      }
      return v;
    });
  });
  return { header, rows };
}

/** Read a bare numeric matrix (no header). */
export function readMatrix(path: string): number[][] {
  const cells = readCsv(path);
  if (cells.length === 0) throw new SchemaError(`${path}: empty CSV`);
  const width = cells[0].length;
  return cells.map((cols, r) => {
    if (cols.length !== width) {
      throw new SchemaError(`${path}: ragged row ${r}`);
    }
    return cols.map((c) => {
      const v = Number(c);
      if (!Number.isFinite(v)) {
        throw new SchemaError(`${path}: non-numeric cell '${c}'`);
      }
      return v;
    });
  });
}
