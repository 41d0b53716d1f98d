/**
 * Figure renderer for the dual-norm experiment artifacts.
 *
 * Four PNG panels from the CLI's CSV output: (a) both suprema against
 * the cell size, (b) discrepancy of the free value from the analytic
 * 2^{-1/2} against the cell size, (c)/(d) heatmaps of the maximizing
 * flux without and with the antisymmetry requirement.
 */

import * as fs from "node:fs";
import * as path from "node:path";
import { PNG } from "pngjs";

import { SchemaError, readMatrix, readTable } from "./csv.js";

const DUALNORM_SCHEMA = ["N", "free_value", "antisym_value", "gap",
                         "iters_antisym"];

// 5x7 bitmap glyphs for axis annotations
const FONT: Record<string, number[]> = {
  "0": [0x0e, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0e],
  "1": [0x04, 0x0c, 0x04, 0x04, 0x04, 0x04, 0x0e],
  "2": [0x0e, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1f],
  "3": [0x1f, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0e],
  "4": [0x02, 0x06, 0x0a, 0x12, 0x1f, 0x02, 0x02],
  "5": [0x1f, 0x10, 0x1e, 0x01, 0x01, 0x11, 0x0e],
  "6": [0x06, 0x08, 0x10, 0x1e, 0x11, 0x11, 0x0e],
  "7": [0x1f, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08],
  "8": [0x0e, 0x11, 0x11, 0x0e, 0x11, 0x11, 0x0e],
  "9": [0x0e, 0x11, 0x11, 0x0f, 0x01, 0x02, 0x0c],
  ".": [0x00, 0x00, 0x00, 0x00, 0x00, 0x0c, 0x0c],
  "-": [0x00, 0x00, 0x00, 0x1f, 0x00, 0x00, 0x00],
  "/": [0x01, 0x01, 0x02, 0x04, 0x08, 0x10, 0x10],
  "N": [0x11, 0x19, 0x19, 0x15, 0x13, 0x13, 0x11],
  "h": [0x10, 0x10, 0x16, 0x19, 0x11, 0x11, 0x11],
  "=": [0x00, 0x00, 0x1f, 0x00, 0x1f, 0x00, 0x00],
  " ": [0, 0, 0, 0, 0, 0, 0],
};

class Canvas {
  png: PNG;

  constructor(readonly width: number, readonly height: number) {
    this.png = new PNG({ width, height });
    this.png.data.fill(255);
  }

  pixel(x: number, y: number, r: number, g: number, b: number): void {
    if (x < 0 || y < 0 || x >= this.width || y >= this.height) return;
    const at = (Math.round(y) * this.width + Math.round(x)) * 4;
    this.png.data[at] = r;
    this.png.data[at + 1] = g;
    this.png.data[at + 2] = b;
    this.png.data[at + 3] = 255;
  }

  line(x0: number, y0: number, x1: number, y1: number,
       rgb: [number, number, number]): void {
    const steps = Math.max(Math.abs(x1 - x0), Math.abs(y1 - y0), 1) * 2;
    for (let t = 0; t <= steps; t++) {
      const x = x0 + ((x1 - x0) * t) / steps;
      const y = y0 + ((y1 - y0) * t) / steps;
      this.pixel(x, y, ...rgb);
      this.pixel(x + 0.5, y, ...rgb);
    }
  }

  disc(x: number, y: number, radius: number,
       rgb: [number, number, number]): void {
    for (let dy = -radius; dy <= radius; dy++) {
      for (let dx = -radius; dx <= radius; dx++) {
        if (dx * dx + dy * dy <= radius * radius) {
          this.pixel(x + dx, y + dy, ...rgb);
        }
      }
    }
  }

  text(x: number, y: number, s: string,
       rgb: [number, number, number] = [40, 40, 40]): void {
    let cx = x;
    for (const ch of s) {
      const glyph = FONT[ch] ?? FONT[" "];
      for (let r = 0; r < 7; r++) {
        for (let c = 0; c < 5; c++) {
          if ((glyph[r] >> (4 - c)) & 1) this.pixel(cx + c, y + r, ...rgb);
        }
      }
      cx += 6;
    }
  }

  write(file: string): void {
    fs.writeFileSync(file, PNG.sync.write(this.png));
  }
}

const BLUE: [number, number, number] = [31, 119, 180];
const ORANGE: [number, number, number] = [255, 127, 14];
const GREY: [number, number, number] = [120, 120, 120];

function linePanel(file: string, xs: number[], series: number[][],
                   colors: [number, number, number][], yLo: number,
                   yHi: number, xLabel: string): void {
  const W = 480;
  const H = 360;
  const L = 56;
  const Rm = 16;
  const T = 16;
  const B = 40;
  const cv = new Canvas(W, H);
  const xLo = Math.min(...xs);
  const xHi = Math.max(...xs);
  const px = (x: number) =>
    L + ((x - xLo) / Math.max(xHi - xLo, 1e-12)) * (W - L - Rm);
  const py = (y: number) =>
    H - B - ((y - yLo) / Math.max(yHi - yLo, 1e-12)) * (H - T - B);
  cv.line(L, H - B, W - Rm, H - B, GREY);
  cv.line(L, T, L, H - B, GREY);
  for (let t = 0; t <= 4; t++) {
    const yv = yLo + ((yHi - yLo) * t) / 4;
    cv.line(L - 3, py(yv), L, py(yv), GREY);
    cv.text(4, py(yv) - 3, yv.toFixed(3));
  }
  xs.forEach((x) => {
    cv.line(px(x), H - B, px(x), H - B + 3, GREY);
    cv.text(px(x) - 12, H - B + 6, x.toFixed(3));
  });
  cv.text(W / 2 - 12, H - 14, xLabel);
  series.forEach((ys, si) => {
    for (let i = 1; i < xs.length; i++) {
      cv.line(px(xs[i - 1]), py(ys[i - 1]), px(xs[i]), py(ys[i]), colors[si]);
    }
    for (let i = 0; i < xs.length; i++) {
      cv.disc(px(xs[i]), py(ys[i]), 3, colors[si]);
    }
  });
  cv.write(file);
}

function divergingColor(v: number): [number, number, number] {
  // blue (-1) .. white (0) .. red (+1)
  const t = Math.max(-1, Math.min(1, v));
  if (t < 0) {
    const a = 1 + t;
    return [Math.round(255 * a), Math.round(255 * a), 255];
  }
  const a = 1 - t;
  return [255, Math.round(255 * a), Math.round(255 * a)];
}

function heatmapPanel(file: string, matrix: number[][]): void {
  const n = matrix.length;
  const cell = Math.max(2, Math.floor(320 / n));
  const L = 24;
  const B = 24;
  const W = L + n * cell + 12;
  const H = n * cell + B + 12;
  const cv = new Canvas(W, H);
  let scale = 0;
  for (const rowVals of matrix) {
    for (const v of rowVals) scale = Math.max(scale, Math.abs(v));
  }
  scale = scale || 1;
  for (let i = 0; i < n; i++) {
    for (let j = 0; j < n; j++) {
      const rgb = divergingColor(matrix[i][j] / scale);
      // x' to the right, x upward, matching the unit-square layout
      const x0 = L + j * cell;
      const y0 = (n - 1 - i) * cell + 8;
      for (let dy = 0; dy < cell; dy++) {
        for (let dx = 0; dx < cell; dx++) cv.pixel(x0 + dx, y0 + dy, ...rgb);
      }
    }
  }
  cv.text(L, H - 16, `N=${n}`);
  cv.write(file);
}

export interface PlotResult {
  files: string[];
  antisymmetryDefect: number;
}

/**
 * Render panels (a)-(d) from a dualnorm-example output directory.
 * The antisymmetric solution matrix is checked for exact antisymmetry
 * before rendering; a violation beyond 1e-12 is a schema-level error.
 */
export function renderDualnormFigures(csvDir: string,
                                      outDir: string): PlotResult {
  fs.mkdirSync(outDir, { recursive: true });
  const table = readTable(path.join(csvDir, "results.csv"), DUALNORM_SCHEMA);
  const ns = table.rows.map((r) => r[0]);
  const cellSizes = ns.map((n) => 1 / n);
  const free = table.rows.map((r) => r[1]);
  const anti = table.rows.map((r) => r[2]);
  const target = Math.SQRT1_2;
  const files: string[] = [];

  const aFile = path.join(outDir, "fig1a_suprema.png");
  const lo = Math.min(...anti, ...free) * 0.95;
  const hi = Math.max(...free, target) * 1.05;
  linePanel(aFile, cellSizes, [free, anti], [BLUE, ORANGE], lo, hi, "h=1/N");
  files.push(aFile);

  const bFile = path.join(outDir, "fig1b_discrepancy.png");
  const disc = free.map((v) => Math.abs(v - target));
  linePanel(bFile, cellSizes, [disc], [BLUE], 0, Math.max(...disc) * 1.1,
            "h=1/N");
  files.push(bFile);

  const largestN = Math.max(...ns);
  let defect = 0;
  for (const [kind, fileName] of [["qfree", "fig1c_qfree.png"],
                                  ["qantisym", "fig1d_qantisym.png"]]) {
    const matPath = path.join(csvDir, `dualnorm_${kind}_N${largestN}.csv`);
    const matrix = readMatrix(matPath);
    if (matrix.length !== largestN || matrix[0].length !== largestN) {
      throw new SchemaError(`${matPath}: expected ${largestN} square matrix`);
    }
    if (kind === "qantisym") {
      for (let i = 0; i < matrix.length; i++) {
        for (let j = 0; j < matrix.length; j++) {
          defect = Math.max(defect, Math.abs(matrix[i][j] + matrix[j][i]));
        }
      }
      if (defect > 1e-12) {
        throw new SchemaError(
          `${matPath}: solution matrix violates antisymmetry (${defect})`);
      }
    }
    const outFile = path.join(outDir, fileName);
    heatmapPanel(outFile, matrix);
    files.push(outFile);
  }
  return { files, antisymmetryDefect: defect };
}
