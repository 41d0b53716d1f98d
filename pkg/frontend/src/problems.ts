/**
 * One-dimensional discretization and conic models for the desk-scale
 * reference cases, written directly from the definitions: midpoint
 * cells on (0,1), collar cells within the horizon, ordered interacting
 * pairs, the normalized constant kernel, and the divergence as the
 * adjoint sum  (D q)_i = h * sum_j (q(j,i) - q(i,j)) * w.
 */

import { SocpProblem, SparseRow } from "./socp.js";

export interface Grid1d {
  n: number;                 // cells across (0,1)
  h: number;
  delta: number;
  centers: Float64Array;     // all cells, collar included, ascending
  omega: Int32Array;         // indices of cells inside (0,1)
  inOmega: boolean[];
  pairI: Int32Array;         // ordered pairs, both orientations
  pairJ: Int32Array;
  mirror: Int32Array;
  amplitude: number;         // normalized constant kernel weight
  fullInteraction: boolean;
}

export function buildGrid1d(n: number, delta: number,
                            fullInteraction = false): Grid1d {
  const h = 1 / n;
  let reach = 0;
  if (!fullInteraction) {
    reach = Math.ceil(delta / h) + 1;
  }
  const centersArr: number[] = [];
  for (let k = -reach; k < n + reach; k++) {
    const c = (k + 0.5) * h;
    const dist = Math.max(0, Math.max(-c, c - 1));
    if (fullInteraction ? dist <= 0 : dist < delta) centersArr.push(c);
  }
  const centers = Float64Array.from(centersArr);
  const total = centers.length;
  const inOmega = Array.from(centers, (c) => c > 0 && c < 1);
  const omega = Int32Array.from(
    centers.map((_, i) => i).filter((i) => inOmega[i]));

  const pi: number[] = [];
  const pj: number[] = [];
  for (let i = 0; i < total; i++) {
    for (let j = i + 1; j < total; j++) {
      const d = Math.abs(centers[i] - centers[j]);
      if (fullInteraction || d < delta) {
        pi.push(i);
        pj.push(j);
      }
    }
  }
  const half = pi.length;
  const pairI = new Int32Array(2 * half);
  const pairJ = new Int32Array(2 * half);
  const mirror = new Int32Array(2 * half);
  for (let k = 0; k < half; k++) {
    pairI[k] = pi[k];
    pairJ[k] = pj[k];
    pairI[half + k] = pj[k];
    pairJ[half + k] = pi[k];
    mirror[k] = half + k;
    mirror[half + k] = k;
  }

  let amplitude = 1;
  if (!fullInteraction) {
    // discrete normalization: sum_z h z^2 w^2 = 1 in one dimension
    let moment = 0;
    for (let k = 1; k * h < delta; k++) moment += 2 * h * (k * h) * (k * h);
    if (moment <= 0) throw new Error("kernel stencil is empty");
    amplitude = Math.sqrt(1 / moment);
  }
  return { n, h, delta, centers, omega, inOmega, pairI, pairJ, mirror,
           amplitude, fullInteraction };
}

function row(cols: number[], vals: number[]): SparseRow {
  return { cols: Int32Array.from(cols), vals: Float64Array.from(vals) };
}

/** Rows of ordered pairs grouped by their outer cell. */
function rowsByOuterCell(grid: Grid1d): number[][] {
  const total = grid.centers.length;
  const rows: number[][] = Array.from({ length: total }, () => []);
  for (let k = 0; k < grid.pairI.length; k++) rows[grid.pairI[k]].push(k);
  return rows;
}

/**
 * Equality rows of the divergence on domain cells.  In the
 * antisymmetric parametrization the unknowns are the first-half pair
 * values (mirrors carry the opposite sign).
 */
function divergenceRows(grid: Grid1d,
                        qIndex: (pairIdx: number) => number,
                        qSign: (pairIdx: number) => number): SparseRow[] {
  const hw = grid.h * grid.amplitude;
  return Array.from(grid.omega, (cell) => {
    const coeff = new Map<number, number>();
    for (let k = 0; k < grid.pairI.length; k++) {
      // (D q)_i collects -h w q(i,j) from outgoing and +h w q(j,i) mirrors
      let c = 0;
      if (grid.pairI[k] === cell) c -= hw;
      if (grid.pairJ[k] === cell) c += hw;
      if (c === 0) continue;
      const idx = qIndex(k);
      if (idx < 0) continue;
      coeff.set(idx, (coeff.get(idx) ?? 0) + c * qSign(k));
    }
    const cols = Array.from(coeff.keys());
    return row(cols, cols.map((c) => coeff.get(c)!));
  });
}

export interface ConicModel {
  problem: SocpProblem;
  describe: string;
}

/**
 * Mixed-norm basis pursuit:  min sum_i h t_i  over D q = f,
 * with per-cell cones  ||sqrt(h) q_row_i|| <= t_i.
 */
export function basisPursuitModel(grid: Grid1d, fConst: number,
                                  antisym: boolean): ConicModel {
  const half = grid.pairI.length / 2;
  const nq = antisym ? half : grid.pairI.length;
  const qIndex = (k: number) => (antisym && k >= half ? k - half : k);
  const qSign = (k: number) => (antisym && k >= half ? -1 : 1);
  const rows = rowsByOuterCell(grid);
  const total = grid.centers.length;
  const n = nq + total; // q (or its antisymmetric half) then t
  const c = new Float64Array(n);
  for (let i = 0; i < total; i++) c[nq + i] = grid.h;

  const aRows = divergenceRows(grid, qIndex, qSign);
  const b = Float64Array.from(grid.omega, () => fConst);

  const gRows: SparseRow[] = [];
  const socDims: number[] = [];
  const sqh = Math.sqrt(grid.h);
  rows.forEach((pairIdxs, i) => {
    gRows.push(row([nq + i], [-1]));
    for (const k of pairIdxs) {
      gRows.push(row([qIndex(k)], [-sqh * qSign(k)]));
    }
    socDims.push(1 + pairIdxs.length);
  });
  const h = new Float64Array(gRows.length);
  const problem: SocpProblem = { n, c, aRows, b, gRows, h, nonneg: 0,
                                 socDims };
  return { problem,
           describe: `basis pursuit, N=${grid.n}, delta=${grid.delta}, `
                     + `antisym=${antisym}` };
}

/**
 * Tikhonov-regularized antisymmetric basis pursuit:
 * min sum h t_i + v  with  v >= beta h^2 ||q_ordered||^2  encoded as
 * the cone ||(1 - v, 2 sqrt(beta) h s)|| <= 1 + v  over half values s.
 */
export function tikhonovModel(grid: Grid1d, fConst: number,
                              beta: number): ConicModel {
  const base = basisPursuitModel(grid, fConst, true);
  const prob = base.problem;
  const half = grid.pairI.length / 2;
  const n = prob.n + 1;
  const vIdx = prob.n;
  const c = new Float64Array(n);
  c.set(prob.c);
  c[vIdx] = 1;
  const gRows = prob.gRows.slice();
  const socDims = prob.socDims.slice();
  const hVec = Array.from(prob.h);
  // head: 1 + v  -> G row (-v), h 1 ; then 1 - v ; then 2 sqrt(beta) h s
  gRows.push(row([vIdx], [-1]));
  hVec.push(1);
  gRows.push(row([vIdx], [1]));
  hVec.push(1);
  const w = 2 * Math.sqrt(beta) * grid.h;
  for (let e = 0; e < half; e++) {
    gRows.push(row([e], [-w]));
    hVec.push(0);
  }
  socDims.push(2 + half);
  const problem: SocpProblem = { n, c, aRows: prob.aRows, b: prob.b,
                                 gRows, h: Float64Array.from(hVec),
                                 nonneg: 0, socDims };
  return { problem,
           describe: `tikhonov, N=${grid.n}, delta=${grid.delta}, `
                     + `beta=${beta}` };
}

/** Sampled two-point field -sin(pi x) + sin(pi x') over ordered pairs. */
export function sineField(grid: Grid1d): Float64Array {
  const p = new Float64Array(grid.pairI.length);
  for (let k = 0; k < p.length; k++) {
    p[k] = -Math.sin(Math.PI * grid.centers[grid.pairI[k]])
           + Math.sin(Math.PI * grid.centers[grid.pairJ[k]]);
  }
  return p;
}

/**
 * Constrained dual norm:  max h^2 p.q  over  sum_i h t_i <= 1 and the
 * per-cell cones, optionally restricted to antisymmetric q.
 */
export function dualNormModel(grid: Grid1d, p: Float64Array,
                              antisym: boolean): ConicModel {
  const half = grid.pairI.length / 2;
  const nq = antisym ? half : grid.pairI.length;
  const qIndex = (k: number) => (antisym && k >= half ? k - half : k);
  const qSign = (k: number) => (antisym && k >= half ? -1 : 1);
  const rows = rowsByOuterCell(grid);
  const total = grid.centers.length;
  const n = nq + total;
  const c = new Float64Array(n);
  const h2 = grid.h * grid.h;
  for (let k = 0; k < grid.pairI.length; k++) {
    c[qIndex(k)] -= h2 * p[k] * qSign(k); // maximize -> minimize negative
  }

  const gRows: SparseRow[] = [];
  const hVec: number[] = [];
  // one nonnegative slack: sum h t_i <= 1
  gRows.push(row(Array.from({ length: total }, (_, i) => nq + i),
                 Array.from({ length: total }, () => grid.h)));
  hVec.push(1);
  const socDims: number[] = [];
  const sqh = Math.sqrt(grid.h);
  rows.forEach((pairIdxs, i) => {
    gRows.push(row([nq + i], [-1]));
    hVec.push(0);
    for (const k of pairIdxs) {
      gRows.push(row([qIndex(k)], [-sqh * qSign(k)]));
      hVec.push(0);
    }
    socDims.push(1 + pairIdxs.length);
  });
  const problem: SocpProblem = { n, c, aRows: [], b: new Float64Array(0),
                                 gRows, h: Float64Array.from(hVec),
                                 nonneg: 1, socDims };
  return { problem,
           describe: `dual norm of the sine field, N=${grid.n}, `
                     + `antisym=${antisym}, full interaction` };
}

/** Direct computation of the unconstrained dual norm: max row norm. */
export function freeDualNormDirect(grid: Grid1d, p: Float64Array): number {
  const rows = rowsByOuterCell(grid);
  let best = 0;
  rows.forEach((pairIdxs) => {
    let sq = 0;
    for (const k of pairIdxs) sq += grid.h * p[k] * p[k];
    best = Math.max(best, Math.sqrt(sq));
  });
  return best;
}
