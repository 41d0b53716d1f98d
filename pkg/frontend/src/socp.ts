/**
 * Primal-dual interior-point solver for second-order cone programs:
 *
 *     minimize    c'x
 *     subject to  A x = b,
 *                 G x + s = h,   s in K,
 *
 * where K is a product of a nonnegative orthant and second-order cones.
 * Nesterov-Todd scalings with a Mehrotra predictor-corrector; the
 * constraint matrix G is kept as sparse rows so the scaled normal
 * matrix G' W^-2 G assembles cone by cone.
 */

import { LuFactor, Matrix, dot, norm2 } from "./linalg.js";

export interface SparseRow {
  cols: Int32Array;
  vals: Float64Array;
}

export interface SocpProblem {
  n: number;                 // number of free variables x
  c: Float64Array;
  aRows: SparseRow[];        // equality rows (may be empty)
  b: Float64Array;
  gRows: SparseRow[];        // cone rows, nonneg block first then SOCs
  h: Float64Array;
  nonneg: number;            // leading rows in the nonnegative orthant
  socDims: number[];         // second-order cone sizes, in row order
}

export interface SocpOptions {
  tol?: number;
  maxIters?: number;
}

export interface SocpSolution {
  status: "optimal" | "max_iters";
  x: Float64Array;
  s: Float64Array;
  z: Float64Array;
  y: Float64Array;
  pobj: number;
  dobj: number;
  gap: number;
  iterations: number;
}

interface ConeLayout {
  offsets: number[]; // start row of each SOC
  m: number;
}

function layout(prob: SocpProblem): ConeLayout {
  const offsets: number[] = [];
  let at = prob.nonneg;
  for (const d of prob.socDims) {
    offsets.push(at);
    at += d;
  }
  return { offsets, m: at };
}

/** Scaling state: diagonal for the orthant, (eta, wbar) per SOC. */
interface Scaling {
  d: Float64Array;            // orthant: W = diag(d)
  eta: Float64Array;
  wbar: Float64Array[];       // unit hyperbolic vectors per SOC
  lambda: Float64Array;       // scaled point, full length m
}

function jdot(u: Float64Array, off: number, dim: number): number {
  let s = u[off] * u[off];
  for (let i = 1; i < dim; i++) s -= u[off + i] * u[off + i];
  return s;
}

function computeScaling(prob: SocpProblem, lay: ConeLayout,
                        s: Float64Array, z: Float64Array): Scaling {
  const d = new Float64Array(prob.nonneg);
  const lambda = new Float64Array(lay.m);
  for (let i = 0; i < prob.nonneg; i++) {
    d[i] = Math.sqrt(s[i] / z[i]);
    lambda[i] = Math.sqrt(s[i] * z[i]);
  }
  const eta = new Float64Array(prob.socDims.length);
  const wbar: Float64Array[] = [];
  prob.socDims.forEach((dim, k) => {
    const off = lay.offsets[k];
    const snrm = Math.sqrt(jdot(s, off, dim));
    const znrm = Math.sqrt(jdot(z, off, dim));
    eta[k] = Math.sqrt(snrm / znrm);
    // plain inner product of the normalized points
    let sz = 0;
    for (let i = 0; i < dim; i++) sz += (s[off + i] / snrm) * (z[off + i] / znrm);
    const gamma = Math.sqrt((1 + sz) / 2);
    const w = new Float64Array(dim);
    w[0] = (s[off] / snrm + z[off] / znrm) / (2 * gamma);
    for (let i = 1; i < dim; i++) {
      w[i] = (s[off + i] / snrm - z[off + i] / znrm) / (2 * gamma);
    }
    wbar.push(w);
    // lambda = W z restricted to this cone
    const lz = applySocW(w, eta[k], z, off, dim, +1);
    for (let i = 0; i < dim; i++) lambda[off + i] = lz[i];
  });
  return { d, eta, wbar, lambda };
}

/** Apply W (sign=+1) or W^{-1} (sign=-1) of one SOC block to u[off..off+dim). */
function applySocW(wbar: Float64Array, eta: number, u: Float64Array,
                   off: number, dim: number, sign: number): Float64Array {
  const out = new Float64Array(dim);
  let wu = 0;
  for (let i = 1; i < dim; i++) wu += wbar[i] * u[off + i];
  const w0 = wbar[0];
  const scale = sign > 0 ? eta : 1 / eta;
  const s1 = sign > 0 ? 1 : -1; // W^{-1} flips the off-diagonal sign
  out[0] = scale * (w0 * u[off] + s1 * wu);
  const coef = (s1 * u[off] + wu / (1 + w0));
  for (let i = 1; i < dim; i++) {
    out[i] = scale * (u[off + i] + coef * wbar[i]);
  }
  return out;
}

/** y <- W u (whole cone product); W is symmetric, so W^T = W. */
function applyW(prob: SocpProblem, lay: ConeLayout, sc: Scaling,
                u: Float64Array, sign: number): Float64Array {
  const out = new Float64Array(lay.m);
  for (let i = 0; i < prob.nonneg; i++) {
    out[i] = sign > 0 ? sc.d[i] * u[i] : u[i] / sc.d[i];
  }
  prob.socDims.forEach((dim, k) => {
    const off = lay.offsets[k];
    const block = applySocW(sc.wbar[k], sc.eta[k], u, off, dim, sign);
    for (let i = 0; i < dim; i++) out[off + i] = block[i];
  });
  return out;
}

/** Jordan product u o v. */
function jprod(prob: SocpProblem, lay: ConeLayout, u: Float64Array,
               v: Float64Array): Float64Array {
  const out = new Float64Array(lay.m);
  for (let i = 0; i < prob.nonneg; i++) out[i] = u[i] * v[i];
  prob.socDims.forEach((dim, k) => {
    const off = lay.offsets[k];
    let uv = 0;
    for (let i = 0; i < dim; i++) uv += u[off + i] * v[off + i];
    out[off] = uv;
    for (let i = 1; i < dim; i++) {
      out[off + i] = u[off] * v[off + i] + v[off] * u[off + i];
    }
  });
  return out;
}

/** Solve lambda o x = d for x. */
function jdiv(prob: SocpProblem, lay: ConeLayout, lambda: Float64Array,
              rhs: Float64Array): Float64Array {
  const out = new Float64Array(lay.m);
  for (let i = 0; i < prob.nonneg; i++) out[i] = rhs[i] / lambda[i];
  prob.socDims.forEach((dim, k) => {
    const off = lay.offsets[k];
    const l0 = lambda[off];
    let l1r1 = 0;
    let l1sq = 0;
    for (let i = 1; i < dim; i++) {
      l1r1 += lambda[off + i] * rhs[off + i];
      l1sq += lambda[off + i] * lambda[off + i];
    }
    const det = l0 * l0 - l1sq;
    const x0 = (l0 * rhs[off] - l1r1) / det;
    out[off] = x0;
    for (let i = 1; i < dim; i++) {
      out[off + i] = (rhs[off + i] - x0 * lambda[off + i]) / l0;
    }
  });
  return out;
}

/** Identity element of the cone algebra. */
function coneIdentity(prob: SocpProblem, lay: ConeLayout): Float64Array {
  const e = new Float64Array(lay.m);
  for (let i = 0; i < prob.nonneg; i++) e[i] = 1;
  prob.socDims.forEach((dim, k) => {
    e[lay.offsets[k]] = 1;
  });
  return e;
}

/** Largest step alpha with u + alpha du staying in the cone. */
function maxStep(prob: SocpProblem, lay: ConeLayout, u: Float64Array,
                 du: Float64Array): number {
  let alpha = Infinity;
  for (let i = 0; i < prob.nonneg; i++) {
    if (du[i] < 0) alpha = Math.min(alpha, -u[i] / du[i]);
  }
  prob.socDims.forEach((dim, k) => {
    const off = lay.offsets[k];
    // boundary where (u0 + a d0)^2 = |u1 + a d1|^2 with u0 + a d0 > 0
    const a = jdot(du, off, dim);
    let b = u[off] * du[off];
    for (let i = 1; i < dim; i++) b -= u[off + i] * du[off + i];
    b *= 2;
    const c = jdot(u, off, dim);
    let bound = Infinity;
    if (Math.abs(a) < 1e-300) {
      if (b < 0) bound = -c / b;
    } else {
      const disc = b * b - 4 * a * c;
      if (disc >= 0) {
        const sq = Math.sqrt(disc);
        for (const r of [(-b - sq) / (2 * a), (-b + sq) / (2 * a)]) {
          if (r > 0 && u[off] + r * du[off] >= 0) bound = Math.min(bound, r);
        }
      }
    }
    if (du[off] < 0) bound = Math.min(bound, -u[off] / du[off]);
    alpha = Math.min(alpha, bound);
  });
  return alpha;
}

/** Apply sparse rows: out = R x (multiplying a length-n vector). */
function applyRows(rows: SparseRow[], x: Float64Array): Float64Array {
  const out = new Float64Array(rows.length);
  rows.forEach((row, i) => {
    let s = 0;
    for (let k = 0; k < row.cols.length; k++) s += row.vals[k] * x[row.cols[k]];
    out[i] = s;
  });
  return out;
}

/** out += R^T v. */
function addRowsT(rows: SparseRow[], v: Float64Array, out: Float64Array): void {
  rows.forEach((row, i) => {
    const vi = v[i];
    if (vi === 0) return;
    for (let k = 0; k < row.cols.length; k++) out[row.cols[k]] += row.vals[k] * vi;
  });
}

/**
 * Assemble the reduced KKT matrix [G'W^-2 G, A'; A, 0] cone by cone.
 * For the orthant the middle factor is diag(1/d^2); for a SOC it is
 * eta^-2 (2 vv' - J) with v = J wbar, applied on the cone's local rows.
 */
function assembleKkt(prob: SocpProblem, lay: ConeLayout,
                     sc: Scaling): Matrix {
  const n = prob.n;
  const p = prob.aRows.length;
  const kkt = new Matrix(n + p, n + p);

  for (let i = 0; i < prob.nonneg; i++) {
    const row = prob.gRows[i];
    const w = 1 / (sc.d[i] * sc.d[i]);
    for (let a = 0; a < row.cols.length; a++) {
      for (let bIdx = 0; bIdx < row.cols.length; bIdx++) {
        kkt.add(row.cols[a], row.cols[bIdx], w * row.vals[a] * row.vals[bIdx]);
      }
    }
  }

  prob.socDims.forEach((dim, k) => {
    const off = lay.offsets[k];
    const etaInv2 = 1 / (sc.eta[k] * sc.eta[k]);
    const w = sc.wbar[k];
    // local columns touched by this cone block
    const colSet = new Map<number, number>();
    for (let r = 0; r < dim; r++) {
      const row = prob.gRows[off + r];
      for (const cRaw of row.cols) {
        if (!colSet.has(cRaw)) colSet.set(cRaw, colSet.size);
      }
    }
    const cols = Array.from(colSet.keys());
    const nc = cols.length;
    // local dense Gc (dim x nc)
    const gc = new Float64Array(dim * nc);
    for (let r = 0; r < dim; r++) {
      const row = prob.gRows[off + r];
      for (let t = 0; t < row.cols.length; t++) {
        gc[r * nc + colSet.get(row.cols[t])!] = row.vals[t];
      }
    }
    // a = Gc' v with v = J wbar
    const a = new Float64Array(nc);
    for (let r = 0; r < dim; r++) {
      const vr = r === 0 ? w[0] : -w[r];
      for (let cIdx = 0; cIdx < nc; cIdx++) a[cIdx] += vr * gc[r * nc + cIdx];
    }
    // Hc = etaInv2 * (2 a a' - Gc' J Gc)
    for (let i = 0; i < nc; i++) {
      for (let j = 0; j < nc; j++) {
        // Gc' J Gc entry: g0i g0j - sum_{r>=1} gri grj
        let gjg = gc[i] * gc[j];
        for (let r = 1; r < dim; r++) gjg -= gc[r * nc + i] * gc[r * nc + j];
        kkt.add(cols[i], cols[j], etaInv2 * (2 * a[i] * a[j] - gjg));
      }
    }
  });

  prob.aRows.forEach((row, i) => {
    for (let k = 0; k < row.cols.length; k++) {
      kkt.set(n + i, row.cols[k], row.vals[k]);
      kkt.set(row.cols[k], n + i, row.vals[k]);
    }
  });
  return kkt;
}

/** (W'W)^{-1} u, blockwise. */
function applyWtWinv(prob: SocpProblem, lay: ConeLayout, sc: Scaling,
                     u: Float64Array): Float64Array {
  const out = new Float64Array(lay.m);
  for (let i = 0; i < prob.nonneg; i++) out[i] = u[i] / (sc.d[i] * sc.d[i]);
  prob.socDims.forEach((dim, k) => {
    const off = lay.offsets[k];
    const w = sc.wbar[k];
    const etaInv2 = 1 / (sc.eta[k] * sc.eta[k]);
    // (2 vv' - J) u with v = J wbar
    let vu = w[0] * u[off];
    for (let i = 1; i < dim; i++) vu -= w[i] * u[off + i];
    out[off] = etaInv2 * (2 * w[0] * vu - u[off]);
    for (let i = 1; i < dim; i++) {
      out[off + i] = etaInv2 * (2 * (-w[i]) * vu + u[off + i]);
    }
  });
  return out;
}

export function solveSocp(prob: SocpProblem,
                          opts: SocpOptions = {}): SocpSolution {
  const tol = opts.tol ?? 1e-8;
  const maxIters = opts.maxIters ?? 100;
  const lay = layout(prob);
  if (lay.m !== prob.gRows.length || lay.m !== prob.h.length) {
    throw new Error("socp: cone sizes do not match G/h");
  }
  const n = prob.n;
  const p = prob.aRows.length;
  const degree = prob.nonneg + prob.socDims.length;

  const x = new Float64Array(n);
  const y = new Float64Array(p);
  const s = coneIdentity(prob, lay);
  const z = coneIdentity(prob, lay);

  const cnrm = Math.max(1, norm2(prob.c));
  const bnrm = Math.max(1, norm2(prob.b));
  const hnrm = Math.max(1, norm2(prob.h));

  let best: SocpSolution | null = null;
  let bestMerit = Infinity;
  let worsened = 0;

  let iterations = 0;
  for (; iterations < maxIters; iterations++) {
    // residuals
    const resx = Float64Array.from(prob.c);            // c + A'y + G'z
    addRowsT(prob.aRows, y, resx);
    addRowsT(prob.gRows, z, resx);
    const ax = applyRows(prob.aRows, x);
    const resy = new Float64Array(p);                  // A x - b
    for (let i = 0; i < p; i++) resy[i] = ax[i] - prob.b[i];
    const gx = applyRows(prob.gRows, x);
    const resz = new Float64Array(lay.m);              // G x + s - h
    for (let i = 0; i < lay.m; i++) resz[i] = gx[i] + s[i] - prob.h[i];

    const gap = dot(s, z);
    const pobj = dot(prob.c, x);
    const dobj = -dot(prob.b, y) - dot(prob.h, z);
    const relgap = Math.abs(pobj - dobj) / Math.max(1, Math.abs(pobj));
    const merit = Math.max(
      norm2(resx) / cnrm, norm2(resy) / bnrm, norm2(resz) / hnrm,
      Math.min(gap / Math.max(1, Math.abs(pobj)), relgap));
    if (!Number.isFinite(merit)) break;
    if (merit < bestMerit) {
      bestMerit = merit;
      best = { status: "optimal", x: x.slice(), s: s.slice(), z: z.slice(),
               y: y.slice(), pobj, dobj, gap, iterations };
      worsened = 0;
    } else if (++worsened >= 4) {
      break; // numerical floor reached; keep the best iterate
    }
    if (merit <= tol) break;

    const mu = gap / degree;
    const sc = computeScaling(prob, lay, s, z);
    const kkt = assembleKkt(prob, lay, sc);
    const factor = new LuFactor(kkt);

    const solveDirection = (dcomp: Float64Array) => {
      // rtz = -resz - W'(lambda \ dcomp)
      const ld = jdiv(prob, lay, sc.lambda, dcomp);
      const wld = applyW(prob, lay, sc, ld, +1);
      const rtz = new Float64Array(lay.m);
      for (let i = 0; i < lay.m; i++) rtz[i] = -resz[i] - wld[i];
      // rhs_x = -resx + G'(W'W)^{-1} rtz ; rhs_y = -resy
      const mrtz = applyWtWinv(prob, lay, sc, rtz);
      const rhs = new Float64Array(n + p);
      for (let i = 0; i < n; i++) rhs[i] = -resx[i];
      addRowsT(prob.gRows, mrtz, rhs.subarray(0, n) as Float64Array);
      for (let i = 0; i < p; i++) rhs[n + i] = -resy[i];
      const sol = factor.solve(rhs);
      const dx = sol.slice(0, n);
      const dy = sol.slice(n);
      const gdx = applyRows(prob.gRows, dx);
      const tmp = new Float64Array(lay.m);
      for (let i = 0; i < lay.m; i++) tmp[i] = gdx[i] - rtz[i];
      const dz = applyWtWinv(prob, lay, sc, tmp);
      // ds = W'(lambda \ dcomp) - W'W dz = W(ld - W dz)
      const wdz = applyW(prob, lay, sc, dz, +1);
      const ds = new Float64Array(lay.m);
      for (let i = 0; i < lay.m; i++) ds[i] = ld[i] - wdz[i];
      const dsOut = applyW(prob, lay, sc, ds, +1);
      return { dx, dy, dz, ds: dsOut, wdz };
    };

    // predictor
    const ll = jprod(prob, lay, sc.lambda, sc.lambda);
    const dcompAff = new Float64Array(lay.m);
    for (let i = 0; i < lay.m; i++) dcompAff[i] = -ll[i];
    const aff = solveDirection(dcompAff);
    const alphaAff = Math.min(1,
      maxStep(prob, lay, s, aff.ds), maxStep(prob, lay, z, aff.dz));
    let gapAff = 0;
    for (let i = 0; i < lay.m; i++) {
      gapAff += (s[i] + alphaAff * aff.ds[i]) * (z[i] + alphaAff * aff.dz[i]);
    }
    const sigma = Math.min(1, Math.max(0, Math.pow(gapAff / gap, 3)));

    // corrector: -lambda o lambda - (W^{-T} ds_aff) o (W dz_aff) + sigma mu e
    const wtds = applyW(prob, lay, sc, aff.ds, -1);
    const cross = jprod(prob, lay, wtds, aff.wdz);
    const e = coneIdentity(prob, lay);
    const dcomp = new Float64Array(lay.m);
    for (let i = 0; i < lay.m; i++) {
      dcomp[i] = -ll[i] - cross[i] + sigma * mu * e[i];
    }
    const dir = solveDirection(dcomp);
    const alpha = 0.99 * Math.min(1 / 0.99,
      maxStep(prob, lay, s, dir.ds), maxStep(prob, lay, z, dir.dz));

    for (let i = 0; i < n; i++) x[i] += alpha * dir.dx[i];
    for (let i = 0; i < p; i++) y[i] += alpha * dir.dy[i];
    for (let i = 0; i < lay.m; i++) {
      s[i] += alpha * dir.ds[i];
      z[i] += alpha * dir.dz[i];
    }
  }
  if (best === null) {
    const pobj = dot(prob.c, x);
    const dobj = -dot(prob.b, y) - dot(prob.h, z);
    return { status: "max_iters", x, s, z, y, pobj, dobj, gap: dot(s, z),
             iterations };
  }
  best.status = bestMerit <= tol ? "optimal" : "max_iters";
  best.iterations = iterations;
  return best;
}
