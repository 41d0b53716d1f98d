/** Dense row-major matrices and an LU solver, sized for desk-scale KKT systems. */

export class Matrix {
  readonly rows: number;
  readonly cols: number;
  readonly data: Float64Array;

  constructor(rows: number, cols: number, data?: Float64Array) {
    this.rows = rows;
    this.cols = cols;
    this.data = data ?? new Float64Array(rows * cols);
  }

  get(i: number, j: number): number {
    return this.data[i * this.cols + j];
  }

  set(i: number, j: number, v: number): void {
    this.data[i * this.cols + j] = v;
  }

  add(i: number, j: number, v: number): void {
    this.data[i * this.cols + j] += v;
  }
}

/** LU factorization with partial pivoting, reusable across solves. */
export class LuFactor {
  private readonly n: number;
  private readonly lu: Float64Array;
  private readonly piv: Int32Array;
  private readonly original: Float64Array;

  constructor(a: Matrix) {
    const n = a.rows;
    if (a.cols !== n) throw new Error("LuFactor: matrix must be square");
    this.n = n;
    this.original = Float64Array.from(a.data);
    const lu = Float64Array.from(a.data);
    const piv = new Int32Array(n);
    for (let i = 0; i < n; i++) piv[i] = i;
    for (let k = 0; k < n; k++) {
      let p = k;
      let maxv = Math.abs(lu[k * n + k]);
      for (let i = k + 1; i < n; i++) {
        const v = Math.abs(lu[i * n + k]);
        if (v > maxv) {
          maxv = v;
          p = i;
        }
      }
      if (maxv === 0) throw new Error("LuFactor: singular matrix");
      if (p !== k) {
        for (let j = 0; j < n; j++) {
          const t = lu[k * n + j];
          lu[k * n + j] = lu[p * n + j];
          lu[p * n + j] = t;
        }
        const t = piv[k];
        piv[k] = piv[p];
        piv[p] = t;
      }
      const pivot = lu[k * n + k];
      for (let i = k + 1; i < n; i++) {
        const f = lu[i * n + k] / pivot;
        lu[i * n + k] = f;
        if (f !== 0) {
          for (let j = k + 1; j < n; j++) lu[i * n + j] -= f * lu[k * n + j];
        }
      }
    }
    this.lu = lu;
    this.piv = piv;
  }

  private backSolve(b: Float64Array): Float64Array {
    const { n, lu, piv } = this;
    const x = new Float64Array(n);
    for (let i = 0; i < n; i++) x[i] = b[piv[i]];
    for (let i = 0; i < n; i++) {
      let s = x[i];
      for (let j = 0; j < i; j++) s -= lu[i * n + j] * x[j];
      x[i] = s;
    }
    for (let i = n - 1; i >= 0; i--) {
      let s = x[i];
      for (let j = i + 1; j < n; j++) s -= lu[i * n + j] * x[j];
      x[i] = s / lu[i * n + i];
    }
    return x;
  }

  /** Solve with one step of iterative refinement. */
  solve(b: Float64Array): Float64Array {
    const { n, original } = this;
    const x = this.backSolve(b);
    const r = new Float64Array(n);
    for (let i = 0; i < n; i++) {
      let s = b[i];
      for (let j = 0; j < n; j++) s -= original[i * n + j] * x[j];
      r[i] = s;
    }
    const dx = this.backSolve(r);
    for (let i = 0; i < n; i++) x[i] += dx[i];
    return x;
  }
}

/** One-shot convenience wrapper. */
export function luSolve(a: Matrix, b: Float64Array): Float64Array {
  return new LuFactor(a).solve(b);
}

export function dot(a: Float64Array, b: Float64Array): number {
  let s = 0;
  for (let i = 0; i < a.length; i++) s += a[i] * b[i];
  return s;
}

export function norm2(a: Float64Array): number {
  return Math.sqrt(dot(a, a));
}

export function axpy(alpha: number, x: Float64Array, y: Float64Array): void {
  for (let i = 0; i < x.length; i++) y[i] += alpha * x[i];
}
