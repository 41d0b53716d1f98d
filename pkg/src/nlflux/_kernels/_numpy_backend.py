"""Pure-NumPy implementation of the pair-table kernels.

``np.bincount`` adds in input order, matching the sequential loops of
the compiled backend bit for bit.
"""

import numpy as np


def gather_diff_scaled(ext, pair_i, pair_j, scale, out=None):
    """out[k] = (ext[pair_i[k]] - ext[pair_j[k]]) * scale"""
    if out is None:
        out = np.empty(pair_i.shape[0])
    np.subtract(ext[pair_i], ext[pair_j], out=out)
    out *= scale
    return out


def scatter_mirror_diff(q, mirror, pair_i, scale, n_rows):
    """row_sums[i] = sum_{k: pair_i[k]==i} (q[mirror[k]] - q[k]) * scale"""
    t = q[mirror] - q
    return np.bincount(pair_i, weights=t, minlength=n_rows) * scale


def row_sqsums(q, pair_i, n_rows):
    """row_sums[i] = sum_{k: pair_i[k]==i} q[k]**2"""
    return np.bincount(pair_i, weights=q * q, minlength=n_rows)


def scale_by_row(q, pair_i, factors, out=None):
    """out[k] = q[k] * factors[pair_i[k]]"""
    if out is None:
        out = np.empty(q.shape[0])
    np.multiply(q, factors[pair_i], out=out)
    return out
