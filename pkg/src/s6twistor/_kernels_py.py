"""Pure numpy implementations of the hot kernels.

Signatures match :mod:`s6twistor._ckernels` exactly; :mod:`s6twistor._backend`
picks one of the two at import time.
"""
import numpy as np


def signed_table_mul(x, y, idx, sgn):
    """Batched product in an algebra whose basis products are e_i e_j = sgn[i,j] e_idx[i,j].

    ``x`` and ``y`` have shape (N, n); returns shape (N, n).
    """
    x = np.ascontiguousarray(x, dtype=float)
    y = np.ascontiguousarray(y, dtype=float)
    n = idx.shape[0]
    out = np.zeros((x.shape[0], n))
    terms = x[:, :, None] * y[:, None, :] * sgn[None, :, :]
    flat = terms.reshape(x.shape[0], n * n)
    np.add.at(out.T, idx.ravel(), flat.T)
    return out


def sparse_bilinear(a, b, out_idx, a_idx, b_idx, sign, out_len):
    """out[r, out_idx[t]] += sign[t] * a[r, a_idx[t]] * b[r, b_idx[t]] for every row r."""
    a = np.ascontiguousarray(a, dtype=float)
    b = np.ascontiguousarray(b, dtype=float)
    out = np.zeros((a.shape[0], out_len))
    if len(out_idx):
        vals = sign[None, :] * a[:, a_idx] * b[:, b_idx]
        np.add.at(out.T, out_idx, vals.T)
    return out
