"""Numba implementations of the hot kernels; imported lazily by ``_backend``.

Arithmetic mirrors the numpy fallback element by element so the two
backends agree to roundoff.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def l1_weights(tau, alpha):
    n = tau.size
    W = np.zeros((n, n))
    for i in range(1, n):
        ti = tau[i]
        for k in range(i):
            wk = ti - tau[k]
            wk1 = ti - tau[k + 1]
            dk = tau[k + 1] - tau[k]
            m0 = (wk**alpha - wk1**alpha) / alpha
            m1 = wk * m0 - (wk ** (alpha + 1.0) - wk1 ** (alpha + 1.0)) / (alpha + 1.0)
            lam = m1 / dk
            W[i, k] += m0 - lam
            W[i, k + 1] += lam
    return W


@njit(cache=True)
def ml_series(z, rel_tol, max_terms, lg):
    out = np.ones_like(z)
    counts = np.full(z.shape, max_terms + 1, dtype=np.int64)
    for j in range(z.size):
        zj = z[j]
        if zj <= 0.0:
            counts[j] = 0
            continue
        s = 1.0
        term = 1.0
        for k in range(1, max_terms + 1):
            term *= zj * np.exp(lg[k - 1] - lg[k])
            s += term
            if term < rel_tol * s:
                counts[j] = k
                break
        out[j] = s
    return out, counts
