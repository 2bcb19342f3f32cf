"""Hot-kernel backend: numba-jitted loops with a pure-numpy fallback.

Two kernels dominate runtime and exist in both flavors:

* ``l1_weights`` -- product-integration weights for the weakly singular
  kernel (tau_i - tau)^(alpha-1) against a piecewise-linear interpolant.
* ``ml_series`` -- batched power-series evaluation of the one-parameter
  Mittag-Leffler function with per-element term-ratio stopping.

Selection is driven by the ``PSIFRAC_BACKEND`` environment variable:
``auto`` (default: numba if importable), ``numba`` (error if missing) or
``numpy``.  ``PSIFRAC_THREADS`` caps numba's thread pool.  Both paths run
the same arithmetic element by element, so results agree to roundoff;
``benchmarks/bench_backends.py`` compares their throughput.
"""

from __future__ import annotations

import functools
import math
import os

import numpy as np

_VALID = ("auto", "numba", "numpy")

_backend: str | None = None
_numba_kernels = None


def _resolve() -> str:
    choice = os.environ.get("PSIFRAC_BACKEND", "auto").strip().lower()
    if choice not in _VALID:
        raise ValueError(
            f"PSIFRAC_BACKEND must be one of {_VALID}, got {choice!r}"
        )
    if choice == "numpy":
        return "numpy"
    try:
        import numba  # noqa: F401
    except ImportError:
        if choice == "numba":
            raise RuntimeError("PSIFRAC_BACKEND=numba but numba is not importable")
        return "numpy"
    global _numba_kernels
    if _numba_kernels is None:
        threads = os.environ.get("PSIFRAC_THREADS")
        if threads:
            import numba

            numba.set_num_threads(max(1, min(int(threads), numba.config.NUMBA_NUM_THREADS)))
        from psifrac import _kernels_numba

        _numba_kernels = _kernels_numba
    return "numba"


def active_backend() -> str:
    """Resolved backend name, computed once on first use."""
    global _backend
    if _backend is None:
        _backend = _resolve()
    return _backend


def reset_backend() -> None:
    """Forget the cached choice so the environment is re-read (test hook)."""
    global _backend
    _backend = None


def l1_weights(tau: np.ndarray, alpha: float) -> np.ndarray:
    """Lower-triangular W with (W f)_i ~= int_tau0^taui (tau_i - t)^(alpha-1) F(t) dt.

    The quadrature is exact whenever F is piecewise linear between the
    ``tau`` nodes; no 1/Gamma(alpha) normalization is applied.
    """
    tau = np.ascontiguousarray(tau, dtype=np.float64)
    if active_backend() == "numba":
        return _numba_kernels.l1_weights(tau, float(alpha))
    return _l1_weights_numpy(tau, float(alpha))


def ml_series(z: np.ndarray, alpha: float, rel_tol: float, max_terms: int):
    """Partial sums of sum_k z^k / Gamma(alpha k + 1) with per-element stopping.

    Returns ``(values, counts)`` where ``counts[j]`` is the first k with
    term < rel_tol * partial_sum, or ``max_terms + 1`` if never reached.
    """
    z = np.ascontiguousarray(z, dtype=np.float64)
    lg = _lgamma_table(alpha, max_terms)
    if active_backend() == "numba":
        return _numba_kernels.ml_series(z, rel_tol, max_terms, lg)
    return _ml_series_numpy(z, rel_tol, max_terms, lg)


@functools.lru_cache(maxsize=512)
def _lgamma_table(alpha: float, max_terms: int) -> np.ndarray:
    k = np.arange(max_terms + 1, dtype=np.float64)
    return np.array([math.lgamma(alpha * kk + 1.0) for kk in k])


def _l1_weights_numpy(tau: np.ndarray, alpha: float) -> np.ndarray:
    n = tau.size
    W = np.zeros((n, n))
    if n < 2:
        return W
    d = np.diff(tau)
    w = tau[:, None] - tau[None, :]
    np.maximum(w, 0.0, out=w)
    p = w**alpha
    q = w ** (alpha + 1.0)
    m0 = (p[:, :-1] - p[:, 1:]) / alpha
    m1 = w[:, :-1] * m0 - (q[:, :-1] - q[:, 1:]) / (alpha + 1.0)
    lam = m1 / d[None, :]
    # target i integrates over intervals k = 0 .. i-1 only
    used = np.tril(np.ones((n, n - 1), dtype=bool), k=-1)
    W[:, :-1] += np.where(used, m0 - lam, 0.0)
    W[:, 1:] += np.where(used, lam, 0.0)
    return W


def _ml_series_numpy(z, rel_tol, max_terms, lg):
    out = np.ones_like(z)
    term = np.ones_like(z)
    counts = np.full(z.shape, max_terms + 1, dtype=np.int64)
    open_ = z > 0.0
    counts[~open_] = 0
    for k in range(1, max_terms + 1):
        if not open_.any():
            break
        factor = math.exp(lg[k - 1] - lg[k])
        term[open_] *= z[open_] * factor
        out[open_] += term[open_]
        done = open_ & (term < rel_tol * out)
        counts[done] = k
        open_ &= ~done
    return out, counts
