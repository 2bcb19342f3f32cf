"""Throughput comparison of the numba and numpy kernel backends.

Times the two hot kernels (product-quadrature weight assembly and batched
Mittag-Leffler series) plus one full Picard solve on each backend:

    python3 benchmarks/bench_backends.py
"""

import os
import time

import numpy as np


def timeit(fn, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_backend(name):
    os.environ["PSIFRAC_BACKEND"] = name
    from psifrac import _backend

    _backend.reset_backend()
    assert _backend.active_backend() == name

    rows = []
    for n in (129, 257, 513, 1025):
        tau = np.linspace(0.0, 1.0, n) ** 1.5
        _backend.l1_weights(tau, 0.7)  # warm (JIT / cache load)
        rows.append((f"l1_weights n={n}", timeit(lambda: _backend.l1_weights(tau, 0.7))))

    for m in (1_000, 100_000):
        z = np.linspace(0.0, 5.0, m)
        _backend.ml_series(z, 0.8, 1e-12, 200)
        rows.append((f"ml_series m={m}", timeit(lambda: _backend.ml_series(z, 0.8, 1e-12, 200))))

    import psifrac as pf

    grid = pf.Grid2D.uniform(1.0, 1.0, 129, 129)
    p = pf.ProblemSpec(
        rhs=lambda x, y, u, u1, u2: 0.5 * np.sin(u),
        lipschitz=0.5,
        data_h=np.sin(grid.x),
        data_g1=np.zeros(129),
        data_g2=np.zeros(129),
        order=pf.FracOrder(0.8, 0.8, 0.5),
        kernel=pf.make_builtin("identity"),
        grid=grid,
    )
    bp = pf.BieleckiParams(delta=2.0, tol=1e-10, max_iter=100)
    pf.picard_solve(p, bp)
    rows.append(("picard_solve 129x129", timeit(lambda: pf.picard_solve(p, bp), repeats=3)))
    return rows


def main():
    results = {}
    for name in ("numpy", "numba"):
        try:
            results[name] = bench_backend(name)
        except RuntimeError as exc:
            print(f"[skip] {name}: {exc}")
    if not results:
        return
    names = list(results)
    print(f"{'kernel':28s}" + "".join(f"{n:>12s}" for n in names) + f"{'speedup':>10s}")
    for i, (label, _) in enumerate(results[names[0]]):
        times = [results[n][i][1] for n in names]
        speed = times[0] / times[-1] if times[-1] > 0 else float("inf")
        print(f"{label:28s}" + "".join(f"{t * 1e3:10.2f}ms" for t in times) + f"{speed:9.2f}x")


if __name__ == "__main__":
    main()
