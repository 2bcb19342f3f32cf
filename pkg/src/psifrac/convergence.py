"""Grid-refinement error tables for the named oracle problems.

Each oracle has a closed-form reference; the sup-error is measured on
x >= 0.1a because the corner node itself converges one order slower for
singular-profile integrands.  Error pairs at machine epsilon report their
rate as ``inf`` (saturated) rather than as roundoff noise.
"""

from __future__ import annotations

import numpy as np

from psifrac._exceptions import ValidationError
from psifrac.frac_integral import frac_int_x
from psifrac.grids import Field2D, Grid2D
from psifrac.kernels import PsiKernel
from psifrac.special import gamma_fn

__all__ = ["GRID_SIZES", "ORACLES", "oracle_errors", "observed_rates"]

GRID_SIZES = (17, 33, 65, 129, 257)

SATURATION_FLOOR = 1e-13

ORACLES = ("power", "trapezoid", "solver-zero")


def oracle_errors(name: str, kernel: PsiKernel, alpha: float) -> list[float]:
    """Interior sup-errors of one oracle problem over GRID_SIZES."""
    if name not in ORACLES:
        raise ValidationError(f"unknown convergence oracle {name!r}")
    errs = []
    psi0 = float(np.asarray(kernel.eval(0.0)))
    for n in GRID_SIZES:
        grid = Grid2D.uniform(1.0, 1.0, n, 2)
        span = np.asarray(kernel.eval(grid.x), dtype=float) - psi0
        if name == "power":
            f = Field2D(grid, np.tile((span**0.5)[:, None], (1, 2)))
            expect = gamma_fn(1.5) / gamma_fn(1.5 + alpha) * span ** (alpha + 0.5)
            got = frac_int_x(kernel, alpha, f).values[:, 0]
        elif name == "trapezoid":
            f = Field2D(grid, np.tile(np.exp(grid.x)[:, None], (1, 2)))
            expect = np.exp(grid.x) - 1.0
            got = frac_int_x(kernel, 1.0, f).values[:, 0]
        else:  # solver-zero: constant field, quadrature-exact
            f = Field2D.constant(grid, 1.0)
            expect = span**alpha / gamma_fn(alpha + 1.0)
            got = frac_int_x(kernel, alpha, f).values[:, 0]
        mask = grid.x >= 0.1 * grid.a
        errs.append(float(np.abs(got - expect)[mask].max()))
    return errs


def observed_rates(errors: list[float]) -> list[float]:
    """log2(err_n / err_2n); saturated (machine-epsilon) pairs report inf."""
    rates = []
    for coarse, fine in zip(errors, errors[1:]):
        if fine <= SATURATION_FLOOR or coarse <= SATURATION_FLOOR:
            rates.append(float("inf"))
        else:
            rates.append(float(np.log2(coarse / fine)))
    return rates
