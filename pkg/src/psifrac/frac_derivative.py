"""psi-Hilfer fractional partial derivatives (order alpha, type beta).

The one-axis operator is the three-stage composition

    I^{beta(1-alpha)} [ (1/psi') d/dx ( I^{(1-beta)(1-alpha)} f ) ],

so beta = 0 gives the Riemann-Liouville-type and beta = 1 the Caputo-type
composition; zero-order integrals are the identity.  The classical
derivative uses three-point stencils (second order on nonuniform grids,
one-sided at the boundary rows), and all three stages share the field's
grid.  The Picard solver never calls this module; it exists to check
computed solutions against the differential form a posteriori.
"""

from __future__ import annotations

import numpy as np

from psifrac._exceptions import DomainError, ValidationError
from psifrac.frac_integral import frac_int_x, frac_int_y
from psifrac.grids import Field2D, FracOrder
from psifrac.kernels import PsiKernel

__all__ = ["diff_matrix", "hilfer_dx", "hilfer_mixed"]


def diff_matrix(nodes: np.ndarray) -> np.ndarray:
    """First-derivative matrix: 3-point central stencils, one-sided at the ends."""
    nodes = np.asarray(nodes, dtype=np.float64)
    n = nodes.size
    if n < 3:
        raise ValidationError("differentiation needs at least 3 nodes")
    D = np.zeros((n, n))
    for i in range(n):
        j = min(max(i - 1, 0), n - 3)  # leftmost stencil node
        x0, x1, x2 = nodes[j], nodes[j + 1], nodes[j + 2]
        xc = nodes[i]
        D[i, j] = (2 * xc - x1 - x2) / ((x0 - x1) * (x0 - x2))
        D[i, j + 1] = (2 * xc - x0 - x2) / ((x1 - x0) * (x1 - x2))
        D[i, j + 2] = (2 * xc - x0 - x1) / ((x2 - x0) * (x2 - x1))
    return D


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha <= 1.0:
        raise DomainError(f"Hilfer derivative order must lie in (0, 1], got {alpha}")


def _finite(values: np.ndarray, stage: str) -> np.ndarray:
    if not np.isfinite(values).all():
        raise ValidationError(f"non-finite values produced by {stage}")
    return values


def hilfer_dx(kernel: PsiKernel, alpha: float, beta: float, f: Field2D) -> Field2D:
    """psi-Hilfer derivative of order alpha, type beta, along the x axis."""
    _check_alpha(alpha)
    if not 0.0 <= beta <= 1.0:
        raise DomainError(f"Hilfer type beta must lie in [0, 1], got {beta}")
    a_in = (1.0 - beta) * (1.0 - alpha)
    a_out = beta * (1.0 - alpha)
    g = frac_int_x(kernel, a_in, f) if a_in > 0.0 else f
    D = diff_matrix(f.grid.x)
    dpsi = np.asarray(kernel.deriv(f.grid.x), dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        weighted = (D @ g.values) / dpsi[:, None]
    mid = Field2D(f.grid, _finite(weighted, "x-differencing"))
    return frac_int_x(kernel, a_out, mid) if a_out > 0.0 else mid


def hilfer_mixed(kernel: PsiKernel, order: FracOrder, f: Field2D) -> Field2D:
    """Mixed two-axis psi-Hilfer derivative (cross-stencil for d2/dxdy)."""
    a1, a2, beta = order.alpha1, order.alpha2, order.beta
    _check_alpha(a1)
    _check_alpha(a2)
    g = f
    if (1.0 - beta) * (1.0 - a1) > 0.0:
        g = frac_int_x(kernel, (1.0 - beta) * (1.0 - a1), g)
    if (1.0 - beta) * (1.0 - a2) > 0.0:
        g = frac_int_y(kernel, (1.0 - beta) * (1.0 - a2), g)
    Dx = diff_matrix(f.grid.x)
    Dy = diff_matrix(f.grid.y)
    dpx = np.asarray(kernel.deriv(f.grid.x), dtype=np.float64)[:, None]
    dpy = np.asarray(kernel.deriv(f.grid.y), dtype=np.float64)[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        weighted = (Dx @ g.values) @ Dy.T / (dpx * dpy)
    mid = Field2D(f.grid, _finite(weighted, "mixed differencing"))
    out = mid
    if beta * (1.0 - a1) > 0.0:
        out = frac_int_x(kernel, beta * (1.0 - a1), out)
    if beta * (1.0 - a2) > 0.0:
        out = frac_int_y(kernel, beta * (1.0 - a2), out)
    return out
