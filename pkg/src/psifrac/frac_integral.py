"""psi-Riemann-Liouville fractional partial integrals in one and two axes.

The 1D operator along x is

    (I^alpha f)(x_i, y) = 1/Gamma(alpha) * int_0^{x_i} psi'(s)
                          (psi(x_i) - psi(s))^(alpha-1) f(s, y) ds,

computed after the substitution tau = psi(s) by product-integration
weights that integrate the singular kernel exactly against the
piecewise-linear-in-tau interpolant of f.  Weights are nonnegative, the
alpha = 1, psi = identity case degenerates to cumulative trapezoids
exactly, and nonuniform (e.g. graded) node layouts are supported.  The 2D
operator is the composition of the two sweeps, which for the separable
kernel equals the double integral of the interpolant.
"""

from __future__ import annotations

import numpy as np

from psifrac import _backend
from psifrac._exceptions import DomainError, ValidationError
from psifrac.grids import Field2D, FracOrder
from psifrac.kernels import PsiKernel
from psifrac.special import gamma_fn

__all__ = ["weight_matrix", "frac_int_x", "frac_int_y", "frac_int_2d"]


def _check_order(alpha: float) -> None:
    if not 0.0 < alpha <= 1.0:
        raise DomainError(f"fractional integral order must lie in (0, 1], got {alpha}")


def _check_cover(kernel: PsiKernel, nodes: np.ndarray) -> None:
    if nodes[0] < kernel.t_lo or nodes[-1] > kernel.t_hi:
        raise ValidationError(
            f"kernel {kernel.name!r} validated on [{kernel.t_lo}, {kernel.t_hi}] "
            f"does not cover nodes [{nodes[0]}, {nodes[-1]}]"
        )


def weight_matrix(kernel: PsiKernel, alpha: float, nodes: np.ndarray) -> np.ndarray:
    """Quadrature matrix Q with (Q f)_i ~= int psi'(s)(psi(t_i)-psi(s))^(alpha-1) f ds.

    No 1/Gamma(alpha) normalization; row 0 is zero (empty interval).
    """
    _check_order(alpha)
    nodes = np.asarray(nodes, dtype=np.float64)
    _check_cover(kernel, nodes)
    tau = np.asarray(kernel.eval(nodes), dtype=np.float64)
    if not np.all(np.diff(tau) > 0.0):
        raise ValidationError("psi(nodes) must be strictly increasing")
    return _backend.l1_weights(tau, alpha)


def frac_int_x(kernel: PsiKernel, alpha1: float, f: Field2D) -> Field2D:
    """Fractional integral of order alpha1 along the x axis."""
    W = weight_matrix(kernel, alpha1, f.grid.x) / gamma_fn(alpha1)
    return Field2D(f.grid, W @ f.values)


def frac_int_y(kernel: PsiKernel, alpha2: float, f: Field2D) -> Field2D:
    """Fractional integral of order alpha2 along the y axis."""
    W = weight_matrix(kernel, alpha2, f.grid.y) / gamma_fn(alpha2)
    return Field2D(f.grid, f.values @ W.T)


def frac_int_2d(kernel: PsiKernel, order: FracOrder, f: Field2D) -> Field2D:
    """Tensor-product integral: x sweep at alpha1, then y sweep at alpha2."""
    return frac_int_y(kernel, order.alpha2, frac_int_x(kernel, order.alpha1, f))
