"""Picard fixed-point solver for the coupled fractional integral system.

The pseudoparabolic problem with data (h, g1, g2) is solved through its
integral representation: the triple (u, u1, u2) is the fixed point of

    A1 = P2(y) h(x) + P1(x) g1(y) + P1(x) x g2(y) + I2D( x f(x,y,u,u1,u2) )
    A2 = P1(x) g1'(y) + P1(x) x g2'(y)            + Ix ( x f(x,y,u,u1,u2) )
    A3 = P2(y) h''(x)                             + Iy (   f(x,y,u,u1,u2) )

where Pi are the singular weights (psi(t)-psi(0))^(gamma_i - 1)/Gamma(gamma_i)
and the x factor realizes the data-integral of the right-hand side with
upper limit x.  Iteration is monitored in the Bielecki norm
max_i sup |w_i| exp(-delta (x+y)), the metric in which the map contracts
with factor L_f / delta.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from typing import Callable, Union

import numpy as np

from psifrac._exceptions import (
    ContractionWarning,
    DomainError,
    NonconvergenceError,
    ValidationError,
)
from psifrac.frac_derivative import hilfer_mixed
from psifrac.frac_integral import weight_matrix
from psifrac.grids import Field2D, FracOrder, Grid2D
from psifrac.kernels import PsiKernel
from psifrac.special import gamma_fn

__all__ = [
    "ProblemSpec",
    "SolutionTriple",
    "BieleckiParams",
    "SolveResult",
    "ResidualReport",
    "psi_gamma_weight",
    "w_operator",
    "bielecki_norm",
    "bielecki_distance",
    "picard_solve",
    "residual_check",
]

# residual-ratio slack above L_f/delta before a contraction warning fires
CONTRACTION_MARGIN = 0.1


def psi_gamma_weight(kernel: PsiKernel, gamma: float, t: float) -> float:
    """(psi(t) - psi(0))^(gamma-1) / Gamma(gamma).

    At t = 0 with gamma < 1 the weight is singular; the node is assigned
    the gamma = 1 consistent value 1, so that fields built from finite
    boundary data stay finite (the first interior node carries the
    singular weight).
    """
    if not 0.0 < gamma <= 1.0:
        raise DomainError(f"gamma must lie in (0, 1], got {gamma}")
    span = float(np.asarray(kernel.eval(t))) - float(np.asarray(kernel.eval(0.0)))
    if gamma == 1.0:
        return 1.0
    if span <= 0.0:
        return 1.0
    return span ** (gamma - 1.0) / gamma_fn(gamma)


def _psi_gamma_weights(kernel: PsiKernel, gamma: float, nodes: np.ndarray) -> np.ndarray:
    return np.array([psi_gamma_weight(kernel, gamma, float(t)) for t in nodes])


def w_operator(f: Field2D) -> Field2D:
    """The data-integral in the dummy upper limit: pointwise x * f(x, y)."""
    return Field2D(f.grid, f.grid.x[:, None] * f.values)


@dataclass
class SolutionTriple:
    """(u, u1, u2): the solution and its two fractional derivatives."""

    u: Field2D
    u1: Field2D
    u2: Field2D

    def __post_init__(self):
        g = self.u.grid
        for other in (self.u1.grid, self.u2.grid):
            if other is g:
                continue
            if not (np.array_equal(g.x, other.x) and np.array_equal(g.y, other.y)):
                raise ValidationError("solution components must share one grid")

    @property
    def grid(self) -> Grid2D:
        return self.u.grid


@dataclass(frozen=True)
class BieleckiParams:
    """Weight delta for the norm exp(-delta(x+y)), stopping tol, sweep cap."""

    delta: float
    tol: float = 1e-10
    max_iter: int = 200

    def __post_init__(self):
        if not self.delta > 0.0:
            raise ValidationError(f"delta must be positive, got {self.delta}")
        if not self.tol > 0.0 or self.max_iter < 1:
            raise ValidationError("tol must be positive and max_iter >= 1")


@dataclass
class ProblemSpec:
    """Right-hand side, data arrays, orders, kernel and grid of one problem.

    ``rhs(x, y, u, u1, u2)`` must accept broadcastable arrays.  The
    derivative data entering A2/A3 (g1', g2' in y, h'' in x) are supplied
    as sampled arrays and default to zero.
    """

    rhs: Callable
    lipschitz: Union[float, Field2D]
    data_h: np.ndarray
    data_g1: np.ndarray
    data_g2: np.ndarray
    order: FracOrder
    kernel: PsiKernel
    grid: Grid2D
    data_h_der: np.ndarray | None = None
    data_g1_der: np.ndarray | None = None
    data_g2_der: np.ndarray | None = None

    def __post_init__(self):
        self.data_h = self._on_axis(self.data_h, self.grid.nx, "data_h")
        self.data_g1 = self._on_axis(self.data_g1, self.grid.ny, "data_g1")
        self.data_g2 = self._on_axis(self.data_g2, self.grid.ny, "data_g2")
        self.data_h_der = self._on_axis(
            np.zeros(self.grid.nx) if self.data_h_der is None else self.data_h_der,
            self.grid.nx, "data_h_der")
        self.data_g1_der = self._on_axis(
            np.zeros(self.grid.ny) if self.data_g1_der is None else self.data_g1_der,
            self.grid.ny, "data_g1_der")
        self.data_g2_der = self._on_axis(
            np.zeros(self.grid.ny) if self.data_g2_der is None else self.data_g2_der,
            self.grid.ny, "data_g2_der")
        lf_min = (float(self.lipschitz.values.min())
                  if isinstance(self.lipschitz, Field2D) else float(self.lipschitz))
        if lf_min < 0.0:
            raise ValidationError("Lipschitz constant must be nonnegative")
        self.order.require_pde_range()

    @staticmethod
    def _on_axis(arr, n: int, name: str) -> np.ndarray:
        arr = np.asarray(arr, dtype=np.float64)
        if arr.shape != (n,):
            raise ValidationError(f"{name} must have shape ({n},), got {arr.shape}")
        if not np.isfinite(arr).all():
            raise ValidationError(f"{name} must be finite")
        return arr

    def lipschitz_sup(self) -> float:
        if isinstance(self.lipschitz, Field2D):
            return float(self.lipschitz.values.max())
        return float(self.lipschitz)

    def with_rhs(self, rhs: Callable) -> "ProblemSpec":
        return replace(self, rhs=rhs)


@dataclass
class SolveResult:
    sol: SolutionTriple
    iters: int
    residual_history: np.ndarray
    converged: bool
    contraction_ratio: float = float("nan")
    contraction_violated: bool = False


@dataclass(frozen=True)
class ResidualReport:
    integral: float
    differential: float | None = None


def bielecki_norm(triple: SolutionTriple, delta: float) -> float:
    """max over components of sup |w| exp(-delta(x+y)) on the grid."""
    if delta < 0.0:
        raise ValidationError("delta must be nonnegative")
    X, Y = triple.grid.meshes()
    w = np.exp(-delta * (X + Y))
    return max(
        float(np.abs(c.values * w).max()) for c in (triple.u, triple.u1, triple.u2)
    )


def bielecki_distance(a: SolutionTriple, b: SolutionTriple, delta: float) -> float:
    X, Y = a.grid.meshes()
    w = np.exp(-delta * (X + Y))
    return max(
        float(np.abs((p.values - q.values) * w).max())
        for p, q in ((a.u, b.u), (a.u1, b.u1), (a.u2, b.u2))
    )


class _PicardMap:
    """Precomputed weight matrices and data terms of the operator A."""

    def __init__(self, p: ProblemSpec):
        g = p.grid
        self.X, self.Y = g.meshes()
        self.Wx = weight_matrix(p.kernel, p.order.alpha1, g.x) / gamma_fn(p.order.alpha1)
        self.Wy = weight_matrix(p.kernel, p.order.alpha2, g.y) / gamma_fn(p.order.alpha2)
        self.WyT = self.Wy.T.copy()
        px = _psi_gamma_weights(p.kernel, p.order.gamma1, g.x)
        py = _psi_gamma_weights(p.kernel, p.order.gamma2, g.y)
        xpx = g.x * px
        self.D1 = (
            p.data_h[:, None] * py[None, :]
            + px[:, None] * p.data_g1[None, :]
            + xpx[:, None] * p.data_g2[None, :]
        )
        self.D2 = px[:, None] * p.data_g1_der[None, :] + xpx[:, None] * p.data_g2_der[None, :]
        self.D3 = p.data_h_der[:, None] * py[None, :]
        self.rhs = p.rhs

    def rhs_values(self, t: SolutionTriple) -> np.ndarray:
        F = np.asarray(
            self.rhs(self.X, self.Y, t.u.values, t.u1.values, t.u2.values),
            dtype=np.float64,
        )
        F = np.broadcast_to(F, t.u.values.shape)
        if not np.isfinite(F).all():
            raise ValidationError("rhs produced non-finite values")
        return F

    def seed(self, grid: Grid2D) -> SolutionTriple:
        return SolutionTriple(
            Field2D(grid, self.D1.copy()),
            Field2D(grid, self.D2.copy()),
            Field2D(grid, self.D3.copy()),
        )

    def apply(self, t: SolutionTriple) -> SolutionTriple:
        F = self.rhs_values(t)
        WF = self.X * F
        g = t.grid
        a1 = self.D1 + (self.Wx @ WF) @ self.WyT
        a2 = self.D2 + self.Wx @ WF
        a3 = self.D3 + F @ self.WyT
        return SolutionTriple(Field2D(g, a1), Field2D(g, a2), Field2D(g, a3))


def picard_solve(
    p: ProblemSpec,
    bp: BieleckiParams,
    initial: SolutionTriple | None = None,
    strict: bool = True,
) -> SolveResult:
    """Iterate the integral map from the data-only seed until the Bielecki
    distance of successive triples drops below tol.

    Raises NonconvergenceError when max_iter is exhausted (strict mode;
    otherwise the unconverged result is returned), and warns if observed
    residual ratios exceed L_f/delta + CONTRACTION_MARGIN.
    """
    lf = p.lipschitz_sup()
    if not bp.delta > lf:
        raise ValidationError(
            f"Bielecki delta must exceed sup L_f for contraction: {bp.delta} <= {lf}"
        )
    amap = _PicardMap(p)
    current = initial if initial is not None else amap.seed(p.grid)
    history: list[float] = []
    converged = False
    for _ in range(bp.max_iter):
        nxt = amap.apply(current)
        res = bielecki_distance(nxt, current, bp.delta)
        history.append(res)
        current = nxt
        if res < bp.tol:
            converged = True
            break
    ratios = [
        history[i] / history[i - 1]
        for i in range(1, len(history))
        if history[i - 1] > 1e3 * np.finfo(float).tiny
    ]
    ratio = max(ratios) if ratios else float("nan")
    violated = bool(ratios and ratio > lf / bp.delta + CONTRACTION_MARGIN)
    if violated:
        warnings.warn(
            f"residual ratio {ratio:.3g} exceeds L_f/delta + margin "
            f"({lf / bp.delta:.3g} + {CONTRACTION_MARGIN})",
            ContractionWarning,
        )
    result = SolveResult(current, len(history), np.array(history), converged, ratio, violated)
    if not converged and strict:
        raise NonconvergenceError(
            f"Picard iteration: residual {history[-1]:.3e} above tol {bp.tol} "
            f"after {bp.max_iter} iterations",
            result=result,
        )
    return result


def residual_check(
    p: ProblemSpec, sol: SolutionTriple, differential: bool = False
) -> ResidualReport:
    """Sup of |sol - A(sol)| (componentwise max), optionally plus the
    differential-form residual |hilfer_mixed(u) - f(x,y,u,u1,u2)|."""
    amap = _PicardMap(p)
    image = amap.apply(sol)
    integral = max(
        float(np.abs(a.values - b.values).max())
        for a, b in ((sol.u, image.u), (sol.u1, image.u1), (sol.u2, image.u2))
    )
    diff = None
    if differential:
        lhs = hilfer_mixed(p.kernel, p.order, sol.u)
        rhs = amap.rhs_values(sol)
        diff = float(np.abs(lhs.values - rhs).max())
    return ResidualReport(integral, diff)
