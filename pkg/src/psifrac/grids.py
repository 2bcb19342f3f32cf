"""Tensor-product grids on [0,a]x[0,b], scalar fields on them, and orders.

Fields are stored as (nx, ny) arrays, row-major in x then y; the CSV
serialization (header ``x,y,value``) follows the same ordering and writes
shortest round-trip decimals so reruns are byte-identical.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from psifrac._exceptions import ValidationError

__all__ = ["Grid2D", "Field2D", "FracOrder"]

# min(alpha1, alpha2) must exceed this before the solver/certifier touch a problem
PDE_ALPHA_MIN = 2.0 / 3.0


@dataclass(frozen=True)
class Grid2D:
    """Strictly increasing node arrays with x[0]=0, x[-1]=a (same in y)."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        for name, nodes in (("x", self.x), ("y", self.y)):
            nodes = np.asarray(nodes, dtype=np.float64)
            object.__setattr__(self, name, nodes)
            if nodes.ndim != 1 or nodes.size < 2:
                raise ValidationError(f"{name}-nodes must be a 1D array with >= 2 entries")
            if nodes[0] != 0.0:
                raise ValidationError(f"{name}-nodes must start exactly at 0")
            if not np.all(np.diff(nodes) > 0.0):
                raise ValidationError(f"{name}-nodes must be strictly increasing")

    @property
    def a(self) -> float:
        return float(self.x[-1])

    @property
    def b(self) -> float:
        return float(self.y[-1])

    @property
    def nx(self) -> int:
        return self.x.size

    @property
    def ny(self) -> int:
        return self.y.size

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx, self.ny)

    def meshes(self) -> tuple[np.ndarray, np.ndarray]:
        """Broadcastable coordinate arrays X (nx,1) and Y (1,ny)."""
        return self.x[:, None], self.y[None, :]

    @classmethod
    def uniform(cls, a: float, b: float, nx: int, ny: int) -> "Grid2D":
        return cls(a * np.linspace(0.0, 1.0, nx), b * np.linspace(0.0, 1.0, ny))

    @classmethod
    def graded(cls, a, b, nx, ny, power_x: float = 2.0, power_y: float = 2.0) -> "Grid2D":
        """Nodes clustered at the singular corner: t_k = T (k/(n-1))^power."""
        return cls(
            a * np.linspace(0.0, 1.0, nx) ** power_x,
            b * np.linspace(0.0, 1.0, ny) ** power_y,
        )

    def coarsen(self) -> "Grid2D":
        """Every-other-node subgrid (endpoints kept) for refinement probes."""
        ix = _subsample_idx(self.nx)
        iy = _subsample_idx(self.ny)
        return Grid2D(self.x[ix], self.y[iy])


def _subsample_idx(n: int) -> np.ndarray:
    if n % 2 == 1:
        return np.arange(0, n, 2)
    idx = np.unique(np.round(np.linspace(0, n - 1, (n + 1) // 2)).astype(int))
    return idx


@dataclass
class Field2D:
    """Scalar samples on a Grid2D; values[i, j] = f(x_i, y_j)."""

    grid: Grid2D
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != self.grid.shape:
            raise ValidationError(
                f"field shape {self.values.shape} does not match grid {self.grid.shape}"
            )
        if not np.isfinite(self.values).all():
            raise ValidationError("field values must be finite")

    @classmethod
    def from_function(cls, grid: Grid2D, fn: Callable) -> "Field2D":
        X, Y = grid.meshes()
        return cls(grid, np.broadcast_to(np.asarray(fn(X, Y), dtype=np.float64), grid.shape).copy())

    @classmethod
    def constant(cls, grid: Grid2D, c: float) -> "Field2D":
        return cls(grid, np.full(grid.shape, float(c)))

    def copy(self) -> "Field2D":
        return Field2D(self.grid, self.values.copy())

    def sup(self) -> float:
        return float(np.abs(self.values).max())

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("x,y,value\n")
            for i, xv in enumerate(self.grid.x):
                for j, yv in enumerate(self.grid.y):
                    fh.write(f"{float(xv)!r},{float(yv)!r},{float(self.values[i, j])!r}\n")

    @classmethod
    def read_csv(cls, path) -> "Field2D":
        xs: list[float] = []
        ys: list[float] = []
        vals: list[float] = []
        with open(path, "r", encoding="utf-8") as fh:
            header = fh.readline().strip()
            if header != "x,y,value":
                raise ValidationError(f"expected CSV header 'x,y,value', got {header!r}")
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                sx, sy, sv = line.split(",")
                xs.append(float(sx))
                ys.append(float(sy))
                vals.append(float(sv))
        ux = np.unique(np.array(xs))
        uy = np.unique(np.array(ys))
        if ux.size * uy.size != len(vals):
            raise ValidationError("CSV rows do not form a full tensor grid")
        grid = Grid2D(ux, uy)
        values = np.array(vals).reshape(ux.size, uy.size)
        expect_x = np.repeat(ux, uy.size)
        if not np.array_equal(expect_x, np.array(xs)):
            raise ValidationError("CSV rows must be row-major in x then y")
        return cls(grid, values)


@dataclass(frozen=True)
class FracOrder:
    """Per-axis orders alpha_i in (0,1] and the Hilfer type beta in [0,1].

    gamma_i = alpha_i + beta (1 - alpha_i) is derived, never stored.
    """

    alpha1: float
    alpha2: float
    beta: float

    def __post_init__(self):
        for name, a in (("alpha1", self.alpha1), ("alpha2", self.alpha2)):
            if not 0.0 < a <= 1.0:
                raise ValidationError(f"{name} must lie in (0, 1], got {a}")
        if not 0.0 <= self.beta <= 1.0:
            raise ValidationError(f"beta must lie in [0, 1], got {self.beta}")

    @classmethod
    def isotropic(cls, alpha: float, beta: float) -> "FracOrder":
        return cls(alpha, alpha, beta)

    @property
    def gamma1(self) -> float:
        return self.alpha1 + self.beta * (1.0 - self.alpha1)

    @property
    def gamma2(self) -> float:
        return self.alpha2 + self.beta * (1.0 - self.alpha2)

    @property
    def alpha_min(self) -> float:
        return min(self.alpha1, self.alpha2)

    def require_pde_range(self) -> None:
        """The pseudoparabolic problem needs 2/3 < alpha; operators do not."""
        if not self.alpha_min > PDE_ALPHA_MIN:
            raise ValidationError(
                f"solver requires 2/3 < alpha <= 1 per axis, got "
                f"({self.alpha1}, {self.alpha2})"
            )
