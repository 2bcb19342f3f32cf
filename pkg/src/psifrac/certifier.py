"""Ulam-Hyers and generalized Ulam-Hyers-Rassias stability certification.

The theoretical constants amplify the perturbation envelope by a
Mittag-Leffler Gronwall factor:

    C1 = a S_ab / (G(a1+1) G(a2+1)) * E[ L a G(a1) G(a2) S_ab ]
    C2 = a Sa / G(a1+1)             * E[ L a G(a1) Sa ]
    C3 = Sb / G(a2+1)               * E[ L Sb ]

with Sa = (psi(a)-psi(0))^a1, Sb = (psi(b)-psi(0))^a2, S_ab = Sa Sb and
E = E_alpha at alpha = min(a1, a2) (recorded in the certificate).  The
Rassias variant replaces the uniform envelope epsilon by a comparison
field phi and the extent factors by psi(inf) spans, which requires a
bounded kernel.

Certification is empirical: admissible perturbations g (|g| <= eps, or
|g| <= phi) are injected into the right-hand side, the perturbed and the
matched unperturbed problems are solved, and the measured deviations are
compared against the constants.  The three integral-inequality residual
checks of the perturbed solution are reported alongside as diagnostics.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from psifrac._exceptions import ValidationError
from psifrac.frac_integral import frac_int_2d, frac_int_x, frac_int_y
from psifrac.grids import Field2D, FracOrder
from psifrac.kernels import PsiKernel, psi_infinity
from psifrac.solver import (
    BieleckiParams,
    ProblemSpec,
    SolveResult,
    _PicardMap,
    picard_solve,
)
from psifrac.special import MLParams, gamma_fn, mittag_leffler

__all__ = [
    "UHCertificate",
    "UHRCertificate",
    "uh_constants",
    "uhr_constants",
    "estimate_lambdas",
    "perturb_and_solve",
    "certify_uh",
    "certify_uhr",
    "write_certificate",
]

# verdict slack, strictly below the discretization budget at default grids
VERDICT_TOL_ABS = 1e-8
VERDICT_TOL_REL = 1e-6

# lambda sups growing by more than this under refinement flag infeasibility
LAMBDA_GROWTH_CAP = 1.5


def _ml(order: FracOrder, z: float) -> float:
    return mittag_leffler(MLParams(alpha=order.alpha_min), z)


def uh_constants(
    L_f: float, a: float, b: float, order: FracOrder, kernel: PsiKernel
) -> tuple[float, float, float]:
    """Theoretical Ulam-Hyers constants (C1, C2, C3) for finite extents."""
    if L_f < 0.0:
        raise ValidationError("L_f must be nonnegative")
    if not (a > 0.0 and b > 0.0 and np.isfinite(a) and np.isfinite(b)):
        raise ValidationError("extents a, b must be positive and finite")
    a1, a2 = order.alpha1, order.alpha2
    psi0 = float(np.asarray(kernel.eval(0.0)))
    sa = (float(np.asarray(kernel.eval(a))) - psi0) ** a1
    sb = (float(np.asarray(kernel.eval(b))) - psi0) ** a2
    g1, g2 = gamma_fn(a1), gamma_fn(a2)
    c1 = a * sb * sa / (gamma_fn(a1 + 1.0) * gamma_fn(a2 + 1.0)) * _ml(
        order, L_f * a * g1 * g2 * sb * sa
    )
    c2 = a * sa / gamma_fn(a1 + 1.0) * _ml(order, L_f * a * sa * g1)
    c3 = sb / gamma_fn(a2 + 1.0) * _ml(order, L_f * sb)
    return c1, c2, c3


def uhr_constants(
    L_f: Union[float, Field2D],
    lambdas: tuple[float, float, float],
    order: FracOrder,
    kernel: PsiKernel,
    x_sup: float | None = None,
) -> tuple[float, float, float]:
    """Rassias constants: lambda_i amplified by E at the psi(inf) spans.

    The data-integral factor is realized as the sup of x * L_f(x, y): over
    the field's grid when L_f is sampled, else x_sup (default: the
    kernel's domain cap).
    """
    l1, l2, l3 = lambdas
    if min(l1, l2, l3) <= 0.0:
        raise ValidationError("lambdas must be positive")
    pinf = psi_infinity(kernel) - float(np.asarray(kernel.eval(0.0)))
    a1, a2 = order.alpha1, order.alpha2
    if isinstance(L_f, Field2D):
        xl = float((L_f.grid.x[:, None] * L_f.values).max())
        lsup = float(L_f.values.max())
    else:
        if L_f < 0.0:
            raise ValidationError("L_f must be nonnegative")
        cap = kernel.t_hi if x_sup is None else float(x_sup)
        xl = cap * float(L_f)
        lsup = float(L_f)
    sa = pinf**a1
    sb = pinf**a2
    c1 = l1 * _ml(order, xl * gamma_fn(a1) * gamma_fn(a2) * sa * sb)
    c2 = l2 * _ml(order, xl * gamma_fn(a1) * sa)
    c3 = l3 * _ml(order, lsup * sb)
    return c1, c2, c3


def _lambda_sups(phi: Field2D, order: FracOrder, kernel: PsiKernel) -> tuple[float, float, float]:
    x = phi.grid.x[:, None]
    i2 = frac_int_2d(kernel, order, phi).values
    ix = frac_int_x(kernel, order.alpha1, phi).values
    iy = frac_int_y(kernel, order.alpha2, phi).values
    interior = (slice(1, None), slice(1, None))
    pv = phi.values[interior]
    l1 = float(((x * i2)[interior] / pv).max())
    l2 = float(((x * ix)[interior] / pv).max())
    l3 = float((iy[interior] / pv).max())
    return l1, l2, l3


def estimate_lambdas(
    phi: Field2D, order: FracOrder, kernel: PsiKernel
) -> tuple[float, float, float, bool]:
    """Smallest observed lambda_i with I(W phi) <= lambda_i phi on interior nodes.

    The data-integral is majorized by x * I(phi) (the reading used in the
    stability proofs), so the sups are conservative.  Feasibility fails on
    non-finite sups, nonpositive interior phi, or sups that grow by more
    than LAMBDA_GROWTH_CAP from the coarsened grid to the full one.
    """
    if phi.values[1:, 1:].min() <= 0.0:
        raise ValidationError("phi must be positive on interior nodes")
    l1, l2, l3 = _lambda_sups(phi, order, kernel)
    cg = phi.grid.coarsen()
    ix = np.searchsorted(phi.grid.x, cg.x)
    iy = np.searchsorted(phi.grid.y, cg.y)
    coarse = Field2D(cg, phi.values[np.ix_(ix, iy)])
    c1, c2, c3 = _lambda_sups(coarse, order, kernel)
    feasible = all(np.isfinite(v) for v in (l1, l2, l3)) and all(
        fine <= LAMBDA_GROWTH_CAP * coarse + 1e-12
        for fine, coarse in ((l1, c1), (l2, c2), (l3, c3))
    )
    return l1, l2, l3, bool(feasible)


def perturb_and_solve(
    p: ProblemSpec,
    g: Field2D,
    bp: BieleckiParams,
    epsilon: float | None = None,
    phi: Field2D | None = None,
) -> SolveResult:
    """Solve with right-hand side f + g after verifying g's declared envelope."""
    if (epsilon is None) == (phi is None):
        raise ValidationError("declare exactly one bound mode: epsilon or phi")
    if g.grid.shape != p.grid.shape:
        raise ValidationError("perturbation grid must match the problem grid")
    if epsilon is not None:
        if not epsilon > 0.0:
            raise ValidationError("epsilon must be positive")
        if g.sup() > epsilon * (1.0 + 1e-12):
            raise ValidationError(
                f"perturbation exceeds epsilon envelope: sup|g| = {g.sup():.3e} > {epsilon}"
            )
    else:
        if np.any(np.abs(g.values) > phi.values * (1.0 + 1e-12)):
            raise ValidationError("perturbation exceeds phi envelope pointwise")
    base = p.rhs
    gv = g.values

    def perturbed(x, y, u, u1, u2):
        return base(x, y, u, u1, u2) + gv

    return picard_solve(p.with_rhs(perturbed), bp)


def _perturbation(grid, scale: np.ndarray | float, index: int, rng: np.random.Generator) -> np.ndarray:
    """Adversarial battery: constants, checkerboards, rows, then random."""
    nx, ny = grid.shape
    i = np.arange(nx)[:, None]
    j = np.arange(ny)[None, :]
    kind = index if index < 5 else 4
    if kind == 0:
        pattern = np.ones((nx, ny))
    elif kind == 1:
        pattern = -np.ones((nx, ny))
    elif kind == 2:
        pattern = np.where((i + j) % 2 == 0, 1.0, -1.0)
    elif kind == 3:
        pattern = np.broadcast_to(np.where(i % 2 == 0, 1.0, -1.0), (nx, ny))
    else:
        pattern = rng.uniform(-1.0, 1.0, size=(nx, ny))
    return pattern * scale


@dataclass
class UHCertificate:
    epsilon: float
    constants: tuple[float, float, float]
    measured: tuple[float, float, float]
    verdicts: tuple[bool, bool, bool]
    diagnostics: tuple[bool, bool, bool]
    trials: int
    seed: int
    ml_alpha: float
    failures: list = field(default_factory=list)

    @property
    def all_ok(self) -> bool:
        return all(self.verdicts) and all(self.diagnostics) and not self.failures

    def to_json_dict(self) -> dict:
        return {
            "mode": "uh",
            "seed": self.seed,
            "epsilon": self.epsilon,
            "constants": dict(zip(("c1", "c2", "c3"), self.constants)),
            "measured": dict(zip(("m1", "m2", "m3"), self.measured)),
            "verdicts": list(self.verdicts),
            "diagnostics": list(self.diagnostics),
            "trials": self.trials,
            "failures": list(self.failures),
            "ml_alpha": self.ml_alpha,
        }


@dataclass
class UHRCertificate:
    phi_ref: str
    lambdas: tuple[float, float, float]
    constants: tuple[float, float, float]
    measured: tuple[float, float, float]
    verdicts: tuple[bool, bool, bool]
    diagnostics: tuple[bool, bool, bool]
    trials: int
    seed: int
    ml_alpha: float
    feasible: bool = True
    failures: list = field(default_factory=list)

    @property
    def all_ok(self) -> bool:
        return (
            self.feasible
            and all(self.verdicts)
            and all(self.diagnostics)
            and not self.failures
        )

    def to_json_dict(self) -> dict:
        return {
            "mode": "uhr",
            "seed": self.seed,
            "phi_ref": self.phi_ref,
            "lambdas": dict(zip(("l1", "l2", "l3"), self.lambdas)),
            "constants": dict(zip(("c1", "c2", "c3"), self.constants)),
            "measured": dict(zip(("m1", "m2", "m3"), self.measured)),
            "verdicts": list(self.verdicts),
            "diagnostics": list(self.diagnostics),
            "trials": self.trials,
            "failures": list(self.failures),
            "ml_alpha": self.ml_alpha,
            "feasible": self.feasible,
        }


def _deviations(v: "SolveResult", u: "SolveResult") -> tuple[float, float, float]:
    return (
        float(np.abs(v.sol.u.values - u.sol.u.values).max()),
        float(np.abs(v.sol.u1.values - u.sol.u1.values).max()),
        float(np.abs(v.sol.u2.values - u.sol.u2.values).max()),
    )


def _remark_residuals(p: ProblemSpec, v: "SolveResult") -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """|v_i - data_i - integral term at the unperturbed f|, per node."""
    amap = _PicardMap(p)
    F = amap.rhs_values(v.sol)
    WF = amap.X * F
    r1 = np.abs(v.sol.u.values - amap.D1 - (amap.Wx @ WF) @ amap.WyT)
    r2 = np.abs(v.sol.u1.values - amap.D2 - amap.Wx @ WF)
    r3 = np.abs(v.sol.u2.values - amap.D3 - F @ amap.WyT)
    return r1, r2, r3


def _uh_envelopes(p: ProblemSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Kernel factors of the three integral inequalities (per node, times eps)."""
    X, Y = p.grid.meshes()
    psi0 = float(np.asarray(p.kernel.eval(0.0)))
    sx = (np.asarray(p.kernel.eval(p.grid.x), dtype=float) - psi0) ** p.order.alpha1
    sy = (np.asarray(p.kernel.eval(p.grid.y), dtype=float) - psi0) ** p.order.alpha2
    ga1 = gamma_fn(p.order.alpha1 + 1.0)
    ga2 = gamma_fn(p.order.alpha2 + 1.0)
    e1 = X * sx[:, None] * sy[None, :] / (ga1 * ga2)
    e2 = X * sx[:, None] / ga1 * np.ones_like(Y)
    e3 = sy[None, :] / ga2 * np.ones_like(X)
    return e1, e2, e3


def _diag_tol(bp: BieleckiParams, p: ProblemSpec, envelope: np.ndarray) -> np.ndarray:
    # converged Bielecki residual tol unweights to tol * exp(delta(x+y))
    unweight = float(np.exp(bp.delta * (p.grid.a + p.grid.b)))
    return VERDICT_TOL_ABS + VERDICT_TOL_REL * envelope + 10.0 * bp.tol * unweight


def certify_uh(
    p: ProblemSpec,
    bp: BieleckiParams,
    epsilon: float,
    trials: int,
    seed: int = 0,
) -> UHCertificate:
    """Worst-case deviations over adversarial eps-perturbations vs the constants."""
    if trials < 1:
        raise ValidationError("trials must be >= 1")
    if not epsilon > 0.0:
        raise ValidationError("epsilon must be positive")
    constants = uh_constants(p.lipschitz_sup(), p.grid.a, p.grid.b, p.order, p.kernel)
    base = picard_solve(p, bp)
    e1, e2, e3 = _uh_envelopes(p)
    rng = np.random.default_rng(seed)
    measured = [0.0, 0.0, 0.0]
    diagnostics = [True, True, True]
    failures: list[str] = []
    for t in range(trials):
        g = Field2D(p.grid, _perturbation(p.grid, epsilon, t, rng))
        try:
            v = perturb_and_solve(p, g, bp, epsilon=epsilon)
        except Exception as exc:  # solver failures recorded, not fatal
            failures.append(f"trial {t}: {exc}")
            continue
        devs = _deviations(v, base)
        measured = [max(m, d) for m, d in zip(measured, devs)]
        r1, r2, r3 = _remark_residuals(p, v)
        for idx, (r, env) in enumerate(((r1, e1), (r2, e2), (r3, e3))):
            if np.any(r > epsilon * env + _diag_tol(bp, p, epsilon * env)):
                diagnostics[idx] = False
    verdicts = tuple(
        m <= c * epsilon + VERDICT_TOL_ABS + VERDICT_TOL_REL * c * epsilon
        for m, c in zip(measured, constants)
    )
    return UHCertificate(
        epsilon=epsilon,
        constants=constants,
        measured=tuple(measured),
        verdicts=verdicts,
        diagnostics=tuple(diagnostics),
        trials=trials,
        seed=seed,
        ml_alpha=p.order.alpha_min,
        failures=failures,
    )


def certify_uhr(
    p: ProblemSpec,
    bp: BieleckiParams,
    phi: Field2D,
    trials: int,
    seed: int = 0,
    phi_ref: str = "phi",
) -> UHRCertificate:
    """Pointwise phi-envelope certification (generalized Rassias-type stability)."""
    if trials < 1:
        raise ValidationError("trials must be >= 1")
    l1, l2, l3, feasible = estimate_lambdas(phi, p.order, p.kernel)
    if not feasible:
        raise ValidationError("phi is infeasible: lambda sups diverge under refinement")
    constants = uhr_constants(
        p.lipschitz, (l1, l2, l3), p.order, p.kernel, x_sup=p.grid.a
    )
    base = picard_solve(p, bp)
    # Rassias diagnostics: residual_i <= I(W phi) pointwise (third: no W)
    w_phi = Field2D(phi.grid, phi.grid.x[:, None] * phi.values)
    d1 = frac_int_2d(p.kernel, p.order, w_phi).values
    d2 = frac_int_x(p.kernel, p.order.alpha1, w_phi).values
    d3 = frac_int_y(p.kernel, p.order.alpha2, phi).values
    rng = np.random.default_rng(seed)
    measured = [0.0, 0.0, 0.0]
    diagnostics = [True, True, True]
    failures: list[str] = []
    dev_fields = [np.zeros(p.grid.shape) for _ in range(3)]
    for t in range(trials):
        g = Field2D(p.grid, _perturbation(p.grid, phi.values, t, rng))
        try:
            v = perturb_and_solve(p, g, bp, phi=phi)
        except Exception as exc:
            failures.append(f"trial {t}: {exc}")
            continue
        for idx, (vc, uc) in enumerate(
            ((v.sol.u, base.sol.u), (v.sol.u1, base.sol.u1), (v.sol.u2, base.sol.u2))
        ):
            dev = np.abs(vc.values - uc.values)
            dev_fields[idx] = np.maximum(dev_fields[idx], dev)
            measured[idx] = max(measured[idx], float(dev.max()))
        r1, r2, r3 = _remark_residuals(p, v)
        for idx, (r, env) in enumerate(((r1, d1), (r2, d2), (r3, d3))):
            if np.any(r > env + _diag_tol(bp, p, env)):
                diagnostics[idx] = False
    verdicts = tuple(
        bool(
            np.all(
                dev <= c * phi.values + VERDICT_TOL_ABS + VERDICT_TOL_REL * c * phi.values
            )
        )
        for dev, c in zip(dev_fields, constants)
    )
    return UHRCertificate(
        phi_ref=phi_ref,
        lambdas=(l1, l2, l3),
        constants=constants,
        measured=tuple(measured),
        verdicts=verdicts,
        diagnostics=tuple(diagnostics),
        trials=trials,
        seed=seed,
        ml_alpha=p.order.alpha_min,
        feasible=feasible,
    )


def write_certificate(cert, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(cert.to_json_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
