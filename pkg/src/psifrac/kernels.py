"""Weight functions psi that parametrize every fractional operator.

A kernel carries psi, its analytic derivative, and the closed interval it
was validated on.  Construction probes a 1024-point grid for strict
monotonicity, positive derivative and finite-difference consistency, and
rejects kernels that fail: a bad psi would otherwise surface as NaNs deep
inside the quadrature.  Kernels are immutable and thread-safe.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from psifrac._exceptions import ValidationError

__all__ = [
    "PsiKernel",
    "ValidationReport",
    "make_builtin",
    "parse_kernel_spec",
    "validate",
    "psi_infinity",
]

DEFAULT_T_HI = 50.0

# 1 - exp(-t) saturates to 1.0 in doubles near t ~ 34, where the strict
# monotonicity probe would see zero steps; cap the default domain below that.
BOUNDED_EXP_T_HI = 30.0

PROBE_POINTS = 1024

# |central difference - psi'| <= FD_TOL * (1 + |psi'|) on the probe grid
FD_TOL = 1e-5


@dataclass(frozen=True)
class ValidationReport:
    """Probe-grid findings; an all-empty report means the kernel is valid."""

    monotonicity_violations: list = field(default_factory=list)
    nonpositive_derivative: list = field(default_factory=list)
    derivative_mismatch: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (
            self.monotonicity_violations
            or self.nonpositive_derivative
            or self.derivative_mismatch
        )


@dataclass(frozen=True)
class PsiKernel:
    """Increasing weight function with analytic derivative on [t_lo, t_hi]."""

    name: str
    eval: Callable[[np.ndarray], np.ndarray]
    deriv: Callable[[np.ndarray], np.ndarray]
    t_lo: float
    t_hi: float

    def __post_init__(self):
        if not self.t_lo >= 0.0:
            raise ValidationError(f"kernel domain must start at t >= 0, got {self.t_lo}")
        if not self.t_hi > self.t_lo:
            raise ValidationError("kernel domain must have positive length")
        report = validate(self, PROBE_POINTS)
        if not report.ok:
            raise ValidationError(f"kernel {self.name!r} failed validation: {report}")


def validate(kernel, probe_points: int = PROBE_POINTS) -> ValidationReport:
    """Probe monotonicity, derivative positivity and FD consistency.

    The t_lo endpoint is excluded from the derivative probes: kernels like
    power(0.5) blow up there while their integrals stay well defined.
    """
    if probe_points < 2:
        raise ValidationError("probe_points must be >= 2")
    t = np.linspace(kernel.t_lo, kernel.t_hi, probe_points)
    vals = np.asarray(kernel.eval(t), dtype=float)
    mono = [
        (t[i], t[i + 1])
        for i in np.nonzero(~(np.diff(vals) > 0.0))[0]
    ]
    interior = t[1:]
    dv = np.asarray(kernel.deriv(interior), dtype=float)
    nonpos = [float(ti) for ti, d in zip(interior, dv) if not d > 0.0 or not np.isfinite(d)]
    h = (kernel.t_hi - kernel.t_lo) * 1e-7
    safe = interior[(interior - h > kernel.t_lo) & (interior + h < kernel.t_hi)]
    fd = (np.asarray(kernel.eval(safe + h)) - np.asarray(kernel.eval(safe))) / h
    dv_safe = np.asarray(kernel.deriv(safe + 0.5 * h), dtype=float)
    bad = np.abs(fd - dv_safe) > FD_TOL * (1.0 + np.abs(dv_safe))
    mismatch = [float(ti) for ti in safe[bad]]
    return ValidationReport(mono, nonpos, mismatch)


def make_builtin(name: str, rho: float | None = None, t_hi: float = DEFAULT_T_HI) -> PsiKernel:
    """Construct one of the built-in kernels on [0, t_hi].

    identity    psi(t) = t
    power       psi(t) = t^rho, rho > 0
    log_shift   psi(t) = ln(1 + t)
    bounded_exp psi(t) = 1 - exp(-t)   (bounded: psi(inf) = 1)
    """
    if name == "identity":
        return PsiKernel("identity", lambda t: np.asarray(t, dtype=float) + 0.0,
                         lambda t: np.ones_like(np.asarray(t, dtype=float)), 0.0, t_hi)
    if name == "power":
        if rho is None or not rho > 0.0:
            raise ValidationError(f"power kernel requires rho > 0, got {rho}")
        r = float(rho)
        return PsiKernel(
            f"power:{r:g}",
            lambda t, r=r: np.asarray(t, dtype=float) ** r,
            lambda t, r=r: r * np.asarray(t, dtype=float) ** (r - 1.0),
            0.0,
            t_hi,
        )
    if name == "log_shift":
        return PsiKernel("log_shift", lambda t: np.log1p(np.asarray(t, dtype=float)),
                         lambda t: 1.0 / (1.0 + np.asarray(t, dtype=float)), 0.0, t_hi)
    if name == "bounded_exp":
        if t_hi == DEFAULT_T_HI:
            t_hi = BOUNDED_EXP_T_HI
        return PsiKernel("bounded_exp", lambda t: -np.expm1(-np.asarray(t, dtype=float)),
                         lambda t: np.exp(-np.asarray(t, dtype=float)), 0.0, t_hi)
    raise ValidationError(f"unknown kernel name {name!r}")


def parse_kernel_spec(spec: str, t_hi: float = DEFAULT_T_HI) -> PsiKernel:
    """Parse the config syntax: identity | power:RHO | log_shift | bounded_exp."""
    spec = spec.strip()
    if spec.startswith("power:"):
        return make_builtin("power", rho=float(spec.split(":", 1)[1]), t_hi=t_hi)
    return make_builtin(spec, t_hi=t_hi)


def psi_infinity(kernel: PsiKernel, tol: float = 1e-6) -> float:
    """psi(inf) estimated at the domain cap; errors if not converged to tol."""
    half = float(np.asarray(kernel.eval(kernel.t_hi / 2.0)))
    full = float(np.asarray(kernel.eval(kernel.t_hi)))
    if abs(full - half) > tol:
        raise ValidationError(
            f"kernel {kernel.name!r} is not bounded: psi({kernel.t_hi}) - "
            f"psi({kernel.t_hi / 2}) = {full - half:.3e} > {tol}"
        )
    return full
