"""psifrac: psi-parametrized fractional operators, a Picard solver for the
pseudoparabolic integral system, the psi-Gronwall bound, and Ulam-Hyers /
generalized Ulam-Hyers-Rassias stability certification."""

from psifrac._exceptions import (
    ContractionWarning,
    DomainError,
    NonconvergenceError,
    PsifracError,
    ValidationError,
)
from psifrac.certifier import (
    UHCertificate,
    UHRCertificate,
    certify_uh,
    certify_uhr,
    estimate_lambdas,
    perturb_and_solve,
    uh_constants,
    uhr_constants,
)
from psifrac.frac_derivative import hilfer_dx, hilfer_mixed
from psifrac.frac_integral import frac_int_2d, frac_int_x, frac_int_y, weight_matrix
from psifrac.grids import Field2D, FracOrder, Grid2D
from psifrac.gronwall import (
    GronwallData,
    GronwallReport,
    check_gronwall,
    gronwall_bound,
    volterra_equality_solution,
)
from psifrac.kernels import PsiKernel, make_builtin, parse_kernel_spec, psi_infinity, validate
from psifrac.solver import (
    BieleckiParams,
    ProblemSpec,
    ResidualReport,
    SolutionTriple,
    SolveResult,
    bielecki_norm,
    picard_solve,
    psi_gamma_weight,
    residual_check,
    w_operator,
)
from psifrac.special import MLParams, gamma_fn, mittag_leffler

__version__ = "0.1.0"

__all__ = [
    "BieleckiParams",
    "ContractionWarning",
    "DomainError",
    "Field2D",
    "FracOrder",
    "Grid2D",
    "GronwallData",
    "GronwallReport",
    "MLParams",
    "NonconvergenceError",
    "ProblemSpec",
    "PsiKernel",
    "PsifracError",
    "ResidualReport",
    "SolutionTriple",
    "SolveResult",
    "UHCertificate",
    "UHRCertificate",
    "ValidationError",
    "bielecki_norm",
    "certify_uh",
    "certify_uhr",
    "check_gronwall",
    "estimate_lambdas",
    "frac_int_2d",
    "frac_int_x",
    "frac_int_y",
    "gamma_fn",
    "gronwall_bound",
    "hilfer_dx",
    "hilfer_mixed",
    "make_builtin",
    "mittag_leffler",
    "parse_kernel_spec",
    "perturb_and_solve",
    "picard_solve",
    "psi_gamma_weight",
    "psi_infinity",
    "residual_check",
    "uh_constants",
    "uhr_constants",
    "validate",
    "volterra_equality_solution",
    "w_operator",
    "weight_matrix",
]
