import numpy as np
import pytest

from psifrac import ValidationError, make_builtin, parse_kernel_spec, psi_infinity, validate
from psifrac.kernels import PsiKernel


def test_identity_eval():
    k = make_builtin("identity")
    assert float(k.eval(2.5)) == 2.5


def test_power_deriv():
    k = make_builtin("power", rho=2.0)
    assert float(k.deriv(3.0)) == pytest.approx(6.0, rel=1e-14)


def test_bounded_exp_limit():
    k = make_builtin("bounded_exp")
    assert float(k.eval(50.0)) == pytest.approx(1.0, abs=1e-20)


def test_builtins_all_validate():
    for k in (make_builtin("identity"), make_builtin("power", rho=0.5),
              make_builtin("power", rho=2.5), make_builtin("log_shift"),
              make_builtin("bounded_exp")):
        assert validate(k, 100).ok


def test_decreasing_kernel_rejected():
    with pytest.raises(ValidationError):
        PsiKernel("negate", lambda t: -np.asarray(t, dtype=float),
                  lambda t: -np.ones_like(np.asarray(t, dtype=float)), 0.0, 1.0)


def test_decreasing_kernel_report_names_all_probes():
    bad = object.__new__(PsiKernel)
    object.__setattr__(bad, "name", "negate")
    object.__setattr__(bad, "eval", lambda t: -np.asarray(t, dtype=float))
    object.__setattr__(bad, "deriv", lambda t: -np.ones_like(np.asarray(t, dtype=float)))
    object.__setattr__(bad, "t_lo", 0.0)
    object.__setattr__(bad, "t_hi", 1.0)
    report = validate(bad, 100)
    assert len(report.monotonicity_violations) == 99
    assert not report.ok


def test_wrong_derivative_caught():
    with pytest.raises(ValidationError):
        PsiKernel("lying", lambda t: np.asarray(t, dtype=float),
                  lambda t: 2.0 * np.ones_like(np.asarray(t, dtype=float)), 0.0, 1.0)


def test_sqrt_kernel_on_unit_interval():
    k = make_builtin("power", rho=0.5, t_hi=1.0)
    assert validate(k, 100).ok  # probe grid excludes the t = 0 endpoint


def test_psi_span_nonnegative():
    for k in (make_builtin("identity"), make_builtin("log_shift")):
        t = np.linspace(0.0, k.t_hi, 64)
        s = np.asarray(k.eval(t)) - float(np.asarray(k.eval(0.0)))
        assert s.min() == 0.0 and np.argmin(s) == 0


def test_parse_kernel_spec():
    assert parse_kernel_spec("identity").name == "identity"
    assert parse_kernel_spec("power:2.5").name == "power:2.5"
    assert parse_kernel_spec("log_shift").name == "log_shift"
    assert parse_kernel_spec("bounded_exp").name == "bounded_exp"
    with pytest.raises(ValidationError):
        parse_kernel_spec("mystery")
    with pytest.raises(ValidationError):
        parse_kernel_spec("power:-1")


def test_psi_infinity():
    assert psi_infinity(make_builtin("bounded_exp")) == pytest.approx(1.0, abs=1e-10)
    with pytest.raises(ValidationError):
        psi_infinity(make_builtin("identity"))
    with pytest.raises(ValidationError):
        psi_infinity(make_builtin("log_shift"))


def test_probe_points_precondition():
    with pytest.raises(ValidationError):
        validate(make_builtin("identity"), 1)
