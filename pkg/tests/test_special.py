import math

import numpy as np
import pytest

from psifrac import DomainError, MLParams, NonconvergenceError, gamma_fn, mittag_leffler
from psifrac.special import _asymptotic, ml_array, switch_threshold
from psifrac import _backend

SQRT_PI = 1.7724538509055160273  # mpmath, 20 digits

# 400-term series at 40 digits via mpmath: sum z^k/Gamma(0.8 k + 1) at z = 2
E_08_AT_2 = 13.415748887819014


def test_gamma_one_is_exact():
    assert gamma_fn(1.0) == pytest.approx(1.0, rel=1e-14)


def test_gamma_factorial():
    assert gamma_fn(5.0) == pytest.approx(24.0, rel=1e-13)


def test_gamma_half_matches_sqrt_pi():
    assert gamma_fn(0.5) == pytest.approx(SQRT_PI, rel=1e-13)


def test_gamma_against_mpmath_grid():
    mp = pytest.importorskip("mpmath")
    mp.mp.dps = 30
    for x in np.linspace(0.1, 30.0, 120):
        ref = float(mp.gamma(mp.mpf(float(x))))
        assert gamma_fn(float(x)) == pytest.approx(ref, rel=1e-12)


def test_gamma_domain_errors():
    with pytest.raises(DomainError):
        gamma_fn(0.0)
    with pytest.raises(DomainError):
        gamma_fn(-2.5)
    with pytest.raises(OverflowError):
        gamma_fn(171.0)


def test_ml_params_invariants():
    with pytest.raises(DomainError):
        MLParams(alpha=0.0)
    with pytest.raises(DomainError):
        MLParams(alpha=1.2)
    with pytest.raises(DomainError):
        MLParams(alpha=0.5, rel_tol=2.0)
    with pytest.raises(DomainError):
        MLParams(alpha=0.5, max_terms=5)


def test_ml_alpha_one_is_exp():
    p = MLParams(alpha=1.0)
    assert mittag_leffler(p, 1.0) == pytest.approx(math.e, rel=1e-12)
    for z in np.linspace(0.0, 30.0, 31):
        assert mittag_leffler(p, float(z)) == pytest.approx(math.exp(z), rel=1e-10)


def test_ml_at_zero_is_one_exactly():
    for alpha in np.linspace(0.05, 1.0, 20):
        assert mittag_leffler(MLParams(alpha=float(alpha)), 0.0) == 1.0


def test_ml_frozen_series_value():
    assert mittag_leffler(MLParams(alpha=0.8), 2.0) == pytest.approx(E_08_AT_2, rel=1e-12)


def test_ml_negative_z_rejected():
    with pytest.raises(DomainError):
        mittag_leffler(MLParams(alpha=0.5), -0.1)


def test_ml_monotone_in_z():
    rng = np.random.default_rng(11)
    for alpha in (0.4, 0.7, 0.9, 1.0):
        p = MLParams(alpha=alpha)
        z = np.sort(rng.uniform(0.0, 3.0 / alpha, size=40))
        vals = [mittag_leffler(p, float(v)) for v in z]
        assert np.all(np.diff(vals) > 0.0)


def test_ml_switch_over_continuity():
    # same-z comparison between the two evaluation methods at the threshold
    for alpha in (0.35, 0.5, 0.7, 0.85, 1.0):
        p = MLParams(alpha=alpha)
        thr = switch_threshold(p)
        series, counts = _backend.ml_series(np.array([thr]), alpha, p.rel_tol, p.max_terms)
        assert counts[0] <= p.max_terms
        asym = _asymptotic(p, thr)
        assert abs(asym - series[0]) <= 10.0 * p.rel_tol * series[0]


def test_ml_asymptotic_accuracy_above_threshold():
    mp = pytest.importorskip("mpmath")
    mp.mp.dps = 50
    for alpha in (0.5, 0.8, 1.0):
        p = MLParams(alpha=alpha)
        z = switch_threshold(p) * 1.5
        ref = float(mp.nsum(lambda k: mp.mpf(z) ** k / mp.gamma(alpha * k + 1), [0, mp.inf]))
        assert mittag_leffler(p, z) == pytest.approx(ref, rel=1e-10)


def test_ml_nonconvergence_in_dead_band():
    # small alpha: series budget exhausted below the asymptotic-validity floor
    p = MLParams(alpha=0.2, max_terms=60)
    with pytest.raises(NonconvergenceError):
        mittag_leffler(p, 1.7)


def test_ml_overflow_raises():
    with pytest.raises(OverflowError):
        mittag_leffler(MLParams(alpha=0.5), 600.0**0.5 * 40)


def test_ml_array_matches_scalar():
    p = MLParams(alpha=0.7)
    z = np.array([0.0, 0.3, 1.0, 5.0, 12.0])
    batch = ml_array(p, z)
    for j, zz in enumerate(z):
        assert batch[j] == pytest.approx(mittag_leffler(p, float(zz)), rel=1e-13)
