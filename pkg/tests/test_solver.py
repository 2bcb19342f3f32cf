import numpy as np
import pytest

from psifrac import (
    BieleckiParams,
    ContractionWarning,
    DomainError,
    Field2D,
    FracOrder,
    Grid2D,
    NonconvergenceError,
    ProblemSpec,
    SolutionTriple,
    ValidationError,
    bielecki_norm,
    gamma_fn,
    make_builtin,
    picard_solve,
    psi_gamma_weight,
    residual_check,
    w_operator,
)
from psifrac.solver import _PicardMap, bielecki_distance

IDENTITY = make_builtin("identity")


def zero_rhs(x, y, u, u1, u2):
    return np.zeros_like(u)


def make_problem(n=33, order=None, rhs=zero_rhs, lipschitz=0.0, kernel=IDENTITY,
                 a=1.0, b=1.0, **data):
    grid = Grid2D.uniform(a, b, n, n)
    fields = {
        "data_h": data.get("h", np.sin(grid.x)),
        "data_g1": data.get("g1", 0.5 + 0.3 * grid.y),
        "data_g2": data.get("g2", 0.2 * np.cos(grid.y)),
    }
    return ProblemSpec(rhs=rhs, lipschitz=lipschitz, order=order or FracOrder(0.8, 0.8, 0.5),
                       kernel=kernel, grid=grid, **fields)


# --- psi_gamma_weight ---------------------------------------------------------


def test_psi_gamma_weight_gamma_one():
    for t in (0.0, 0.5, 2.0):
        assert psi_gamma_weight(IDENTITY, 1.0, t) == 1.0


def test_psi_gamma_weight_examples():
    assert psi_gamma_weight(IDENTITY, 0.75, 1.0) == pytest.approx(
        1.0 / gamma_fn(0.75), rel=1e-13
    )
    assert psi_gamma_weight(IDENTITY, 0.5, 4.0) == pytest.approx(
        0.28209479177387814, rel=1e-12
    )


def test_psi_gamma_weight_origin_policy():
    # singular weight at t=0 patched to the gamma=1 consistent value
    assert psi_gamma_weight(IDENTITY, 0.7, 0.0) == 1.0


def test_psi_gamma_weight_domain():
    with pytest.raises(DomainError):
        psi_gamma_weight(IDENTITY, 0.0, 1.0)
    with pytest.raises(DomainError):
        psi_gamma_weight(IDENTITY, 1.2, 1.0)


# --- w_operator ----------------------------------------------------------------


def test_w_operator():
    grid = Grid2D.uniform(2.0, 1.0, 17, 9)
    ones = w_operator(Field2D.constant(grid, 1.0))
    assert np.abs(ones.values - grid.x[:, None]).max() == 0.0
    assert np.abs(w_operator(Field2D.constant(grid, 0.0)).values).max() == 0.0
    f = Field2D(grid, np.tile(grid.y[None, :], (17, 1)))
    out = w_operator(f)
    i2 = np.argmin(np.abs(grid.x - 2.0))
    assert out.values[i2] == pytest.approx(2.0 * grid.y, rel=1e-14)


# --- bielecki norm ---------------------------------------------------------------


def test_bielecki_norm_examples():
    grid = Grid2D.uniform(1.0, 1.0, 17, 17)
    zero = SolutionTriple(*[Field2D.constant(grid, 0.0) for _ in range(3)])
    assert bielecki_norm(zero, 2.0) == 0.0
    one = SolutionTriple(Field2D.constant(grid, 1.0), Field2D.constant(grid, 0.0),
                         Field2D.constant(grid, 0.0))
    assert bielecki_norm(one, 0.0) == 1.0
    assert bielecki_norm(one, 1.0) == 1.0  # weight max at the origin


# --- picard solve ---------------------------------------------------------------


def test_data_only_exact_fixed_point():
    p = make_problem(order=FracOrder(0.8, 0.9, 0.5))
    res = picard_solve(p, BieleckiParams(delta=1.0))
    assert res.converged and res.iters == 1
    amap = _PicardMap(p)
    assert np.abs(res.sol.u.values - amap.D1).max() <= 1e-12
    assert residual_check(p, res.sol).integral <= 1e-12


def test_constant_rhs_alpha_one_closed_form():
    n = 65
    grid = Grid2D.uniform(1.0, 1.0, n, n)
    p = ProblemSpec(
        rhs=lambda x, y, u, u1, u2: np.ones_like(u),
        lipschitz=0.0,
        data_h=np.zeros(n), data_g1=np.zeros(n), data_g2=np.zeros(n),
        order=FracOrder(1.0, 1.0, 1.0), kernel=IDENTITY, grid=grid,
    )
    res = picard_solve(p, BieleckiParams(delta=1.0, tol=1e-12))
    X, Y = grid.meshes()
    assert np.abs(res.sol.u.values - X**2 * Y / 2.0).max() <= 1e-13
    assert np.abs(res.sol.u1.values - X**2 / 2.0 * np.ones_like(Y)).max() <= 1e-13
    assert np.abs(res.sol.u2.values - Y * np.ones_like(X)).max() <= 1e-13


def test_fractional_constant_rhs_closed_form_exact():
    # f = c with psi = identity: the rhs integrand s*c is linear in tau, so
    # the product quadrature reproduces the fractional closed forms exactly
    n, c = 49, 1.7
    a1, a2 = 0.8, 0.7
    grid = Grid2D.uniform(1.0, 1.0, n, n)
    p = ProblemSpec(
        rhs=lambda x, y, u, u1, u2: np.full_like(u, c), lipschitz=0.0,
        data_h=np.zeros(n), data_g1=np.zeros(n), data_g2=np.zeros(n),
        order=FracOrder(a1, a2, 1.0), kernel=IDENTITY, grid=grid,
    )
    res = picard_solve(p, BieleckiParams(delta=1.0, tol=1e-13))
    X, Y = grid.meshes()
    ix = X ** (1.0 + a1) / gamma_fn(2.0 + a1)
    iy = Y**a2 / gamma_fn(1.0 + a2)
    assert np.abs(res.sol.u.values - c * ix * iy).max() < 1e-13
    assert np.abs(res.sol.u1.values - c * ix * np.ones_like(Y)).max() < 1e-13
    assert np.abs(res.sol.u2.values - c * iy * np.ones_like(X)).max() < 1e-13


def test_manufactured_mittag_leffler_solution():
    # f = lam * u2 with Caputo-type weights decouples the third component
    # into a 1D Volterra equation whose resolvent is E_alpha; the other two
    # components follow by closed-form integration
    from psifrac.special import MLParams, ml_array

    lam, d = 0.6, 0.8
    a1, a2 = 0.8, 0.75
    errs = []
    for n in (33, 65, 129):
        grid = Grid2D.uniform(1.0, 1.0, n, n)
        h = np.sin(grid.x)
        g1 = 0.3 * np.ones(n)
        p = ProblemSpec(
            rhs=lambda x, y, u, u1, u2: lam * u2, lipschitz=lam,
            data_h=h, data_g1=g1, data_g2=np.zeros(n),
            order=FracOrder(a1, a2, 1.0), kernel=IDENTITY, grid=grid,
            data_h_der=d * np.ones(n),
        )
        res = picard_solve(p, BieleckiParams(delta=2.0, tol=1e-13, max_iter=400))
        u2_row = d * ml_array(MLParams(alpha=a2), lam * grid.y**a2)
        u2_exact = np.tile(u2_row, (n, 1))
        ix = (grid.x ** (1.0 + a1) / gamma_fn(2.0 + a1))[:, None]
        u1_exact = lam * u2_exact * ix
        u_exact = h[:, None] + g1[None, :] + ix * (u2_exact - d)
        errs.append(max(
            np.abs(res.sol.u.values - u_exact).max(),
            np.abs(res.sol.u1.values - u1_exact).max(),
            np.abs(res.sol.u2.values - u2_exact).max(),
        ))
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] <= 5e-5


def test_alpha_one_matches_independent_trapezoid_picard():
    # classical-case cross-check against a test-local fixed point iteration
    # built on cumulative trapezoids, independent of the L1 machinery
    n = 65
    lam = 0.5
    grid = Grid2D.uniform(1.0, 1.0, n, n)
    h = np.sin(grid.x)
    g1 = 0.3 * np.ones(n)
    p = ProblemSpec(
        rhs=lambda x, y, u, u1, u2: lam * u, lipschitz=lam,
        data_h=h, data_g1=g1, data_g2=np.zeros(n),
        order=FracOrder(1.0, 1.0, 0.3), kernel=IDENTITY, grid=grid,
    )
    res = picard_solve(p, BieleckiParams(delta=2.0, tol=1e-13, max_iter=300))

    def cum_x(vals):
        dx = np.diff(grid.x)[:, None]
        out = np.zeros_like(vals)
        out[1:] = np.cumsum(0.5 * dx * (vals[1:] + vals[:-1]), axis=0)
        return out

    def cum_y(vals):
        return cum_x(vals.T).T

    X = grid.x[:, None]
    data = h[:, None] + g1[None, :] * np.ones((n, n))
    u = data.copy()
    for _ in range(200):
        nxt = data + cum_y(cum_x(X * lam * u))
        if np.abs(nxt - u).max() < 1e-13:
            u = nxt
            break
        u = nxt
    assert np.abs(res.sol.u.values - u).max() <= 1e-10


def test_linear_rhs_contraction_ratio():
    lam = 0.4
    delta = 4.0
    p = make_problem(rhs=lambda x, y, u, u1, u2: lam * u, lipschitz=lam,
                     g1=np.zeros(33), g2=np.zeros(33))
    res = picard_solve(p, BieleckiParams(delta=delta, tol=1e-12, max_iter=100))
    hist = res.residual_history
    ratios = hist[1:] / hist[:-1]
    ratios = ratios[hist[:-1] > 1e-14]
    assert np.all(ratios <= lam / delta + 0.1)
    assert not res.contraction_violated


def test_contraction_property_random_pairs():
    n = 33
    Lf, delta = 1.0, 4.0
    p = make_problem(n=n, rhs=lambda x, y, u, u1, u2: Lf * np.sin((u + u1 + u2) / 3.0),
                     lipschitz=Lf)
    amap = _PicardMap(p)
    rng = np.random.default_rng(42)
    grid = p.grid
    for _ in range(25):
        wa = SolutionTriple(*[Field2D(grid, rng.uniform(-1, 1, grid.shape)) for _ in range(3)])
        wb = SolutionTriple(*[Field2D(grid, rng.uniform(-1, 1, grid.shape)) for _ in range(3)])
        num = bielecki_distance(amap.apply(wa), amap.apply(wb), delta)
        den = bielecki_distance(wa, wb, delta)
        assert num / den <= Lf / delta + 0.05


def test_uniqueness_from_distinct_seeds():
    lam = 0.5
    p = make_problem(rhs=lambda x, y, u, u1, u2: lam * u, lipschitz=lam)
    bp = BieleckiParams(delta=3.0, tol=1e-12, max_iter=200)
    r1 = picard_solve(p, bp)
    seed = SolutionTriple(*[Field2D.constant(p.grid, 5.0) for _ in range(3)])
    r2 = picard_solve(p, bp, initial=seed)
    assert bielecki_distance(r1.sol, r2.sol, bp.delta) <= 10.0 * bp.tol


def test_delta_must_beat_lipschitz():
    p = make_problem(rhs=lambda x, y, u, u1, u2: 2.0 * u, lipschitz=2.0)
    with pytest.raises(ValidationError):
        picard_solve(p, BieleckiParams(delta=1.5))


def test_nonconvergence_raises_and_carries_result():
    lam = 0.9
    p = make_problem(rhs=lambda x, y, u, u1, u2: lam * u, lipschitz=lam)
    bp = BieleckiParams(delta=1.0, tol=1e-14, max_iter=2)
    with pytest.raises(NonconvergenceError) as exc:
        picard_solve(p, bp)
    partial = exc.value.result
    assert partial is not None and not partial.converged and partial.iters == 2
    # non-strict mode returns the partial result instead
    res = picard_solve(p, bp, strict=False)
    assert not res.converged
    assert residual_check(p, res.sol).integral > bp.tol


def test_contraction_warning_when_ratio_exceeds_bound():
    # lie about the Lipschitz constant: declared 0.1, actual 2.0
    p = make_problem(rhs=lambda x, y, u, u1, u2: 2.0 * u, lipschitz=0.1)
    with pytest.warns(ContractionWarning):
        picard_solve(p, BieleckiParams(delta=2.5, tol=1e-10, max_iter=100))


def test_residual_check_differential_mode():
    n = 65
    grid = Grid2D.uniform(1.0, 1.0, n, n)
    p = ProblemSpec(
        rhs=lambda x, y, u, u1, u2: np.ones_like(u), lipschitz=0.0,
        data_h=np.zeros(n), data_g1=np.zeros(n), data_g2=np.zeros(n),
        order=FracOrder(1.0, 1.0, 1.0), kernel=IDENTITY, grid=grid,
    )
    res = picard_solve(p, BieleckiParams(delta=1.0, tol=1e-12))
    rep = residual_check(p, res.sol, differential=True)
    assert rep.integral <= 1e-12
    # mixed classical derivative of x^2 y / 2 is x: differs from f = 1 by
    # the pseudoparabolic structure only through discretization of stages
    assert rep.differential is not None and np.isfinite(rep.differential)


def test_residual_small_after_convergence():
    # unweighted residual <= exp(delta(a+b)) * Bielecki tol; with delta = 1
    # on the unit square that is within the 10x budget
    lam = 0.5
    p = make_problem(rhs=lambda x, y, u, u1, u2: lam * u, lipschitz=lam)
    bp = BieleckiParams(delta=1.0, tol=1e-10, max_iter=300)
    res = picard_solve(p, bp)
    assert residual_check(p, res.sol).integral <= 10.0 * bp.tol


def test_solver_requires_pde_alpha_range():
    with pytest.raises(ValidationError):
        make_problem(order=FracOrder(0.5, 0.9, 0.5))


def test_data_shape_validation():
    grid = Grid2D.uniform(1.0, 1.0, 9, 9)
    with pytest.raises(ValidationError):
        ProblemSpec(rhs=zero_rhs, lipschitz=0.0, data_h=np.zeros(5),
                    data_g1=np.zeros(9), data_g2=np.zeros(9),
                    order=FracOrder(0.8, 0.8, 0.5), kernel=IDENTITY, grid=grid)
