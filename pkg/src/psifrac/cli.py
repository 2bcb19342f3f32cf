"""Command-line front end: operator evaluation, solves, Gronwall checks,
certification campaigns and convergence tables.

Every command is a thin shell over library calls; no numerics live here.
Exit codes: 0 success, 2 validation error, 3 nonconvergence, 4 certificate
verdict failure.  Failures print one line ``ERROR <code> <message>`` to
stderr.  Outputs are CSV (shortest round-trip decimals) and JSON, so
identical configs and seeds reproduce byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import os
import sys


def _apply_thread_env() -> None:
    threads = os.environ.get("PSIFRAC_THREADS")
    if threads:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, threads)


_apply_thread_env()

import numpy as np  # noqa: E402

from psifrac._exceptions import NonconvergenceError, PsifracError, ValidationError  # noqa: E402
from psifrac import certifier, convergence, gronwall, solver  # noqa: E402
from psifrac.frac_derivative import hilfer_dx, hilfer_mixed  # noqa: E402
from psifrac.frac_integral import frac_int_2d, frac_int_x, frac_int_y  # noqa: E402
from psifrac.grids import Field2D, FracOrder, Grid2D  # noqa: E402
from psifrac.kernels import parse_kernel_spec  # noqa: E402

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NONCONVERGENCE = 3
EXIT_VERDICT = 4


# ---------------------------------------------------------------------------
# config parsing: flat "key = value" lines, '#' comments


def parse_config(path: str) -> dict[str, str]:
    cfg: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValidationError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
            key, value = line.split("=", 1)
            cfg[key.strip()] = value.strip().strip('"')
    return cfg


_EXPR_NS = {
    "sin": np.sin, "cos": np.cos, "tan": np.tan, "exp": np.exp, "log": np.log,
    "sqrt": np.sqrt, "abs": np.abs, "tanh": np.tanh, "pi": np.pi, "e": np.e,
    "minimum": np.minimum, "maximum": np.maximum,
}


def _eval_expr(expr: str, **vars_):
    return eval(expr, {"__builtins__": {}}, {**_EXPR_NS, **vars_})  # noqa: S307


def make_rhs(spec: str):
    """Registry: zero | constant:C | linear_u:LAMBDA | expr:EXPRESSION."""
    if spec == "zero":
        return lambda x, y, u, u1, u2: np.zeros(np.broadcast_shapes(np.shape(x), np.shape(y), np.shape(u)))
    if spec.startswith("constant:"):
        c = float(spec.split(":", 1)[1])
        return lambda x, y, u, u1, u2: np.full(np.broadcast_shapes(np.shape(x), np.shape(y), np.shape(u)), c)
    if spec.startswith("linear_u:"):
        lam = float(spec.split(":", 1)[1])
        return lambda x, y, u, u1, u2: lam * u
    if spec.startswith("expr:"):
        expr = spec.split(":", 1)[1]
        return lambda x, y, u, u1, u2: _eval_expr(expr, x=x, y=y, u=u, u1=u1, u2=u2)
    raise ValidationError(f"unknown rhs spec {spec!r}")


def make_axis_data(spec: str, nodes: np.ndarray) -> np.ndarray:
    """zeros | const:C | inline:v1,v2,... | expr:EXPRESSION(t) | csv:PATH."""
    if spec == "zeros":
        return np.zeros_like(nodes)
    if spec.startswith("const:"):
        return np.full_like(nodes, float(spec.split(":", 1)[1]))
    if spec.startswith("inline:"):
        vals = np.array([float(v) for v in spec.split(":", 1)[1].split(",")])
        if vals.size != nodes.size:
            raise ValidationError(f"inline data length {vals.size} != grid size {nodes.size}")
        return vals
    if spec.startswith("expr:"):
        return np.asarray(_eval_expr(spec.split(":", 1)[1], t=nodes), dtype=float) * np.ones_like(nodes)
    if spec.startswith("csv:"):
        vals = np.loadtxt(spec.split(":", 1)[1], delimiter=",", ndmin=1)
        if vals.size != nodes.size:
            raise ValidationError(f"csv data length {vals.size} != grid size {nodes.size}")
        return vals.astype(float)
    raise ValidationError(f"unknown data spec {spec!r}")


_CONFIG_KEYS = {
    "psi", "alpha", "alpha1", "alpha2", "beta", "a", "b", "nx", "ny", "grading",
    "rhs", "lipschitz", "h", "g1", "g2", "h_der", "g1_der", "g2_der",
    "delta", "tol", "max_iter",
}


def problem_from_config(cfg: dict[str, str]):
    """Build (ProblemSpec, BieleckiParams) from a flat config mapping."""
    unknown = sorted(set(cfg) - _CONFIG_KEYS)
    if unknown:
        raise ValidationError(f"unknown config keys: {', '.join(unknown)}")
    kernel = parse_kernel_spec(cfg.get("psi", "identity"))
    if "alpha" in cfg:
        a1 = a2 = float(cfg["alpha"])
    else:
        a1 = float(cfg.get("alpha1", "1.0"))
        a2 = float(cfg.get("alpha2", "1.0"))
    order = FracOrder(a1, a2, float(cfg.get("beta", "1.0")))
    a = float(cfg.get("a", "1.0"))
    b = float(cfg.get("b", "1.0"))
    nx = int(cfg.get("nx", "65"))
    ny = int(cfg.get("ny", "65"))
    grading = float(cfg.get("grading", "1.0"))
    if grading == 1.0:
        grid = Grid2D.uniform(a, b, nx, ny)
    else:
        grid = Grid2D.graded(a, b, nx, ny, grading, grading)
    p = solver.ProblemSpec(
        rhs=make_rhs(cfg.get("rhs", "zero")),
        lipschitz=float(cfg.get("lipschitz", "0.0")),
        data_h=make_axis_data(cfg.get("h", "zeros"), grid.x),
        data_g1=make_axis_data(cfg.get("g1", "zeros"), grid.y),
        data_g2=make_axis_data(cfg.get("g2", "zeros"), grid.y),
        order=order,
        kernel=kernel,
        grid=grid,
        data_h_der=make_axis_data(cfg.get("h_der", "zeros"), grid.x),
        data_g1_der=make_axis_data(cfg.get("g1_der", "zeros"), grid.y),
        data_g2_der=make_axis_data(cfg.get("g2_der", "zeros"), grid.y),
    )
    bp = solver.BieleckiParams(
        delta=float(cfg.get("delta", "4.0")),
        tol=float(cfg.get("tol", "1e-10")),
        max_iter=int(cfg.get("max_iter", "200")),
    )
    return p, bp


# ---------------------------------------------------------------------------
# commands


def cmd_frac_int(args) -> int:
    kernel = parse_kernel_spec(args.psi)
    if args.field is None:
        # point evaluation of the 1D integral of a constant along x
        grid = Grid2D.uniform(args.x, 1.0, args.n, 2)
        f = Field2D.constant(grid, args.const)
        out = frac_int_x(kernel, args.alpha, f)
        print(repr(float(out.values[-1, 0])))
        return EXIT_OK
    f = Field2D.read_csv(args.field)
    if args.axis == "x":
        out = frac_int_x(kernel, args.alpha, f)
    elif args.axis == "y":
        out = frac_int_y(kernel, args.alpha2 if args.alpha2 is not None else args.alpha, f)
    else:
        a2 = args.alpha2 if args.alpha2 is not None else args.alpha
        out = frac_int_2d(kernel, FracOrder(args.alpha, a2, 0.0), f)
    out.write_csv(args.out)
    return EXIT_OK


def cmd_frac_der(args) -> int:
    kernel = parse_kernel_spec(args.psi)
    f = Field2D.read_csv(args.field)
    if args.axis == "x":
        out = hilfer_dx(kernel, args.alpha, args.beta, f)
    else:
        a2 = args.alpha2 if args.alpha2 is not None else args.alpha
        out = hilfer_mixed(kernel, FracOrder(args.alpha, a2, args.beta), f)
    out.write_csv(args.out)
    return EXIT_OK


def cmd_solve(args) -> int:
    p, bp = problem_from_config(parse_config(args.config))
    res = solver.picard_solve(p, bp)
    os.makedirs(args.out_dir, exist_ok=True)
    res.sol.u.write_csv(os.path.join(args.out_dir, "u.csv"))
    res.sol.u1.write_csv(os.path.join(args.out_dir, "u1.csv"))
    res.sol.u2.write_csv(os.path.join(args.out_dir, "u2.csv"))
    report = {
        "iters": res.iters,
        "residuals": [float(r) for r in res.residual_history],
        "bielecki_delta": bp.delta,
        "contraction_ratio": None if np.isnan(res.contraction_ratio) else float(res.contraction_ratio),
    }
    with open(os.path.join(args.out_dir, "report.json"), "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return EXIT_OK


def cmd_gronwall(args) -> int:
    raw = np.loadtxt(args.data, delimiter=",", skiprows=1)
    if raw.ndim != 2 or raw.shape[1] != 4:
        raise ValidationError("gronwall data CSV must have columns t,u,v,h")
    data = gronwall.GronwallData(
        raw[:, 0], raw[:, 1], raw[:, 2], raw[:, 3],
        parse_kernel_spec(args.psi), args.alpha,
    )
    rep = gronwall.check_gronwall(data)
    out = {
        "holds": rep.holds,
        "max_violation": rep.max_violation,
        "premise_satisfied": rep.premise_satisfied,
    }
    text = json.dumps(out, indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    print(text)
    return EXIT_OK


def cmd_certify(args) -> int:
    p, bp = problem_from_config(parse_config(args.config))
    if args.mode == "uh":
        cert = certifier.certify_uh(p, bp, args.epsilon, args.trials, seed=args.seed)
    else:
        phi = Field2D.read_csv(args.phi)
        cert = certifier.certify_uhr(p, bp, phi, args.trials, seed=args.seed,
                                     phi_ref=os.path.basename(args.phi))
    certifier.write_certificate(cert, args.out)
    if not cert.all_ok:
        print(f"ERROR {EXIT_VERDICT} certificate verdict failure (see {args.out})",
              file=sys.stderr)
        return EXIT_VERDICT
    return EXIT_OK


def cmd_convergence(args) -> int:
    kernel = parse_kernel_spec(args.psi)
    errs = convergence.oracle_errors(args.oracle, kernel, args.alpha)
    rates = convergence.observed_rates(errs)
    lines = ["n,sup_error,observed_rate"]
    for i, n in enumerate(convergence.GRID_SIZES):
        rate = "" if i == 0 else ("saturated" if np.isinf(rates[i - 1]) else repr(rates[i - 1]))
        lines.append(f"{n},{errs[i]!r},{rate}")
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    print(text, end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="psifrac", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("frac-int", help="fractional integral of a field or a constant")
    p.add_argument("--psi", default="identity")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--alpha2", type=float, default=None)
    p.add_argument("--const", type=float, default=None)
    p.add_argument("--x", type=float, default=1.0)
    p.add_argument("--n", type=int, default=129)
    p.add_argument("--field", default=None, help="input Field2D CSV")
    p.add_argument("--axis", choices=("x", "y", "2d"), default="x")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_frac_int)

    p = sub.add_parser("frac-der", help="psi-Hilfer derivative of a field")
    p.add_argument("--psi", default="identity")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--alpha2", type=float, default=None)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--field", required=True)
    p.add_argument("--axis", choices=("x", "mixed"), default="x")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_frac_der)

    p = sub.add_parser("solve", help="Picard solve from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("gronwall", help="check the Gronwall premise and bound")
    p.add_argument("--data", required=True, help="CSV with header t,u,v,h")
    p.add_argument("--psi", default="identity")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_gronwall)

    p = sub.add_parser("certify", help="stability certification campaign")
    p.add_argument("mode", choices=("uh", "uhr"))
    p.add_argument("--config", required=True)
    p.add_argument("--epsilon", type=float, default=0.01)
    p.add_argument("--phi", default=None, help="comparison field CSV (uhr)")
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="cert.json")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("convergence", help="grid-refinement error table")
    p.add_argument("--oracle", choices=("power", "trapezoid", "solver-zero"), required=True)
    p.add_argument("--psi", default="identity")
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_convergence)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "certify" and args.mode == "uhr" and args.phi is None:
            raise ValidationError("certify uhr requires --phi FILE.csv")
        return args.func(args)
    except NonconvergenceError as exc:
        print(f"ERROR {EXIT_NONCONVERGENCE} {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except (PsifracError, ValueError, OSError) as exc:
        print(f"ERROR {EXIT_VALIDATION} {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
