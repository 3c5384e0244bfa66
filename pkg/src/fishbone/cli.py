"""Command-line entry point: ``fishbone <subcommand> ...``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .errors import ConfigError, NumericalError
from .flexural import flexural_energy, solve_flexural
from .floquet import CLASS_TOL, classify, det_drift, monodromy_numeric
from .limit import high_energy_verdict
from .params import (available_presets, build_model, model_descriptor,
                     params_from_mapping, parse_config, preset)
from .piecewise import BarModel, barf_delta
from .projection import ProjectionKernel
from .sweep import (compare_engines, export, kernel_for, linear_threshold, make_axis,
                    summary, sweep_grid, tip_report, to_csv, to_pgm, tongue_tips)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


def parse_range(text: str):
    """``a:b:n`` -> (a, b, n)."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"range {text!r} must look like a:b:n")
    try:
        return float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ConfigError(f"range {text!r} must look like a:b:n") from None


def resolve(args):
    """(params, model) from --config, --preset and the explicit overrides."""
    data, base_dir = {}, None
    if args.config:
        path = Path(args.config)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        data = parse_config(text)
        base_dir = path.parent
    if args.preset:
        pr = preset(args.preset, j=data.get("j", 1), k=data.get("k", 1),
                    beta=data.get("beta"), gamma=args.gamma if args.gamma is not None
                    else data.get("gamma"))
        data.update({"alpha": pr.params.alpha, "beta": pr.params.beta, "gamma": pr.params.gamma})
        for key in ("m", "r0", "h", "knots", "M"):
            data.pop(key, None)
        data.update(pr.model)
        data.setdefault("j", 1)
        data.setdefault("k", 1)
    for key in ("j", "k", "gamma", "beta", "alpha"):
        val = getattr(args, key, None)
        if val is not None:
            data[key] = val
    if getattr(args, "model", None):
        data["model"] = args.model
    if not data:
        raise ConfigError("give --config or --preset")
    # below this the error test cannot be met in double precision
    if not args.rtol >= 1e-14:
        raise ConfigError(f"rtol must be at least 1e-14, got {args.rtol:g}")
    if not args.atol > 0:
        raise ConfigError(f"atol must be positive, got {args.atol:g}")
    params = params_from_mapping(data)
    model = build_model(model_descriptor(data), base_dir=base_dir)
    return params, model


def _engine(name):
    return {"closed-form": "closed_form", "closed_form": "closed_form", "numeric": "numeric"}[name]


def _write(text, out):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _json(obj):
    return json.dumps(obj, indent=2, default=lambda x: x.item() if isinstance(x, np.generic)
                      else x.tolist() if isinstance(x, np.ndarray) else str(x)) + "\n"


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_sweep(args):
    params, model = resolve(args)
    q_axis = make_axis(*parse_range(args.q_range))
    beta_axis = make_axis(*parse_range(args.beta_range))
    grid = sweep_grid(params, model, q_axis, beta_axis, engine=_engine(args.engine),
                      rtol=args.rtol, atol=args.atol, class_tol=args.tol_class,
                      cache=not args.no_cache, jobs=args.jobs)
    tips = None
    if hasattr(model, "r0"):
        tips = tip_report(grid, params, model.m_at_zero, linear_threshold(model))
    if args.out:
        export(grid, args.format, args.out, tips=tips)
    else:
        text = {"csv": to_csv, "pgm": to_pgm}.get(args.format)
        _write(text(grid) if text else _json(summary(grid, tips)), None)
    return EXIT_NUMERIC if grid.n_failed and args.strict else EXIT_OK


def cmd_delta(args):
    params, model = resolve(args)
    beta = params.beta if args.beta_cell is None else args.beta_cell
    if _engine(args.engine) == "closed_form":
        if not isinstance(model, BarModel) or params.j != params.k:
            raise ConfigError("the closed-form engine needs the mmk-bar model and j = k")
        d = barf_delta(params, model.m, model.r0, args.q, beta)
        out = {"q": args.q, "beta": beta, "delta": d, "class": classify(d, args.tol_class).cls}
    else:
        kernel = kernel_for(model, params.j, params.k)
        M, verdict = monodromy_numeric(params, kernel, args.q, beta_override=beta, rtol=args.rtol,
                                       atol=args.atol, class_tol=args.tol_class)
        out = {"q": args.q, "beta": beta, "delta": verdict.delta, "class": verdict.cls,
               "monodromy": M.tolist(), "det_drift": float(det_drift(M))}
    _write(_json(out), args.out)
    return EXIT_OK


def cmd_orbit(args):
    params, model = resolve(args)
    kernel = kernel_for(model, params.j, params.k)
    tr = solve_flexural(params, kernel, args.q, rtol=args.rtol, atol=args.atol)
    E = flexural_energy(params, kernel, tr.u, tr.udot)
    lines = [f"# period={tr.period:.17g} energy_drift={tr.energy_drift:.3e}", "t,u,udot,E"]
    lines += [f"{t:.17g},{u:.17g},{v:.17g},{e:.17g}" for t, u, v, e in zip(tr.t, tr.u, tr.udot, E)]
    _write("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_kernel(args):
    params, model = resolve(args)
    if isinstance(model, BarModel):
        kernel = kernel_for(model, params.j, params.k)
    else:
        engine = "closed_form" if _engine(args.engine) == "closed_form" else "quadrature"
        kernel = ProjectionKernel(model, params.j, params.k, engine=engine)
    r = make_axis(*parse_range(args.r_range))
    fj, g = kernel.fj(r), kernel.gjk(r)
    lines = ["r,f_j,g_jk"] + [f"{a:.17g},{b:.17g},{c:.17g}" for a, b, c in zip(r, fj, g)]
    _write("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_limit(args):
    params, model = resolve(args)
    base = model.base if isinstance(model, BarModel) else model
    _write(_json(high_energy_verdict(params, base, beta=args.beta_cell)), args.out)
    return EXIT_OK


def cmd_tips(args):
    params, model = resolve(args)
    tips = tongue_tips(params, model.m_at_zero, args.n_max)
    _write(_json([{"N": N, "beta_N": b, "vanished": v} for N, b, v in tips]), args.out)
    return EXIT_OK


def cmd_check_model(args):
    _, model = resolve(args)
    base = model.base if isinstance(model, BarModel) else model
    rep = base.assumptions().as_dict()
    rep["model"] = model.descriptor()
    rep["kinks"] = list(base.kinks)
    rep["m_at_zero"] = base.m_at_zero
    _write(_json(rep), args.out)
    return EXIT_OK


def cmd_compare(args):
    params, model = resolve(args)
    if not isinstance(model, BarModel):
        model = BarModel(model.m_at_zero, getattr(model, "r0", 0.0))
    rep = compare_engines(params, model, make_axis(*parse_range(args.q_range)),
                          make_axis(*parse_range(args.beta_range)), rtol=args.rtol,
                          atol=args.atol, jobs=args.jobs)
    rep.pop("grids")
    _write(_json(rep), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value parameter file")
    common.add_argument("--preset", choices=available_presets(), help="named parameter set")
    common.add_argument("--model", help="override the model kind (e.g. mmk-bar)")
    common.add_argument("--alpha", type=float)
    common.add_argument("--gamma", type=float)
    common.add_argument("--j", type=int)
    common.add_argument("--k", type=int)
    common.add_argument("--engine", default="numeric", choices=["numeric", "closed-form"])
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--tol-class", type=float, default=CLASS_TOL,
                        help="|Delta| = 2 boundary tolerance")
    common.add_argument("--rtol", type=float, default=1e-10)
    common.add_argument("--atol", type=float, default=1e-12)
    common.add_argument("--jobs", type=int, default=1)

    p = argparse.ArgumentParser(prog="fishbone", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sweep", parents=[common], help="(q, beta) stability grid")
    s.add_argument("--q-range", required=True, help="a:b:n")
    s.add_argument("--beta-range", required=True, help="a:b:n")
    s.add_argument("--format", default="csv", choices=["csv", "pgm", "json"])
    s.add_argument("--no-cache", action="store_true", help="recompute the period per cell")
    s.add_argument("--strict", action="store_true", help="exit 3 if any cell failed")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("delta", parents=[common], help="discriminant of one cell")
    s.add_argument("--q", type=float, required=True)
    s.add_argument("--beta", dest="beta_cell", type=float)
    s.set_defaults(func=cmd_delta)

    s = sub.add_parser("orbit", parents=[common], help="one period of u(t; q) as CSV")
    s.add_argument("--q", type=float, required=True)
    s.set_defaults(func=cmd_orbit)

    s = sub.add_parser("kernel", parents=[common], help="tabulate f_j and g_jk")
    s.add_argument("--r-range", default="-2:2:401", help="a:b:n")
    s.set_defaults(func=cmd_kernel)

    s = sub.add_parser("limit", parents=[common], help="high-energy limit and verdict")
    s.add_argument("--beta", dest="beta_cell", type=float)
    s.set_defaults(func=cmd_limit)

    s = sub.add_parser("tips", parents=[common], help="tongue tips on the beta axis")
    s.add_argument("--n-max", type=int, default=5)
    s.set_defaults(func=cmd_tips)

    s = sub.add_parser("check-model", parents=[common], help="structural assumptions of f")
    s.set_defaults(func=cmd_check_model)

    s = sub.add_parser("compare-engines", parents=[common], help="closed form vs numerics")
    s.add_argument("--q-range", required=True, help="a:b:n")
    s.add_argument("--beta-range", required=True, help="a:b:n")
    s.set_defaults(func=cmd_compare)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
