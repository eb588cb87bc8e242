"""Command line front end.

Every command that writes a grid checks it first (jet residual for
closed-form solutions, ODE and finite-difference residuals for
reconstructions) and writes nothing when the check fails.  Outputs are a
CSV file with 17 significant digits and a JSON sidecar holding the
metadata; both are byte-identical across runs with the same inputs.

Exit codes: 0 ok, 2 parse or parameter error, 3 no symmetry class or
reduction, 4 verification failure, 5 numeric failure.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import catalog, fields, linear, reductions, residual, symmetry
from .errors import GSError, NoReduction, ParameterError, VerificationFailure
from .grid import GridField, GridSpec, sample_solution
from .profiles import ProfileSpec, classify, parse_profile

DEFAULT_SEED = residual.DEFAULT_SEED
RESIDUAL_TOL = 1e-9

# flag name -> catalog parameter name
_PARAM_FLAGS = {
    "lambda": "lam", "A": "A", "sigma": "sigma", "a": "a", "b": "b", "q": "q", "kappa": "kappa",
    "c": "c", "c0": "c0", "beta": "beta", "alpha": "alpha", "sign": "sign",
}


# --------------------------------------------------------------------------
# output
# --------------------------------------------------------------------------


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if hasattr(x, "numerator") and hasattr(x, "denominator") and not isinstance(x, int):
        return float(x)
    return x


def write_json(path: Path, data):
    path.write_text(json.dumps(_jsonable(data), sort_keys=True, indent=2) + "\n")


def write_csv(path: Path, header, columns):
    data = np.column_stack([np.asarray(c, dtype=float) for c in columns])
    np.savetxt(path, data, delimiter=",", header=",".join(header), comments="", fmt="%.17g")


def write_grid(out: Path, field: GridField, meta: dict):
    out.parent.mkdir(parents=True, exist_ok=True)
    header = ["r", "z", "psi", "valid", *field.extra.keys()]
    write_csv(out, header, field.rows())
    write_json(out.with_suffix(".json"), dict(meta, grid=_grid_meta(field.spec)))


def _grid_meta(spec: GridSpec):
    return dict(r_min=spec.r_min, r_max=spec.r_max, z_min=spec.z_min, z_max=spec.z_max, nr=spec.nr, nz=spec.nz)


# --------------------------------------------------------------------------
# argument helpers
# --------------------------------------------------------------------------


def _add_grid(p):
    g = p.add_argument_group("grid")
    for name in ("r-min", "r-max", "z-min", "z-max"):
        g.add_argument(f"--{name}", type=float)
    g.add_argument("--nr", type=int)
    g.add_argument("--nz", type=int)


def _add_family(p, required=True, skip=()):
    p.add_argument("--family", choices=catalog.FAMILIES, required=required)
    for flag in _PARAM_FLAGS:
        if flag in skip:
            continue
        p.add_argument(f"--{flag}", type=float, dest=f"p_{flag}")
    p.add_argument("--shift-z0", action="store_true")
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                   help="extra family parameter (repeatable)")
    p.add_argument("--unchecked", action="store_true",
                   help="skip constraint checks (output is still residual-gated)")


def _grid_from(args, box, default_n=101) -> GridSpec:
    vals = [getattr(args, k, None) for k in ("r_min", "r_max", "z_min", "z_max")]
    vals = [b if v is None else v for v, b in zip(vals, box)]
    nr = args.nr or default_n
    nz = args.nz or default_n
    if vals[0] < 0 or vals[1] <= vals[0] or vals[3] <= vals[2]:
        raise ParameterError("grid bounds need 0 <= r_min < r_max and z_min < z_max")
    for n in (nr, nz):
        if not 5 <= n <= 4096:
            raise ParameterError("grid sizes must lie in [5, 4096]")
    return GridSpec(*vals, nr=nr, nz=nz)


def _family_params(args):
    params = {}
    for flag, key in _PARAM_FLAGS.items():
        v = getattr(args, f"p_{flag}", None)
        if v is not None:
            params[key] = v
    if getattr(args, "shift_z0", False):
        params["shift_z0"] = True
    for item in getattr(args, "param", []) or []:
        key, _, val = item.partition("=")
        if not _:
            raise ParameterError(f"--param expects KEY=VALUE, got {item!r}")
        params[key.strip()] = float(val)
    return params


def _solution(args):
    params = _family_params(args)
    if not params:
        params = dict(catalog.DEFAULT_PARAMS[args.family])
    return catalog.instantiate(args.family, params, strict=not args.unchecked)


def _gate(sol, args):
    rep = residual.residual(sol, n=args.n_points, seed=args.seed)
    if not rep.passes(args.residual_tol):
        raise VerificationFailure(
            f"residual gate failed for {sol.family}: max relative {rep.max_rel:.3e} > {args.residual_tol:.1e}"
        )
    return rep


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------


def cmd_classify(args):
    F, G = parse_profile(args.F, "F"), parse_profile(args.G, "G")
    classes = classify(F, G)
    primary = classes[0].to_json()
    print(json.dumps(_jsonable(dict(primary, classes=[c.to_json() for c in classes])), sort_keys=True))
    return 3 if classes[0].tag == "none" else 0


def cmd_solution(args):
    sol = _solution(args)
    rep = _gate(sol, args)
    spec = _grid_from(args, sol.box)
    field = sample_solution(sol, spec)
    meta = dict(command="solution", family=sol.family, params=sol.params, formula=sol.formula,
                F=sol.F.text(), G=sol.G.text(), residual=rep.to_dict(), seed=args.seed)
    write_grid(Path(args.out), field, meta)
    return 0


def _profiles_from(args):
    if args.F is not None or args.G is not None:
        return parse_profile(args.F or "0", "F"), parse_profile(args.G or "0", "G")
    if args.q is None:
        raise ParameterError("give --F/--G or the power-class constants --q, --a, --b")
    q, a, b = args.q, args.a or 0.0, args.b or 0.0
    F = ProfileSpec.power(a, 1 + 2 / q, role="F") if a else ProfileSpec.zero("F")
    G = ProfileSpec.power(b, 1 + 1 / q, role="G") if b else ProfileSpec.zero("G")
    return F, G


def run_reduce(F, G, tag, kind=None, init="2q+2", span=(1e-3, 5.0), tol=1e-10, spec=None, method="pchip"):
    ode = reductions.reduce(tag, F, G, kind=kind)
    table = reductions.integrate(ode, init, span, tol)
    ode_res = reductions.table_residual(ode, table)
    out = dict(ode=ode, table=table, ode_residual=ode_res)
    if spec is not None:
        fld = reductions.reconstruct(ode, table, spec, method=method)
        fine = reductions.reconstruct(ode, table, spec.refined(), method=method)
        out["field"] = fld
        out["fd"] = residual.grid_residual(fld, F, G, refined=fine)
    return out


def cmd_reduce(args):
    F, G = _profiles_from(args)
    tag = args.cls
    if tag is None:
        tag = classify(F, G)[0].tag
        if tag == "none":
            raise NoReduction("profiles have no symmetry class")
    init = args.branch if args.init is None else tuple(float(v) for v in args.init.split(","))
    span = tuple(float(v) for v in args.span.split(","))
    spec = _grid_from(args, (0.1, 2.0, -2.0, 2.0), default_n=81)
    res = run_reduce(F, G, tag, args.kind, init, span, args.tol, spec, args.method)
    if res["ode_residual"] > 100 * args.tol:
        raise VerificationFailure(f"ODE residual {res['ode_residual']:.3e} exceeds 100*tol")
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    table = res["table"]
    write_csv(out.with_name(out.stem + "_table.csv"), ["y", "w", "dw"], table.to_rows().T)
    ode = res["ode"]
    meta = dict(command="reduce", tag=tag, kind=ode.kind.value, params=ode.params, F=F.text(), G=G.text(),
                table=dict(table.meta, span=list(table.span), nodes=len(table.y)),
                ode_residual=res["ode_residual"], fd_residual=res["fd"].to_dict())
    write_grid(out, res["field"], meta)
    return 0


def cmd_map(args):
    if args.family is None:
        args.family = "weak_power"
        if not _family_params(args):
            args.p_q, args.p_A, args.p_sigma = -0.25, -1.0, -1.0
    sol = _solution(args)
    lam = args.map_lambda
    if args.exceptional:
        image = symmetry.exceptional_map(sol, lam)
    elif args.exp:
        image = symmetry.exp_case_map(sol, lam)
    else:
        image = symmetry.scaling_map(sol, lam)
    rep = _gate(image, args)
    spec = _grid_from(args, image.box)
    field = sample_solution(image, spec)
    meta = dict(command="map", source=sol.family, source_params=sol.params, lam=lam, formula=image.formula,
                residual=rep.to_dict(), seed=args.seed)
    write_grid(Path(args.out), field, meta)
    return 0


def fields_bundle(sol, spec, psi0=0.4, I0=0.0, n_levels=8):
    """psi, p and I grids restricted to psi > psi0 plus the q table."""
    cls = next((c for c in classify(sol.F, sol.G) if c.tag == "a''"), None)
    if cls is None:
        raise NoReduction("pressure and current maps need the q = -1/4 profile class")
    pi = fields.p_and_i_maps(float(cls["a"]), float(cls["b"]), I0=I0, psi0=psi0)
    field = sample_solution(sol, spec)
    field.valid &= field.psi > psi0
    with np.errstate(all="ignore"):
        field.extra["p"] = np.where(field.valid, pi.p(field.psi), np.nan)
        field.extra["i"] = np.where(field.valid, pi.I(np.where(field.valid, field.psi, 1.0)), np.nan)
    axis = fields.magnetic_axis(sol)
    rows = fields.safety_factor(sol, pi.I, fields.level_ladder(psi0, axis[2], n_levels), axis=axis)
    return field, pi, axis, rows


def cmd_fields(args):
    sol = _solution(args)
    rep = _gate(sol, args)
    spec = _grid_from(args, sol.box)
    field, pi, axis, rows = fields_bundle(sol, spec, args.psi0, args.I0, args.levels)
    out = Path(args.out)
    meta = dict(command="fields", family=sol.family, params=sol.params, psi0=args.psi0, I0=args.I0,
                p0=pi.p0, axis=list(axis), residual=rep.to_dict(), seed=args.seed)
    write_grid(out, field, meta)
    _write_q(out.with_name(out.stem + "_q.csv"), rows)
    return 0


def _write_q(path, rows):
    write_csv(path, ["psi", "q_contour", "q_flux"],
              [[r.psi for r in rows], [r.q_contour for r in rows], [r.q_flux for r in rows]])


def cmd_figure(args):
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    which = args.which
    if which == "fig1":
        F, G = ProfileSpec.power(-1, 3, role="F"), ProfileSpec.power(1, 2, role="G")
        spec = GridSpec(0.1, 2.0, -2.0, 2.0, args.nr or 81, args.nz or 81)
        res = run_reduce(F, G, "a", init="2q+2", span=(1e-3, 5.0), tol=1e-10, spec=spec)
        if res["ode_residual"] > 1e-8:
            raise VerificationFailure("fig1 ODE residual above 100*tol")
        write_csv(out / "fig1_table.csv", ["y", "w", "dw"], res["table"].to_rows().T)
        write_grid(out / "fig1.csv", res["field"], dict(
            figure="fig1", q=1, a=-1, b=1, branch="2q+2", ode_residual=res["ode_residual"],
            fd_residual=res["fd"].to_dict()))
    elif which == "fig2":
        sol = linear.separable(-1.0, -2.0, -1.0, c3=0.0, c4=1.0, radial="numeric", r_max=6.0)
        rep = residual.residual(sol, n=args.n_points, seed=args.seed)
        if not rep.passes(args.residual_tol):
            raise VerificationFailure("fig2 residual gate failed")
        spec = GridSpec(0.0, 6.0, -6.0, 6.0, args.nr or 121, args.nz or 121)
        write_grid(out / "fig2.csv", sample_solution(sol, spec), dict(
            figure="fig2", mu=1.0, alpha=1.0, params=sol.params, residual=rep.to_dict(), seed=args.seed))
    elif which == "fig3":
        for sigma in (-0.5, -1.0, -5.0):
            sol = catalog.instantiate("dshape", lam=1.0, A=-1.0, sigma=sigma, shift_z0=True)
            rep = residual.residual(sol, n=args.n_points, seed=args.seed)
            if not rep.passes(args.residual_tol):
                raise VerificationFailure(f"fig3 residual gate failed for sigma={sigma}")
            spec = _grid_from(args, sol.box)
            write_grid(out / f"fig3_sigma{sigma:g}.csv", sample_solution(sol, spec), dict(
                figure="fig3", params=sol.params, formula=sol.formula, residual=rep.to_dict(), seed=args.seed))
    elif which == "fig4":
        sol = catalog.instantiate("dshape", lam=1.0, A=-1.0, sigma=-1.0)
        rep = residual.residual(sol, n=args.n_points, seed=args.seed)
        if not rep.passes(args.residual_tol):
            raise VerificationFailure("fig4 residual gate failed")
        spec = _grid_from(args, sol.box)
        field, pi, axis, rows = fields_bundle(sol, spec, psi0=0.4, I0=0.0)
        write_grid(out / "fig4.csv", field, dict(
            figure="fig4", params=sol.params, psi0=0.4, I0=0.0, p0=pi.p0, axis=list(axis),
            residual=rep.to_dict(), seed=args.seed))
        _write_q(out / "fig4_q.csv", rows)
    return 0


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------


def build_parser():
    top = argparse.ArgumentParser(prog="gssym", description=__doc__.split("\n\n")[0])
    top.add_argument("--config", help="JSON file whose keys mirror the command-line flags")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--residual-tol", type=float, default=RESIDUAL_TOL)
    common.add_argument("--n-points", type=int, default=1000)
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="symmetry classes of a profile pair")
    p.add_argument("--F", required=True)
    p.add_argument("--G", required=True)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("solution", parents=[common], help="sample a closed-form solution")
    _add_family(p)
    _add_grid(p)
    p.add_argument("--out", default="solution.csv")
    p.set_defaults(func=cmd_solution)

    p = sub.add_parser("reduce", parents=[common], help="integrate a reduced ODE and reconstruct psi")
    p.add_argument("--class", dest="cls")
    p.add_argument("--kind", choices=[k.value for k in reductions.Kind])
    p.add_argument("--F")
    p.add_argument("--G")
    p.add_argument("--q", type=float)
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--branch", default="2q+2", choices=["2q+2", "2q"])
    p.add_argument("--init", help="y0,w0,dw0 instead of a branch")
    p.add_argument("--span", default="0.001,5")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--method", choices=["pchip", "hermite"], default="pchip", help="table interpolation")
    _add_grid(p)
    p.add_argument("--out", default="reduce.csv")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("map", parents=[common], help="apply a finite symmetry map to a solution")
    _add_family(p, required=False, skip=("lambda",))
    kind = p.add_mutually_exclusive_group()
    kind.add_argument("--exceptional", action="store_true")
    kind.add_argument("--exp", action="store_true")
    kind.add_argument("--scaling", action="store_true")
    p.add_argument("--lambda", type=float, default=1.0, dest="map_lambda", help="group parameter of the map")
    p.add_argument("--seed-lambda", type=float, dest="p_lambda", help="lambda parameter of the seed family")
    _add_grid(p)
    p.add_argument("--out", default="map.csv")
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("fields", parents=[common], help="p and I grids and the q table")
    _add_family(p)
    _add_grid(p)
    p.add_argument("--psi0", type=float, default=0.4)
    p.add_argument("--I0", type=float, default=0.0)
    p.add_argument("--levels", type=int, default=8)
    p.add_argument("--out", default="fields.csv")
    p.set_defaults(func=cmd_fields)

    p = sub.add_parser("figure", parents=[common], help="data for one of the reference figures")
    p.add_argument("which", choices=["fig1", "fig2", "fig3", "fig4"])
    p.add_argument("--out-dir", default=".")
    _add_grid(p)
    p.set_defaults(func=cmd_figure)
    return top


def _apply_config(parser, argv):
    """Parse ``argv`` with defaults taken from the ``--config`` JSON file.

    Config keys are flag names without the leading dashes (``"shift-z0"``
    or ``"shift_z0"``); ``"command"`` picks the subcommand when none is
    given on the command line.  Explicit flags win over the file.
    """
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, rest = pre.parse_known_args(argv)
    if not known.config:
        return parser.parse_args(argv)
    cfg = dict(json.loads(Path(known.config).read_text()))
    choices = parser._subparsers._group_actions[0].choices
    command = cfg.pop("command", None)
    if not any(a in choices for a in rest):
        if command is None:
            raise ParameterError("config file names no command")
        rest = [command, *rest]
    sub = choices[next(a for a in rest if a in choices)]
    by_flag = {opt: act for act in sub._actions for opt in act.option_strings}
    for key, val in cfg.items():
        act = by_flag.get("--" + key) or by_flag.get("--" + key.replace("_", "-"))
        if act is None:
            if key == "which":
                rest.append(str(val))
                continue
            raise ParameterError(f"unknown config key {key!r}")
        act.default, act.required = val, False
    return parser.parse_args(rest)


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
        if "GS_SEED" in os.environ:
            args.seed = int(os.environ["GS_SEED"])
        return args.func(args)
    except GSError as err:
        print(f"error: {err}", file=sys.stderr)
        return err.exit_code
    except (json.JSONDecodeError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
