"""Command-line entry point: ``cmclab delaunay | freeboundary [cap] | verify``.

Outputs go to ``--out``, else ``$CMCLAB_OUT``, else the working directory.
``--config FILE`` reads a JSON object whose keys override the flags.
"""

import argparse
import csv
import json
import math
import os
from pathlib import Path
import sys

import numpy as np

from . import errors
from .delaunay import Branch, DelaunayParams, USolution, first_integral_residual, make_params, u_closed, u_numeric
from .errors import CmcError
from .freeboundary import (
    boundary_geodesic_curvature,
    contact_start,
    curvature_functions,
    gauss_bonnet_audit,
    shoot,
    solve_for_R,
    spherical_cap,
)
from .pinch import TOL_EQ, TOL_R, TOL_UMB, Topology, Umbilic, Verdict, pinch_report
from .rotation import RotationSurface, mesh, reconstruct_meridian, sample, write_samples_csv

TOL_FIRST_INTEGRAL = 1e-9
TOL_DETERMINANT = 1e-10
TOL_GAUSS_BONNET = 1e-3
TOL_RESIDUAL = 1e-8


class UsageError(CmcError):
    exit_code = 2  # same as argparse usage errors


def _dump_json(obj, path):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, allow_nan=True)
        fh.write("\n")


def _out_dir(args):
    out = Path(args.out or os.environ.get("CMCLAB_OUT") or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _subsample(sol, n_out):
    if n_out is None or len(sol.s) <= n_out:
        return sol
    idx = np.unique(np.linspace(0, len(sol.s) - 1, n_out).round().astype(int))
    return USolution(sol.params, sol.s[idx], sol.u[idx], sol.uprime[idx], sol.source)


def _write_usolution(sol, out, extra=None):
    d = sol.to_dict()
    d["max_first_integral_residual"] = float(np.max(np.abs(sol.residual())))
    d.update(extra or {})
    _dump_json(d, out / "usolution.json")
    sol.to_csv(out / "usolution.csv")


def cmd_delaunay(args):
    params = make_params(args.c, args.H, args.u0, args.a)
    s_max = args.s_max if args.s_max is not None else min(5.0, params.period)
    sol = u_numeric(params, s_max, args.ds)
    dev = float(np.max(np.abs(sol.u - u_closed(params, sol.s))))
    out = _out_dir(args)
    _write_usolution(_subsample(sol, args.n_out), out, {"closed_form_deviation": dev})
    files = ["usolution.json", "usolution.csv"]
    if args.mesh:
        cs = contact_start(args.c, args.H, args.u0, args.a)
        lam, mu = curvature_functions(params)
        profile = reconstruct_meridian(cs.sf, lam, mu, s_max, args.ds_meridian, start=cs.start)
        mesh(RotationSurface(profile.mirror()), args.n_s, args.n_theta).to_obj(out / "mesh.obj", args.chart)
        files.append("mesh.obj")
    return files


def _piece(args):
    if args.mode == "cap":
        if args.R is None:
            raise UsageError("freeboundary cap needs --R")
        return spherical_cap(args.c, args.H, args.R)
    if args.u0 is not None:
        return shoot(args.c, args.H, args.u0, a=args.a, ds=args.ds_meridian, s_max=args.s_max or 20.0,
                     r_max=args.R_max, all_contacts=args.all_contacts)
    if args.R is not None:
        return solve_for_R(args.c, args.H, args.R, a=args.a, ds=args.ds_meridian,
                           s_max=args.s_max or 20.0, jobs=args.jobs).piece
    raise UsageError("freeboundary needs --u0 or --R")


def cmd_freeboundary(args):
    piece = _piece(args)
    out = _out_dir(args)
    files = []
    if piece.params is not None:
        sol = u_numeric(piece.params, piece.s_star, 1e-4)
        _write_usolution(_subsample(sol, args.n_out), out)
        files += ["usolution.json", "usolution.csv"]
    kg = boundary_geodesic_curvature(piece)
    gb = gauss_bonnet_audit(piece, n_s=args.n_gb)
    d = piece.to_dict()
    d["kappa_g"] = kg.analytic.tolist()
    d["kappa_g_fd"] = kg.fd.tolist()
    d["gauss_bonnet"] = gb.to_dict()
    _dump_json(d, out / "piece.json")
    report = pinch_report(piece, n_s=args.n_s, n_theta=args.n_theta, tol_eq=args.tol_eq,
                          tol_umb=args.tol_umb, tol_r=args.tol_r,
                          params={k: d[k] for k in ("u0", "a", "R", "kind")})
    _dump_json(report.to_dict(), out / "pinch.json")
    report.to_csv(out / "pinch.csv")
    write_samples_csv([p.base for p in report.samples], out / "samples.csv")
    files += ["piece.json", "pinch.json", "pinch.csv", "samples.csv"]
    if args.mesh:
        mesh(piece.surface, args.n_s, args.n_theta).to_obj(out / "mesh.obj", args.chart)
        files.append("mesh.obj")
    print(f"verdict: {report.verdict.value}")
    return files


def _read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ValueError(f"{path} has no rows")
    return {k: np.array([float(r[k]) for r in rows]) for k in rows[0]}


def _load_json(path):
    with open(path) as fh:
        return json.load(fh)


def verify_bundle(path, tol_fi=TOL_FIRST_INTEGRAL):
    """Re-check stored artifacts; returns a list of ``(name, ok, value)``."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(path)
    root = path if path.is_dir() else path.parent
    checks = []
    if (root / "usolution.json").exists():
        params = DelaunayParams.from_dict(_load_json(root / "usolution.json")["params"])
        cols = _read_csv(root / "usolution.csv")
        res = first_integral_residual(cols["u"], cols["uprime"], params)
        worst = float(np.max(np.abs(res)))
        checks.append(("first_integral", worst <= tol_fi, worst))
    if (root / "pinch.csv").exists():
        cols = _read_csv(root / "pinch.csv")
        ident = cols["detL"] - (cols["trace_half"] ** 2 - 0.5 * cols["phi_sq"] * cols["grad_nu_f"] ** 2)
        prod = cols["detL"] - cols["hess1"] * cols["hess2"]
        worst = float(max(np.max(np.abs(ident)), np.max(np.abs(prod))))
        checks.append(("determinant_identity", worst <= TOL_DETERMINANT, worst))
        rep = _load_json(root / "pinch.json")
        tol_umb, tol_eq = rep["tolerances"]["umb"], rep["tolerances"]["eq"]
        umb = cols["phi_sq"] <= tol_umb
        status = Umbilic.TOTAL if umb.all() else Umbilic.ISOLATED if umb.any() else Umbilic.NONE
        label = "TotallyUmbilical" if status is Umbilic.TOTAL else status.value
        checks.append((f"umbilic[{label}]", status.value == rep["umbilic"], status.value))
        min_margin = float(np.min(cols["margin"]))
        violated = min_margin < -tol_eq
        consistent = (rep["verdict"] == Verdict.VIOLATED.value) == violated and min_margin == rep["min_margin"]
        checks.append((f"verdict[{rep['verdict']}]", consistent, min_margin))
    if (root / "piece.json").exists():
        piece = _load_json(root / "piece.json")
        worst = float(max(abs(x) for x in piece["residuals"]))
        checks.append(("boundary_residuals", worst <= TOL_RESIDUAL, worst))
        defect = abs(piece["gauss_bonnet"]["defect"])
        checks.append(("gauss_bonnet", defect <= TOL_GAUSS_BONNET, defect))
        kg = min(piece["kappa_g"])
        checks.append(("kappa_g_positive", kg > 1e-6, kg))
    if not checks:
        raise FileNotFoundError(f"no cmclab artifacts in {root}")
    return checks


def cmd_verify(args):
    checks = verify_bundle(args.path, args.tol_first_integral)
    for name, ok, value in checks:
        print(f"{'PASS' if ok else 'FAIL'} {name} {value!r}")
    return all(ok for _, ok, _ in checks)


def _add_common(p):
    p.add_argument("--c", type=float, default=0.0)
    p.add_argument("--H", type=float, default=0.0)
    p.add_argument("--a", type=int, default=1, choices=(1, -1))
    p.add_argument("--s-max", type=float)
    p.add_argument("--ds-meridian", type=float, default=1e-3)
    p.add_argument("--n-s", type=int, default=101)
    p.add_argument("--n-theta", type=int, default=32)
    p.add_argument("--n-out", type=int, default=2001, help="samples kept in usolution outputs")
    p.add_argument("--mesh", action=argparse.BooleanOptionalAction, default=None)
    p.add_argument("--chart", default="auto", choices=("auto", "identity", "gnomonic", "klein"),
                   help="OBJ coordinates for curved models")
    p.add_argument("--out")
    p.add_argument("--config")


def build_parser():
    parser = argparse.ArgumentParser(prog="cmclab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("delaunay", help="integrate the governing ODE and write the profile")
    _add_common(p)
    p.add_argument("--u0", type=float, required=True)
    p.add_argument("--ds", type=float, default=1e-4)
    p.set_defaults(func=cmd_delaunay, mesh_default=False)

    p = sub.add_parser("freeboundary", help="build a free boundary piece and its reports")
    p.add_argument("mode", nargs="?", choices=("cap",))
    _add_common(p)
    p.add_argument("--u0", type=float)
    p.add_argument("--R", type=float)
    p.add_argument("--R-max", type=float)
    p.add_argument("--all-contacts", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--n-gb", type=int, default=2000, help="meridian intervals for Gauss-Bonnet")
    p.add_argument("--tol-eq", type=float, default=TOL_EQ)
    p.add_argument("--tol-umb", type=float, default=TOL_UMB)
    p.add_argument("--tol-r", type=float, default=TOL_R)
    p.set_defaults(func=cmd_freeboundary, mesh_default=True)

    p = sub.add_parser("verify", help="re-check a stored bundle")
    p.add_argument("path")
    p.add_argument("--tol-first-integral", type=float, default=TOL_FIRST_INTEGRAL)
    p.add_argument("--config")
    p.set_defaults(func=cmd_verify)
    return parser


def _apply_config(args):
    cfg = _load_json(args.config)
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    for key, value in cfg.items():
        name = key.replace("-", "_")
        if not hasattr(args, name) or name in ("func", "command", "config"):
            raise UsageError(f"unknown config key {key!r}")
        setattr(args, name, value)


def _validate(args):
    for name in ("tol_eq", "tol_umb", "tol_r", "tol_first_integral"):
        if getattr(args, name, 1.0) <= 0:
            raise UsageError(f"{name} must be positive")
    if getattr(args, "n_s", 3) < 3 or getattr(args, "n_theta", 3) < 3:
        raise UsageError("grids need at least 3 points per direction")


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.config:
            _apply_config(args)
        _validate(args)
        if getattr(args, "mesh", False) is None:
            args.mesh = args.mesh_default
        result = args.func(args)
    except CmcError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except (OSError, ValueError) as exc:
        print(f"IOError: {exc}", file=sys.stderr)
        return errors.EXIT_IO
    if args.command == "verify":
        return 0 if result else errors.EXIT_CHECK_FAILED
    for name in result:
        print(name)
    return 0


if __name__ == "__main__":
    sys.exit(main())
