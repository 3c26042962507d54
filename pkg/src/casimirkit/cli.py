"""Command-line front end.

Every subcommand writes a CSV (to ``--out`` or stdout) whose first line is
``# provenance: <sha256>``, the hash of the resolved configuration.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analytic import (CoefficientTableError, RoughnessSpec, RoughnessValidityError,
                       SmallParameterError, roughness_correct)
from .dielectric import (ALUMINIUM, ModelSpecError, Plasma, Superconductor, eps_imag_axis,
                         parse_model, parse_quantity)
from .lifshitz import (REL_TOL_ENV, MatsubaraConvergenceError, PFAValidityError, PlatePlate,
                       QuadratureConfig, SpherePlate)
from .metrology import (CurveTheory, FitError, ForceCurve, MeasuredSeries, config_hash,
                        format_float, generate_curve, interval_sensitivity, point_function,
                        sc_delta_sweep, synth_data)
from .optics import KKQuadratureError, TableError
from ._quadrature import QuadratureError
from .superconductor import MBQuadratureError, NormalStateError

EPILOG = f"""\
environment:
  {REL_TOL_ENV}   default relative quadrature tolerance (1e-9 when unset);
                        --rel-tol overrides it.

config files hold one key=value per line (# starts a comment); keys are the
long flag names without the leading dashes, e.g. "T = 300" or
"roughness = 8e-9,2e-9".  Flags given on the command line win.
"""


class UsageError(ValueError):
    pass


# -- value parsers ------------------------------------------------------------

def parse_grid(text):
    """``min:max:count:lin|log`` or a single number."""
    parts = str(text).split(":")
    try:
        if len(parts) == 1:
            return np.array([float(parts[0])])
        if len(parts) != 4:
            raise UsageError(f"grid spec {text!r} is not min:max:count:lin|log")
        lo, hi, count, mode = float(parts[0]), float(parts[1]), int(parts[2]), parts[3].lower()
    except ValueError as exc:
        if isinstance(exc, UsageError):
            raise
        raise UsageError(f"cannot parse grid spec {text!r}") from None
    if not lo < hi:
        raise UsageError("grid min must be below max")
    if count < 1:
        raise UsageError("grid count must be at least 1")
    if mode == "lin":
        return np.linspace(lo, hi, count)
    if mode == "log":
        if lo <= 0:
            raise UsageError("log grid needs a positive minimum")
        return np.geomspace(lo, hi, count)
    raise UsageError(f"grid mode must be lin or log, got {mode!r}")


def _pair(text, name):
    try:
        a, b = (float(v) for v in str(text).split(","))
    except ValueError:
        raise UsageError(f"--{name} expects two comma-separated numbers") from None
    return a, b


def _floats(text, name):
    try:
        return [float(v) for v in str(text).split(",")]
    except ValueError:
        raise UsageError(f"--{name} expects comma-separated numbers") from None


def read_config(path):
    out = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = line.split("=", 1)
        out[key.strip().replace("-", "_")] = value.strip()
    return out


# -- parser ---------------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    common.add_argument("--config", help="key=value configuration file")
    common.add_argument("--out", help="output CSV path (default: stdout)")
    common.add_argument("--rel-tol", type=float, help=f"quadrature tolerance (env {REL_TOL_ENV})")
    common.add_argument("--max-terms", type=int, help="Matsubara term budget")
    common.add_argument("--workers", type=int, default=1, help="parallel processes")

    bodies = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    bodies.add_argument("--geometry", choices=["sphere-plate", "plate-plate"],
                        default="sphere-plate")
    bodies.add_argument("--R", type=float, default=55e-6, help="sphere radius, m")
    bodies.add_argument("--sphere", default="drude:wp=9.0eV,gamma=0.02eV",
                        help="sphere (or first plate) model spec")
    bodies.add_argument("--plate", default="drude:wp=9.0eV,gamma=0.035eV", help="plate model spec")
    bodies.add_argument("--T", type=float, default=300.0, help="temperature, K")
    bodies.add_argument("--roughness", help="rms_sphere,rms_plate in m")
    bodies.add_argument("--kind", choices=["lifshitz", "ideal", "perturbation"],
                        default="lifshitz", help="theory used for the curve")

    parser = argparse.ArgumentParser(
        prog="casimirkit", description="Casimir pressures and forces from Lifshitz theory.",
        epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter,
        allow_abbrev=False)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub_kw = {"allow_abbrev": False}

    p = sub.add_parser("eps", parents=[common], **sub_kw,
                       help="permittivity on the imaginary axis")
    p.add_argument("--model", help="model spec, e.g. plasma:wp=9.0eV")
    p.add_argument("--xi", help="xi in rad/s (number or grid spec)")
    p.add_argument("--T", type=float, default=300.0, help="temperature, K")

    p = sub.add_parser("curve", parents=[common, bodies], **sub_kw,
                       help="force or pressure curve")
    p.add_argument("--a", help="separation grid min:max:count:lin|log, m")

    p = sub.add_parser("pressure", parents=[common], **sub_kw, help="plate-plate pressure")
    p.add_argument("--m1", default="drude:wp=9.0eV,gamma=0.02eV")
    p.add_argument("--m2", default="drude:wp=9.0eV,gamma=0.035eV")
    p.add_argument("--T", type=float, default=300.0)
    p.add_argument("--a", help="separation (m) or grid spec")
    p.add_argument("--roughness", help="rms1,rms2 in m")

    for name, text in (("fit", "RMS offset fit of a measured series"),
                       ("synth", "synthetic measured series")):
        p = sub.add_parser(name, parents=[common, bodies], **sub_kw, help=text)
        p.add_argument("--theory-curve", help="cached curve CSV used as the theory")
        if name == "fit":
            p.add_argument("--data", help="measured series CSV (z_m,f_N,sigma_N)")
            p.add_argument("--interval", action="append",
                           help="a_min,a_max in m; repeat for interval sensitivity")
            p.add_argument("--bracket", default="0,100e-9", help="offset bracket lo,hi in m")
        else:
            p.add_argument("--a", help="true separation grid spec, m")
            p.add_argument("--a0", type=float, default=0.0, help="true offset, m")
            p.add_argument("--noise", type=float, default=0.0, help="noise rms, N")
            p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("sweep-sc", parents=[common], **sub_kw,
                       help="superconducting pressure change")
    p.add_argument("--a", type=float, default=100e-9, help="separation, m")
    p.add_argument("--tc", type=float, default=ALUMINIUM.t_c, help="critical temperature, K")
    p.add_argument("--wp", default="14.75eV", help="plasma frequency (eV or rad/s)")
    p.add_argument("--gamma", default="0.0818eV", help="relaxation rate (eV or rad/s)")
    p.add_argument("--model", choices=["mb", "plasma"], default="mb")
    p.add_argument("--normal", choices=["drude", "plasma"],
                   help="baseline continued below t_c (default: drude for mb, plasma otherwise)")
    p.add_argument("--t-fractions", default="1,0.9,0.7,0.5,0.3,0.2", help="T/T_c values")
    p.add_argument("--gap0-ratio", type=float, default=1.764)
    return parser


def parse_args(argv):
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    args = parser.parse_args(argv)
    if known.config:
        cfg = read_config(known.config)
        sub = parser._subparsers._group_actions[0].choices[args.command]
        dests = {a.dest: a for a in sub._actions}
        explicit = _explicit_dests(sub, argv)
        for key, value in cfg.items():
            if key not in dests or key in ("config", "help"):
                raise UsageError(f"unknown config key {key!r} for {args.command}")
            if key in explicit:
                continue
            action = dests[key]
            if isinstance(action, argparse._AppendAction):
                value = [value]
            elif action.type is not None:
                try:
                    value = action.type(value)
                except ValueError:
                    raise UsageError(f"bad config value {key}={value}") from None
            if action.choices is not None and value not in action.choices:
                raise UsageError(f"config {key} must be one of {sorted(action.choices)}")
            setattr(args, key, value)
    return args


def _explicit_dests(sub, argv):
    flags = {}
    for action in sub._actions:
        for opt in action.option_strings:
            flags[opt] = action.dest
    found = set()
    for tok in argv:
        name = tok.split("=", 1)[0]
        if name in flags:
            found.add(flags[name])
    return found


# -- helpers ----------------------------------------------------------------------

def _quad(args, default_terms=None):
    kw = {}
    if args.rel_tol is not None:
        kw["rel_tol"] = args.rel_tol
    terms = args.max_terms if args.max_terms is not None else default_terms
    if terms is not None:
        kw["max_matsubara_terms"] = terms
    try:
        return QuadratureConfig(**kw)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _need(args, name):
    value = getattr(args, name)
    if value is None:
        raise UsageError(f"--{name.replace('_', '-')} is required")
    return value


def _roughness(text):
    if text is None:
        return None
    s, p = _pair(text, "roughness")
    try:
        return RoughnessSpec(s, p)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _resolved(args):
    skip = {"config", "out", "workers"}
    out = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    # the environment may change the effective tolerance
    out["rel_tol_effective"] = _quad(args).rel_tol
    return out


def _emit(args, text):
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _table(args, header, rows, extra_comments=()):
    prov = _resolved(args)
    lines = [f"# provenance: {config_hash(prov)}",
             f"# config: {json.dumps(prov, sort_keys=True, default=str)}"]
    lines += [f"# {c}" for c in extra_comments]
    lines.append(",".join(header))
    lines += [",".join(v if isinstance(v, str) else format_float(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def _geometry_models(args):
    geometry = SpherePlate(args.R) if args.geometry == "sphere-plate" else PlatePlate()
    base = Path(args.config).parent if args.config else None
    return geometry, parse_model(args.sphere, base), parse_model(args.plate, base)


def _theory(args, q):
    if args.theory_curve:
        return CurveTheory(ForceCurve.from_csv(Path(args.theory_curve).read_text("utf-8")))
    geometry, ms, mp = _geometry_models(args)
    fn = point_function(args.kind, geometry, ms, mp, args.T, q)
    rough = _roughness(args.roughness)
    if rough is None:
        return fn
    return lambda a: roughness_correct(fn, a, rough)


# -- subcommands --------------------------------------------------------------------

def cmd_eps(args):
    model = parse_model(_need(args, "model"))
    xi = parse_grid(_need(args, "xi"))
    values = np.atleast_1d(eps_imag_axis(model, xi, args.T))
    return _table(args, ["xi_rad_s", "eps"], zip(xi, values))


def cmd_curve(args):
    grid = parse_grid(_need(args, "a"))
    geometry, ms, mp = _geometry_models(args)
    curve = generate_curve(geometry, ms, mp, args.T, _roughness(args.roughness), grid,
                           _quad(args), kind=args.kind, workers=args.workers)
    return curve.to_csv()


def cmd_pressure(args):
    grid = parse_grid(_need(args, "a"))
    curve = generate_curve(PlatePlate(), parse_model(args.m1), parse_model(args.m2), args.T,
                           _roughness(args.roughness), grid, _quad(args), workers=args.workers)
    return curve.to_csv()


def cmd_fit(args):
    data = MeasuredSeries.from_csv(Path(_need(args, "data")).read_text("utf-8"))
    intervals = [_pair(iv, "interval") for iv in _need(args, "interval")]
    theory = _theory(args, _quad(args))
    sens = interval_sensitivity(data, theory, intervals, bracket=_pair(args.bracket, "bracket"))
    rows = [(r.interval[0], r.interval[1], r.a0, r.rms, str(r.n_points)) for r in sens.results]
    return _table(args, ["a_min_m", "a_max_m", "a0_m", "rms_N", "n_points"], rows,
                  [f"spread_m: {format_float(sens.spread)}"])


def cmd_synth(args):
    grid = parse_grid(_need(args, "a"))
    series = synth_data(_theory(args, _quad(args)), grid, args.a0, args.noise, args.seed)
    return series.to_csv(config_hash(_resolved(args)))


def cmd_sweep_sc(args):
    try:
        wp, gamma = parse_quantity(args.wp, "wp"), parse_quantity(args.gamma, "gamma")
        model = Superconductor(wp, gamma, args.tc, args.model, args.gap0_ratio)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    normal = args.normal or ("drude" if args.model == "mb" else "plasma")
    normal_model = model.normal_state if normal == "drude" else Plasma(wp)
    temps = [f * args.tc for f in _floats(args.t_fractions, "t-fractions")]
    points = sc_delta_sweep(args.a, model, temps, normal_model,
                            _quad(args, default_terms=2_000_000), workers=args.workers)
    rows = [(p.t, p.delta_p, p.pressure, p.delta_p / abs(p.pressure)) for p in points]
    return _table(args, ["t_K", "delta_p_Pa", "p_normal_Pa", "relative"], rows)


COMMANDS = {"eps": cmd_eps, "curve": cmd_curve, "pressure": cmd_pressure, "fit": cmd_fit,
            "synth": cmd_synth, "sweep-sc": cmd_sweep_sc}


def _category(exc):
    match exc:
        case MatsubaraConvergenceError():
            return "convergence"
        case QuadratureError() | KKQuadratureError() | MBQuadratureError():
            return "quadrature"
        case PFAValidityError() | SmallParameterError() | RoughnessValidityError() \
                | NormalStateError():
            return "domain"
        case FitError():
            return "fit"
        case TableError() | CoefficientTableError():
            return "input"
        case OSError():
            return "io"
    return "value"


def _fail(category, exc, code):
    sys.stderr.write(f"casimirkit: error: category={category} type={type(exc).__name__} "
                     f"message={exc}\n")
    return code


def run(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (UsageError, OSError) as exc:
        return _fail("usage", exc, 2)
    try:
        text = COMMANDS[args.command](args)
    except (UsageError, ModelSpecError) as exc:
        return _fail("usage", exc, 2)
    except (ValueError, RuntimeError, OSError, TypeError) as exc:
        return _fail(_category(exc), exc, 1)
    _emit(args, text)
    return 0


def main():
    return run()


__all__ = ["build_parser", "main", "parse_grid", "run"]
