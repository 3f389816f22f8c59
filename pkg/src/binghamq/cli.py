"""Command-line front end.

Every subcommand reads its settings from three layers: built-in defaults,
then the matching section of an optional INI file (``--config``), then
explicit flags.  Flow parameters live in a shared ``[flow]`` section.

Exit codes: 0 success, 1 numeric failure, 2 usage error, 3 loss of
admissibility.
"""
from __future__ import annotations

import argparse
import configparser
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .closure import roundtrip_study
from .equilibria import critical_alpha, equilibrium_data, solve_branches
from .errors import AdmissibilityLost, CFLViolation, NoConvergence, NonAdmissible
from .leslie import COEFFICIENT_NAMES, ericksen_coefficient, frank_from_order, leslie_coefficients
from .operators import TAGS, operator_matrix
from .dynamics import io
from .dynamics.coupled import (
    FieldState,
    energy_report,
    perturbed_equilibrium,
    step_coupled,
    taylor_green,
)
from .dynamics.limit import SCENARIOS, limit_study
from .dynamics.params import TRACE_VARIANTS, FlowParams
from .dynamics.spectral import SpectralGrid

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE, EXIT_ADMISSIBILITY = 0, 1, 2, 3
PARODI_TOL = 1e-14
FIXTURES = ("perturbed", "equilibrium", "taylor-green")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class Option:
    name: str
    type: type
    default: object
    help: str
    choices: tuple | None = None


def _floats(text):
    if isinstance(text, (tuple, list)):
        return tuple(float(x) for x in text)
    return tuple(float(x) for x in str(text).replace(" ", "").split(",") if x)


def _bool(text):
    if isinstance(text, bool):
        return text
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


FLOW_OPTIONS = (
    Option("de", float, 1.0, "Deborah number"),
    Option("re", float, 1.0, "Reynolds number"),
    Option("gamma_solvent", float, 0.5, "solvent viscosity fraction in (0, 1]"),
    Option("eps", float, 0.01, "interaction-range parameter"),
    Option("alpha_ms", float, 7.0, "Maier-Saupe strength"),
    Option("g_const", float, 1.0, "gradient-energy constant G"),
    Option("gamma_par", float, 0.0, "parallel translational diffusion"),
    Option("gamma_perp", float, 0.0, "perpendicular translational diffusion"),
    Option("n_operator_trace_variant", str, "Q", "isotropic part of N", TRACE_VARIANTS),
)

COMMANDS = {
    "phase": (
        "bifurcation roots and order parameters over an alpha sweep",
        (
            Option("alpha_min", float, 1.0, "first alpha"),
            Option("alpha_max", float, 20.0, "last alpha"),
            Option("alpha_steps", int, 39, "number of alpha values"),
        ),
    ),
    "closure-check": (
        "roundtrip test of the Bingham closure on random admissible Q",
        (
            Option("samples", int, 200, "number of random Q"),
            Option("min_margin", float, 0.02, "eigenvalue distance from the admissible bounds"),
            Option("level", int, 32, "quadrature level"),
            Option("tol", float, 1e-10, "roundtrip tolerance"),
        ),
    ),
    "operators": (
        "5x5 matrices and spectra of Qn, Jn, Kn, Ln",
        (
            Option("alpha", _floats, (7.0,), "Maier-Saupe strengths (comma separated)"),
            Option("director", _floats, (0.0, 0.0, 1.0), "director as x,y,z"),
        ),
    ),
    "leslie": (
        "Leslie coefficients as JSON",
        (
            Option("alpha", float, 7.0, "Maier-Saupe strength"),
            Option("j", _floats, (), "interaction moments J1..J5 for the Frank constants"),
            Option("g", float, -1.0, "gradient constant G for the Ericksen coefficient (negative: skip)"),
        ),
    ),
    "simulate": (
        "coupled Q-velocity run on a periodic box",
        (
            Option("nx", int, 32, "grid points in x"),
            Option("ny", int, 32, "grid points in y"),
            Option("lx", float, 2 * math.pi, "box length in x"),
            Option("ly", float, 2 * math.pi, "box length in y"),
            Option("t_end", float, 1.0, "final time"),
            Option("dt", float, 0.01, "time step"),
            Option("every", int, 10, "steps between time-series rows"),
            Option("fixture", str, "perturbed", "initial data", FIXTURES),
            Option("angle_amp", float, 0.3, "director perturbation amplitude (radians)"),
            Option("speed_amp", float, 0.1, "initial velocity amplitude"),
            Option("modes", int, 3, "Fourier degree of the perturbation"),
            Option("freeze_velocity", _bool, False, "keep v fixed"),
            Option("checkpoint", str, "", "final checkpoint path (empty: none)"),
            Option("checkpoint_format", str, "npz", "checkpoint format", ("npz", "csv")),
        ),
    ),
    "limit": (
        "small-Deborah convergence table",
        (
            Option("scenario", str, "homogeneous-shear", "limit scenario", SCENARIOS),
            Option("de_list", _floats, (0.1, 0.05, 0.025), "decreasing Deborah numbers"),
            Option("t_end", float, 2.0, "final time"),
            Option("nx", int, 32, "grid points (splay scenario)"),
        ),
    ),
}
USES_FLOW = ("simulate", "limit")
# settings that do not change results and stay out of the config hash
OUTPUT_KEYS = ("output", "plot", "checkpoint", "config")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI file; flags override its values")
    common.add_argument("--seed", type=int, default=None, help="random seed (default 0)")
    common.add_argument("--output", "-o", help="output file (default: stdout)")
    common.add_argument("--plot", action="store_true", help="also write a gnuplot script next to the output")

    parser = argparse.ArgumentParser(prog="binghamq", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=io.package_version())
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (help_text, options) in COMMANDS.items():
        sp = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        opts = options + (FLOW_OPTIONS if name in USES_FLOW else ())
        for opt in opts:
            flag = "--" + opt.name.replace("_", "-")
            kw = {"default": None, "help": f"{opt.help} (default {opt.default!r})"}
            kw["type"] = str if opt.type is _floats else opt.type
            if opt.type is _bool:
                kw["type"] = _bool
            if opt.choices:
                kw["choices"] = opt.choices
            sp.add_argument(flag, **kw)
    return parser


def _read_config(path):
    cp = configparser.ConfigParser()
    if path:
        if not Path(path).is_file():
            raise UsageError(f"config file not found: {path}")
        cp.read(path)
    return cp


def resolve(args):
    """Merge defaults, config file and flags into a plain dict."""
    cp = _read_config(args.config)
    _, options = COMMANDS[args.command]
    out = {"command": args.command}
    layers = [(options, args.command)]
    if args.command in USES_FLOW:
        layers.append((FLOW_OPTIONS, "flow"))
    for opts, section in layers:
        for opt in opts:
            val = getattr(args, opt.name)
            if val is None and cp.has_option(section, opt.name):
                val = cp.get(section, opt.name)
            if val is None:
                val = opt.default
            try:
                val = opt.type(val)
            except (TypeError, ValueError) as exc:
                raise UsageError(f"bad value for {opt.name}: {exc}") from exc
            if opt.choices and val not in opt.choices:
                raise UsageError(f"{opt.name} must be one of {opt.choices}")
            out[opt.name] = val
    seed = args.seed
    if seed is None and cp.has_option("run", "seed"):
        seed = cp.getint("run", "seed")
    out["seed"] = 0 if seed is None else int(seed)
    out["output"] = args.output
    out["plot"] = args.plot
    if out.get("checkpoint") == "":
        out["checkpoint"] = None
    return out


def hashed_config(cfg):
    return {k: (list(v) if isinstance(v, tuple) else v) for k, v in cfg.items() if k not in OUTPUT_KEYS}


def flow_params(cfg):
    try:
        return FlowParams(**{o.name: cfg[o.name] for o in FLOW_OPTIONS})
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _emit(cfg, text):
    path = cfg.get("output")
    if path and path != "-":
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _plot_script(cfg, xcol, ycols, logscale=False):
    path = cfg.get("output")
    if not cfg.get("plot"):
        return
    if not path or path == "-":
        raise UsageError("--plot needs --output")
    lines = ["set datafile separator ','", "set datafile commentschars '#'", "set key autotitle columnhead"]
    if logscale:
        lines.append("set logscale xy")
    plots = [f"'{Path(path).name}' using '{xcol}':'{y}' with linespoints" for y in ycols]
    lines.append("plot " + ", \\\n     ".join(plots))
    Path(path).with_suffix(".gp").write_text("\n".join(lines) + "\n")


# subcommands -------------------------------------------------------------

def cmd_phase(cfg):
    lo, hi, n = cfg["alpha_min"], cfg["alpha_max"], cfg["alpha_steps"]
    if n < 1 or lo > hi or (n > 1 and lo == hi):
        raise UsageError("empty alpha sweep")
    if lo <= 0 or hi > 100:
        raise UsageError("alpha range must lie in (0, 100]")
    a_star, _ = critical_alpha()
    rows = []
    for a in np.linspace(lo, hi, n):
        br = solve_branches(a)
        roots = list(br.roots) + [math.nan] * (3 - len(br.roots))
        s2 = list(br.s2) + [math.nan] * (3 - len(br.s2))
        s4 = list(br.s4) + [math.nan] * (3 - len(br.s4))
        marker = "critical" if abs(a - a_star) <= 1e-12 * a_star else ("above" if a > a_star else "below")
        rows.append((a, len(br.roots), *roots, *s2, *s4, marker))
    cols = ("alpha", "n_roots", "eta_a", "eta_b", "eta_c", "s2_a", "s2_b", "s2_c", "s4_a", "s4_b", "s4_c", "regime")
    cfg_h = {**hashed_config(cfg), "alpha_star": a_star}
    _emit(cfg, io.write_csv(None, cols, rows, cfg_h))
    _plot_script(cfg, "alpha", ["eta_a"])
    return EXIT_OK


def cmd_closure_check(cfg):
    if cfg["samples"] < 1:
        raise UsageError("samples must be positive")
    rep = roundtrip_study(cfg["samples"], cfg["seed"], cfg["min_margin"], cfg["level"])
    ok = rep.passed(cfg["tol"])
    cols = ("samples", "max_residual", "max_solver_residual", "median_cold", "median_warm", "max_iterations", "pass")
    row = (rep.samples, rep.max_residual, rep.max_solver_residual, rep.median_cold, rep.median_warm,
           rep.max_iterations, "pass" if ok else "fail")
    _emit(cfg, io.write_csv(None, cols, [row], hashed_config(cfg)))
    print(f"max roundtrip residual {rep.max_residual:.3e} ({'pass' if ok else 'fail'})", file=sys.stderr)
    return EXIT_OK if ok else EXIT_NUMERIC


def cmd_operators(cfg):
    n = np.asarray(cfg["director"], dtype=float)
    if n.shape != (3,) or not np.linalg.norm(n) > 0:
        raise UsageError("director needs three components, not all zero")
    n = n / np.linalg.norm(n)
    if not cfg["alpha"]:
        raise UsageError("empty alpha list")
    rows = []
    for alpha in cfg["alpha"]:
        eq = equilibrium_data(alpha, n)
        for tag in TAGS:
            om = operator_matrix(tag, eq, validate=False)
            for i, r in enumerate(om.matrix):
                rows.append((alpha, tag, str(i), *r))
            rows.append((alpha, tag, "eig", *om.eigenvalues))
    cols = ("alpha", "tag", "row", "c0", "c1", "c2", "c3", "c4")
    _emit(cfg, io.write_csv(None, cols, rows, hashed_config(cfg)))
    return EXIT_OK


def cmd_leslie(cfg):
    c = leslie_coefficients(cfg["alpha"])
    record = {name: c.as_dict()[name] for name in COEFFICIENT_NAMES}
    if cfg["j"]:
        if len(cfg["j"]) != 5:
            raise UsageError("j needs five values J1..J5")
        k = frank_from_order(cfg["j"], c.s2, c.s4)
        record.update(k1=k.k1, k2=k.k2, k3=k.k3)
    if cfg["g"] >= 0:
        record["ericksen"] = ericksen_coefficient(cfg["alpha"], cfg["g"])
    record.update(
        eta=c.eta, s2=c.s2, s4=c.s4,
        parodi_residual=c.parodi_residual,
        parodi="pass" if abs(c.parodi_residual) <= PARODI_TOL else "fail",
        version=io.package_version(),
        config_hash=io.config_hash(hashed_config(cfg)),
        params=hashed_config(cfg),
    )
    _emit(cfg, json.dumps(record, indent=2, sort_keys=True) + "\n")
    return EXIT_OK if record["parodi"] == "pass" else EXIT_NUMERIC


def initial_state(cfg, p: FlowParams):
    if min(cfg["nx"], cfg["ny"]) < 4:
        raise UsageError("grid needs at least 4 points per direction")
    grid = SpectralGrid(cfg["nx"], cfg["ny"], cfg["lx"], cfg["ly"])
    eq = equilibrium_data(p.alpha_ms, (1.0, 0.0, 0.0))
    fixture = cfg["fixture"]
    if fixture == "perturbed":
        state = perturbed_equilibrium(
            grid, eq.s2, np.random.default_rng(cfg["seed"]),
            angle_amp=cfg["angle_amp"], speed_amp=cfg["speed_amp"], modes=cfg["modes"],
        )
    elif fixture == "equilibrium":
        q = np.broadcast_to(eq.q0, grid.shape + (3, 3)).copy()
        state = FieldState(grid=grid, q=q, v=np.zeros(grid.shape + (2,)))
    else:
        state = taylor_green(grid, eq.q0, cfg["speed_amp"])
    state.freeze_velocity = cfg["freeze_velocity"]
    return state


def cmd_simulate(cfg):
    p = flow_params(cfg)
    if cfg["dt"] <= 0 or cfg["t_end"] <= 0 or cfg["every"] < 1:
        raise UsageError("dt, t_end and every must be positive")
    state = initial_state(cfg, p)
    nsteps = max(1, int(math.ceil(cfg["t_end"] / cfg["dt"] - 1e-12)))
    dt = cfg["t_end"] / nsteps
    series = io.TimeSeriesWriter(None, hashed_config(cfg))
    series.append(energy_report(state, p))
    status = EXIT_OK
    try:
        for k in range(nsteps):
            step_coupled(state, p, dt)
            if (k + 1) % cfg["every"] == 0 or k + 1 == nsteps:
                series.append(energy_report(state, p))
    except AdmissibilityLost as exc:
        print(f"admissibility lost: {exc}", file=sys.stderr)
        status = EXIT_ADMISSIBILITY
    _emit(cfg, series.write())
    _plot_script(cfg, "t", ["total"])
    if cfg.get("checkpoint"):
        io.save_checkpoint(cfg["checkpoint"], state, p, cfg["checkpoint_format"], hashed_config(cfg))
    return status


def cmd_limit(cfg):
    p = flow_params(cfg)
    try:
        table = limit_study(cfg["de_list"], cfg["scenario"], p, t_end=cfg["t_end"], nx=cfg["nx"])
    except ValueError as exc:
        if isinstance(exc, NonAdmissible):
            raise
        raise UsageError(str(exc)) from exc
    cols = ("de", "error", "order", "biaxiality", "manifold_distance", "s2", "s2_error", "min_margin")
    rows = [
        (r.de, r.error, r.order, r.biaxiality, r.manifold_distance, r.s2, r.s2_error, r.min_margin)
        for r in table.rows
    ]
    cfg_h = {**hashed_config(cfg), "s2_eq": table.s2_eq, "manifold_constant": table.manifold_constant}
    _emit(cfg, io.write_csv(None, cols, rows, cfg_h))
    _plot_script(cfg, "de", ["error"], logscale=True)
    return EXIT_OK


HANDLERS = {
    "phase": cmd_phase,
    "closure-check": cmd_closure_check,
    "operators": cmd_operators,
    "leslie": cmd_leslie,
    "simulate": cmd_simulate,
    "limit": cmd_limit,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        cfg = resolve(args)
        return HANDLERS[args.command](cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (AdmissibilityLost, NonAdmissible) as exc:
        print(f"admissibility error: {exc}", file=sys.stderr)
        return EXIT_ADMISSIBILITY
    except (NoConvergence, CFLViolation, RuntimeError, FloatingPointError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
