"""
Command-line front end.

    fracflow solve    --config run.toml --out rho.csv
    fracflow sample   --config proc.toml --out pts.csv --seed 7
    fracflow validate --case thm31-translation | --all [--out reports/]
    fracflow apply-op --config op.toml --out grad.csv

Exit codes: 0 ok, 1 a validation case failed, 2 bad configuration,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import hashlib
import os
import sys
from pathlib import Path

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from . import __version__, fracops, io, solvers, stochastic, validation
from ._config import set_threads
from .core import Frame, Grid, VectorField, frame_from_angles
from .errors import DomainError, FracflowError

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
BOUNDARY_WARN = 1e-6


class ConfigError(Exception):
    """Invalid or incomplete configuration file."""


def _configure(fn, *args):
    """Run a config-building step; parameter errors become ConfigError."""
    try:
        return fn(*args)
    except ConfigError:
        raise
    except (DomainError, FracflowError, TypeError, ValueError, KeyError) as exc:
        raise ConfigError(str(exc)) from None


# --------------------------------------------------------------------------
# config helpers

def load_config(path) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from None


def _check_keys(cfg: dict, allowed: set, where: str):
    extra = sorted(set(cfg) - allowed)
    if extra:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(extra)}")


def _need(cfg, key, where="config"):
    if key not in cfg:
        raise ConfigError(f"missing required key {key!r} in {where}")
    return cfg[key]


def _grid(cfg) -> Grid:
    g = _need(cfg, "grid")
    if not isinstance(g, dict):
        raise ConfigError("[grid] must be a table")
    _check_keys(g, {"N", "L", "origin"}, "[grid]")
    return Grid(_need(g, "N", "[grid]"), _need(g, "L", "[grid]"), g.get("origin"))


def _frame(cfg, dim) -> Frame:
    if "frame" in cfg and "angles" in cfg:
        raise ConfigError("give either 'frame' or 'angles', not both")
    if "frame" in cfg:
        return Frame(np.asarray(cfg["frame"], dtype=float))
    if "angles" in cfg:
        return frame_from_angles(cfg["angles"], dim)
    return Frame.canonical(dim)


def _resolve(path, base: Path) -> Path:
    p = Path(path)
    return p if p.is_absolute() else base / p


def _sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _float(cfg, key, default=None):
    v = cfg.get(key, default)
    if v is None:
        return None
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{key!r} must be a number")
    return float(v)


# --------------------------------------------------------------------------
# solve

SOLVE_KEYS = {"kind", "grid", "alpha", "t", "frame", "angles", "u", "beta", "lam",
              "initial", "theta", "method"}
INITIAL_KEYS = {"name", "width", "center", "file"}


def build_solve(cfg: dict, base: Path):
    """SolveSpec plus the extra metadata needed to reproduce the run."""
    _check_keys(cfg, SOLVE_KEYS, "solve config")
    grid = _grid(cfg)
    frame = _frame(cfg, grid.dim)
    init = cfg.get("initial", "delta")
    meta = {}
    if isinstance(init, dict):
        _check_keys(init, INITIAL_KEYS, "[initial]")
        if "file" in init:
            src = _resolve(init["file"], base)
            try:
                f0 = io.read_field(src)
            except OSError as exc:
                raise ConfigError(f"cannot read initial field: {exc}") from None
            if f0.grid != grid:
                raise ConfigError("initial field grid differs from [grid]")
            meta["initial_file"] = {"path": str(src), "sha256": _sha256(src)}
            init = f0
        else:
            init = dict(init)
    elif init not in ("delta", "gaussian"):
        raise ConfigError(f"unknown initial datum {init!r}")
    _need(cfg, "alpha")
    _need(cfg, "t")
    spec = solvers.SolveSpec(
        kind=_need(cfg, "kind"), grid=grid, alpha=_float(cfg, "alpha"),
        t=_float(cfg, "t"), frame=frame, u=cfg.get("u"),
        beta=_float(cfg, "beta"), lam=_float(cfg, "lam"), initial=init, theta=cfg.get("theta"))
    method = cfg.get("method", "spectral")
    if spec.kind != "heat-directional" and "method" in cfg:
        raise ConfigError("'method' applies to heat-directional problems only")
    if spec.kind in ("advection", "fade", "fp-transport") and spec.u is None:
        raise ConfigError(f"{spec.kind} needs a velocity 'u'")
    if spec.kind == "fade" and spec.beta is None:
        raise ConfigError("fade needs 'beta'")
    if spec.kind == "fp-transport" and spec.lam is None:
        raise ConfigError("fp-transport needs 'lam'")
    return spec, method, meta


def run_solve(spec, method):
    if spec.kind == "heat-directional":
        theta = spec.theta if spec.theta is not None else spec.frame[0]
        return solvers.solve_heat_directional(spec.initial, theta, spec.alpha, spec.t,
                                              spec.grid, method=method)
    return solvers.solve(spec)


def _warn_boundary(field, out):
    frac = field.boundary_mass_fraction()
    if frac > BOUNDARY_WARN:
        print(f"warning: {frac:.2e} of the mass sits within one spacing of the box boundary; "
              "enlarge L to reduce periodic wrap-around", file=out)


def cmd_solve(args) -> int:
    base = Path(args.config).resolve().parent
    cfg = load_config(args.config)
    spec, method, meta = _configure(build_solve, cfg, base)
    field = run_solve(spec, method)
    io.write_field(args.out, field, {"solve": spec.to_dict(), "method": method,
                                     "config": cfg, **meta})
    print(f"mass = {field.mass():.15g}")
    print(f"min = {field.min():.6g}")
    _warn_boundary(field, sys.stderr)
    return EXIT_OK


# --------------------------------------------------------------------------
# sample

SAMPLE_KEYS = {"process", "n", "t", "seed", "alpha", "u", "frame", "angles", "theta", "lam",
               "tau", "jumps", "dim"}
JUMP_KEYS = {"kind", "dim", "vector", "beta", "r", "p", "values", "probs"}
PROCESSES = ("advection", "subordinated-bm", "compound-poisson", "subordinated-cp",
             "compensated-levy", "fp")


def _jump_law(cfg) -> stochastic.JumpLaw:
    j = _need(cfg, "jumps")
    if not isinstance(j, dict):
        raise ConfigError("[jumps] must be a table")
    _check_keys(j, JUMP_KEYS, "[jumps]")
    return stochastic.JumpLaw(**j)


def _dim_of(cfg):
    for key in ("u", "theta"):
        if key in cfg:
            return len(np.atleast_1d(cfg[key]))
    if "frame" in cfg:
        return len(cfg["frame"])
    if "jumps" in cfg and isinstance(cfg["jumps"], dict):
        j = cfg["jumps"]
        if "vector" in j:
            return len(j["vector"])
        if "dim" in j:
            return int(j["dim"])
    return int(cfg.get("dim", 1))


def sample_job(cfg: dict, seed: int):
    """Validate a process config; returns a zero-argument sampler."""
    _check_keys(cfg, SAMPLE_KEYS, "sample config")
    proc = _need(cfg, "process")
    if proc not in PROCESSES:
        raise ConfigError(f"unknown process {proc!r}; expected one of {', '.join(PROCESSES)}")
    n = _need(cfg, "n")
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ConfigError("'n' must be a positive integer")
    t = _float(cfg, "t", 1.0)
    if t < 0:
        raise ConfigError("'t' must be non-negative")
    sim = stochastic
    if proc == "advection":
        frame = _frame(cfg, _dim_of(cfg))
        return lambda: sim.simulate_advection_process(frame, _need(cfg, "u"), _need(cfg, "alpha"),
                                                      t, n, seed)
    if proc == "subordinated-bm":
        theta = _need(cfg, "theta")
        return lambda: sim.simulate_subordinated_bm(theta, _need(cfg, "alpha"), t, n, seed)
    if proc == "fp":
        frame = _frame(cfg, _dim_of(cfg))
        return lambda: sim.simulate_fp_process(frame, _need(cfg, "u"), _need(cfg, "alpha"),
                                               _need(cfg, "lam"), t, n, seed)
    law = _jump_law(cfg)
    lam = _need(cfg, "lam")
    if proc == "compound-poisson":
        return lambda: sim.simulate_compound_poisson(lam, law, t, n, seed, tau=cfg.get("tau"))
    frame = _frame(cfg, law.dim)
    alpha = _need(cfg, "alpha")
    if proc == "subordinated-cp":
        tau = _need(cfg, "tau")
        return lambda: sim.simulate_subordinated_cp(frame, alpha, lam, law, tau, t, n, seed)
    return lambda: sim.simulate_compensated_levy(frame, alpha, lam, law, t, n, seed)


def run_sample(cfg: dict, seed: int):
    return _configure(sample_job, cfg, seed)()


def _pick_seed(args, cfg) -> int:
    if args.seed is not None:
        return int(args.seed)
    if "seed" in cfg:
        return int(cfg["seed"])
    return int(np.random.SeedSequence().entropy % (1 << 63))


def cmd_sample(args) -> int:
    cfg = load_config(args.config)
    seed = _configure(_pick_seed, args, cfg)
    ens = run_sample(cfg, seed)
    io.write_ensemble(args.out, ens, {"config": {**cfg, "seed": seed}})
    print(f"seed = {seed}")
    print(f"n = {ens.n}, dim = {ens.dim}")
    return EXIT_OK


# --------------------------------------------------------------------------
# apply-op

OPS = ("fractional-gradient", "fractional-divergence", "directional-operator", "riesz",
       "directional-second-power", "fractional-shift")
OP_KEYS = {"op", "input", "beta", "alpha", "order", "frame", "angles", "theta", "u", "shift"}


def run_op(cfg: dict, base: Path):
    _check_keys(cfg, OP_KEYS, "apply-op config")
    op = _need(cfg, "op")
    if op not in OPS:
        raise ConfigError(f"unknown operator {op!r}; expected one of {', '.join(OPS)}")
    src = _resolve(_need(cfg, "input"), base)
    try:
        kind = io.read_sidecar(src).get("type", "field")
        if op == "fractional-divergence" and kind == "vector-field":
            inp = io.read_vector_field(src)
        else:
            inp = io.read_field(src)
    except OSError as exc:
        raise ConfigError(f"cannot read input field: {exc}") from None
    g = inp.grid
    meta = {"input_file": {"path": str(src), "sha256": _sha256(src)}}
    if op == "fractional-gradient":
        return fracops.fractional_gradient(inp, _frame(cfg, g.dim), _need(cfg, "beta")), meta
    if op == "fractional-divergence":
        if not isinstance(inp, VectorField):
            inp = VectorField.constant_times(_need(cfg, "u"), inp)
        return fracops.fractional_divergence(inp, _frame(cfg, g.dim), _need(cfg, "beta")), meta
    if op == "directional-operator":
        return fracops.directional_operator(inp, _frame(cfg, g.dim), _need(cfg, "beta")), meta
    if op == "riesz":
        return fracops.riesz_derivative_1d(inp, _need(cfg, "order")), meta
    if op == "directional-second-power":
        theta = cfg.get("theta", _frame(cfg, g.dim)[0])
        return fracops.fractional_power_directional_second(inp, theta, _need(cfg, "alpha")), meta
    return fracops.fractional_shift(inp, _need(cfg, "shift"), _need(cfg, "alpha")), meta


def cmd_apply_op(args) -> int:
    base = Path(args.config).resolve().parent
    cfg = load_config(args.config)
    out, meta = _configure(run_op, cfg, base)
    meta = {"op": cfg, **meta}
    if isinstance(out, VectorField):
        io.write_vector_field(args.out, out, meta)
    else:
        io.write_field(args.out, out, meta)
        print(f"mass = {out.mass():.15g}")
        print(f"min = {out.min():.6g}")
    return EXIT_OK


# --------------------------------------------------------------------------
# validate

def cmd_validate(args) -> int:
    names = sorted(validation.CASES) if args.all else list(args.case or [])
    if not names:
        raise ConfigError("give --case NAME (repeatable) or --all")
    unknown = [c for c in names if c not in validation.CASES]
    if unknown:
        raise ConfigError(f"unknown case(s): {', '.join(unknown)}; "
                          f"known: {', '.join(sorted(validation.CASES))}")
    outdir = Path(args.out) if args.out else None
    if outdir:
        outdir.mkdir(parents=True, exist_ok=True)
    ok = True
    for name in names:
        rep = validation.run_validation(name, seed=args.seed)
        print(rep.summary(), flush=True)
        if outdir:
            io.write_report(outdir / f"{name}.json", rep)
        ok = ok and rep.passed
    return EXIT_OK if ok else EXIT_FAIL


# --------------------------------------------------------------------------
# entry point

def _default_threads():
    env = os.environ.get("FRACFLOW_THREADS")
    try:
        return int(env) if env else None
    except ValueError:
        return None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fracflow", description="Fractional directional transport toolkit.")
    p.add_argument("--version", action="version", version=f"fracflow {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, config=True, out=True):
        if config:
            sp.add_argument("--config", required=True, help="TOML configuration file")
        if out:
            sp.add_argument("--out", required=config, help="output CSV path")
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--threads", type=int, default=_default_threads(),
                        help="worker cap (default: $FRACFLOW_THREADS or 1); never changes results")

    common(sub.add_parser("solve", help="solve a transport problem on a periodic grid"))
    common(sub.add_parser("sample", help="simulate a process ensemble"))
    common(sub.add_parser("apply-op", help="apply a fractional operator to a stored field"))
    v = sub.add_parser("validate", help="run cross-check cases")
    common(v, config=False)
    grp = v.add_mutually_exclusive_group()
    grp.add_argument("--case", action="append", help="case name (repeatable)")
    grp.add_argument("--all", action="store_true", help="run every registered case")
    return p


COMMANDS = {"solve": cmd_solve, "sample": cmd_sample, "validate": cmd_validate,
            "apply-op": cmd_apply_op}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    if args.threads is not None and args.threads < 1:
        print("error: --threads must be a positive integer", file=sys.stderr)
        return EXIT_CONFIG
    set_threads(args.threads)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (FracflowError, ArithmeticError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
