"""Configuration-driven command line entry point.

Subcommands:

* ``liegate params``    solve transformation parameters, write params.csv
  and summary.json;
* ``liegate kernel``    build the propagator kernel at t_end, write
  kernel.json, optionally apply it to a Gaussian packet (psi_out.csv);
* ``liegate verify``    run the built-in invariant suite, write report.json;
* ``liegate constants`` export an algebra's structure constants as CSV.

Exit codes: 0 success, 1 verification failure, 2 malformed configuration,
3 domain error, 4 focal-point (caustic) violation.  All failures print a
machine-readable error object to stdout.  Numeric output carries 17
significant digits, so doubles round-trip exactly; identical configuration
and seed produce byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys

import numpy as np

from . import closedforms, greens, oracle, paramflow, quadops, verify
from .coeffs import (
    CoefficientSet1D,
    Derived,
    Exponential,
    FieldProfile2D,
    Sinusoid,
    TimeProfile,
    as_profile,
    profile_from_dict,
)
from .errors import CausticError, ConfigError, DomainError, LiegateError

SYSTEMS_1D = ("lp", "gho", "iontrap", "kanai")
SYSTEMS_2D = ("cp2d", "bsin", "efield")
SYSTEMS = SYSTEMS_1D + SYSTEMS_2D

_TOP_KEYS = {
    "system", "path", "hbar", "t_end", "tol", "samples", "seed",
    "params", "coefficients", "field", "grid", "kernel_t",
}
_GRID_KEYS = {"n", "x_min", "dx"}
_PARAM_KEYS = {
    "lp": {"m", "f"},
    "iontrap": {"m", "K", "k", "omega"},
    "kanai": {"m", "tau", "omega0", "F0", "F1", "omega1"},
    "bsin": {"m", "B0", "omega", "charge"},
    "efield": {"m", "charge", "B", "K", "E0x", "E0y", "E1x", "E1y", "omega", "zeta"},
}
_FIELD_KEYS = {"m", "B", "K", "Ex", "Ey", "charge"}
_COEFF_KEYS = {"a", "b", "c", "d", "e", "g"}


def _fmt(x: float) -> str:
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    return f"{x:.17g}"


def _json_dumps(obj, indent: int = 0) -> str:
    """JSON text with floats at 17 significant digits, keys sorted."""
    pad = "  " * indent
    pad_in = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f'{pad_in}"{k}": {_json_dumps(obj[k], indent + 1)}'
            for k in sorted(obj)
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad_in}{_json_dumps(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return '"nan"'
        if math.isinf(x):
            return '"inf"' if x > 0 else '"-inf"'
        return _fmt(x)
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _require_number(cfg: dict, key: str, *, positive=False, default=None):
    if key not in cfg:
        if default is not None:
            return default
        raise ConfigError(f"missing required field {key!r}", field=key)
    value = cfg[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"field {key!r} must be a number", field=key)
    if positive and value <= 0:
        raise ConfigError(f"field {key!r} must be positive, got {value}", field=key)
    return float(value)


def _number_or_profile(spec, field: str) -> TimeProfile:
    if isinstance(spec, (int, float)) and not isinstance(spec, bool):
        return as_profile(float(spec))
    if isinstance(spec, dict):
        try:
            return profile_from_dict(spec)
        except DomainError as err:
            raise ConfigError(str(err), field=field) from None
    raise ConfigError(f"field {field!r} must be a number or a profile object",
                      field=field)


def load_config(path: str, overrides: dict) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}", field="config")
    except json.JSONDecodeError as err:
        raise ConfigError(f"config is not valid JSON: {err}", field="config")
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object", field="config")
    for key, value in overrides.items():
        if value is not None:
            cfg[key] = value
    validate_config(cfg)
    return cfg


def validate_config(cfg: dict):
    unknown = set(cfg) - _TOP_KEYS
    if unknown:
        key = sorted(unknown)[0]
        raise ConfigError(f"unknown configuration key {key!r}", field=key)
    system = cfg.get("system")
    if system not in SYSTEMS:
        raise ConfigError(
            f"field 'system' must be one of {', '.join(SYSTEMS)}; got {system!r}",
            field="system",
        )
    path = cfg.get("path", "path1")
    if path not in ("path1", "path2"):
        raise ConfigError(f"field 'path' must be 'path1' or 'path2', got {path!r}",
                          field="path")
    _require_number(cfg, "t_end", positive=True)
    _require_number(cfg, "tol", positive=True, default=1e-10)
    _require_number(cfg, "hbar", positive=True, default=1.0)
    if "kernel_t" in cfg:
        _require_number(cfg, "kernel_t", positive=True)
    samples = cfg.get("samples", 201)
    if isinstance(samples, bool) or not isinstance(samples, int) or samples < 2:
        raise ConfigError("field 'samples' must be an integer >= 2", field="samples")
    seed = cfg.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ConfigError("field 'seed' must be an integer", field="seed")
    if "grid" in cfg:
        grid = cfg["grid"]
        if not isinstance(grid, dict):
            raise ConfigError("field 'grid' must be an object", field="grid")
        unknown = set(grid) - _GRID_KEYS
        if unknown:
            key = sorted(unknown)[0]
            raise ConfigError(f"unknown grid key {key!r}", field=f"grid.{key}")
        n = grid.get("n", 1024)
        if isinstance(n, bool) or not isinstance(n, int) or n < 8:
            raise ConfigError("field 'grid.n' must be an integer >= 8", field="grid.n")
        _require_number(grid, "x_min", default=-12.0)
        _require_number(grid, "dx", positive=True, default=24.0 / 1024)
    if system in _PARAM_KEYS:
        params = cfg.get("params")
        if not isinstance(params, dict):
            raise ConfigError(
                f"system {system!r} requires a 'params' object", field="params"
            )
        unknown = set(params) - _PARAM_KEYS[system]
        if unknown:
            key = sorted(unknown)[0]
            raise ConfigError(
                f"unknown parameter {key!r} for system {system!r}",
                field=f"params.{key}",
            )
    if system == "gho":
        coefficients = cfg.get("coefficients")
        if not isinstance(coefficients, dict):
            raise ConfigError("system 'gho' requires a 'coefficients' object",
                              field="coefficients")
        unknown = set(coefficients) - _COEFF_KEYS
        if unknown:
            key = sorted(unknown)[0]
            raise ConfigError(f"unknown coefficient {key!r}",
                              field=f"coefficients.{key}")
    if system == "cp2d":
        fld = cfg.get("field")
        if not isinstance(fld, dict):
            raise ConfigError("system 'cp2d' requires a 'field' object", field="field")
        unknown = set(fld) - _FIELD_KEYS
        if unknown:
            key = sorted(unknown)[0]
            raise ConfigError(f"unknown field component {key!r}",
                              field=f"field.{key}")


def build_problem(cfg: dict):
    """Return ('1d', CoefficientSet1D) or ('2d', FieldProfile2D)."""
    system = cfg["system"]
    hbar = float(cfg.get("hbar", 1.0))
    params = cfg.get("params", {})

    if system == "lp":
        m_prof = _number_or_profile(params.get("m", 1.0), "params.m")
        f_prof = _number_or_profile(params.get("f", 0.0), "params.f")
        a_prof = Derived(
            fn=lambda t, mp=m_prof: 1.0 / mp(t),
            dfn=lambda t, mp=m_prof: -mp.derivative(t) / mp(t) ** 2,
            label="1/m",
        )
        e_prof = Derived(
            fn=lambda t, fp=f_prof: -fp(t),
            dfn=lambda t, fp=f_prof: -fp.derivative(t),
            label="-f",
        )
        return "1d", CoefficientSet1D.build(a=a_prof, e=e_prof, hbar=hbar)

    if system == "gho":
        spec = cfg["coefficients"]
        kwargs = {
            key: _number_or_profile(spec.get(key, 1.0 if key == "a" else 0.0),
                                    f"coefficients.{key}")
            for key in _COEFF_KEYS
        }
        return "1d", CoefficientSet1D(hbar=hbar, **kwargs)

    if system == "iontrap":
        m = _require_number(params, "m", positive=True, default=1.0)
        big_k = _require_number(params, "K", default=1.0)
        small_k = _require_number(params, "k", default=0.0)
        omega = _require_number(params, "omega", positive=True, default=1.0)
        c_prof = Sinusoid(amplitude=small_k, omega=omega, phase=math.pi / 2,
                          offset=big_k)
        return "1d", CoefficientSet1D.build(a=1.0 / m, c=c_prof, hbar=hbar)

    if system == "kanai":
        m = _require_number(params, "m", positive=True, default=1.0)
        tau = _require_number(params, "tau", positive=True, default=1.0)
        omega0 = _require_number(params, "omega0", default=0.25)
        f0 = _require_number(params, "F0", default=0.0)
        f1 = _require_number(params, "F1", default=0.0)
        omega1 = _require_number(params, "omega1", default=1.0)
        # surfaces the critical-damping domain error before any solve
        closedforms.kanai_caldirola_params(m, tau, omega0, f0, f1, omega1, 0.0)
        e_prof = Derived(
            fn=lambda t: -np.exp(t / tau) * (f0 + f1 * np.sin(omega1 * t)),
            dfn=lambda t: (
                -np.exp(t / tau) * (f0 + f1 * np.sin(omega1 * t)) / tau
                - np.exp(t / tau) * f1 * omega1 * np.cos(omega1 * t)
            ),
            label="damped drive",
        )
        return "1d", CoefficientSet1D.build(
            a=Exponential(1.0 / m, -1.0 / tau),
            c=Exponential(m * omega0 * omega0, 1.0 / tau),
            e=e_prof,
            hbar=hbar,
        )

    if system == "cp2d":
        spec = cfg["field"]
        charge = _require_number(spec, "charge", default=1.0)
        kwargs = {
            key: _number_or_profile(spec.get(key, 1.0 if key == "m" else 0.0),
                                    f"field.{key}")
            for key in ("m", "B", "K", "Ex", "Ey")
        }
        return "2d", FieldProfile2D(charge=charge, hbar=hbar, **kwargs)

    if system == "bsin":
        m = _require_number(params, "m", positive=True, default=1.0)
        b0 = _require_number(params, "B0", default=1.0)
        omega = _require_number(params, "omega", positive=True, default=1.0)
        charge = _require_number(params, "charge", default=1.0)
        return "2d", FieldProfile2D.build(
            m=m, B=Sinusoid(amplitude=b0, omega=omega), K=0.0,
            charge=charge, hbar=hbar,
        )

    # efield: constant B, stiffness K, sinusoidal in-plane drive
    m = _require_number(params, "m", positive=True, default=1.0)
    charge = _require_number(params, "charge", default=1.0)
    b = _require_number(params, "B", default=1.0)
    big_k = _require_number(params, "K", default=0.5)
    e0x = _require_number(params, "E0x", default=0.0)
    e0y = _require_number(params, "E0y", default=0.0)
    e1x = _require_number(params, "E1x", default=0.0)
    e1y = _require_number(params, "E1y", default=0.0)
    omega = _require_number(params, "omega", positive=True, default=1.0)
    zeta = _require_number(params, "zeta", default=0.0)
    return "2d", FieldProfile2D.build(
        m=m, B=b, K=big_k,
        Ex=Sinusoid(amplitude=e1x, omega=omega, phase=0.0, offset=e0x),
        Ey=Sinusoid(amplitude=e1y, omega=omega, phase=zeta, offset=e0y),
        charge=charge, hbar=hbar,
    )


def _solve(cfg: dict):
    kind, problem = build_problem(cfg)
    t_end = float(cfg["t_end"])
    tol = float(cfg.get("tol", 1e-10))
    path = cfg.get("path", "path1")
    if kind == "1d":
        solver = paramflow.solve_path1 if path == "path1" else paramflow.solve_path2
        return kind, problem, solver(problem, t_end, tol)
    return kind, problem, paramflow.solve_2d(problem, t_end, tol, path=path)


def _summary(cfg: dict, kind: str, traj) -> dict:
    t_end = float(cfg["t_end"])
    out = {
        "system": cfg["system"],
        "path": cfg.get("path", "path1"),
        "t_end": t_end,
        "tol": float(cfg.get("tol", 1e-10)),
        "valid_to": traj.valid_to if math.isfinite(traj.valid_to) else None,
    }
    if kind == "1d":
        s = traj.sample(t_end)
        out["Delta"] = traj.Delta
        out["shortcut"] = bool(getattr(traj, "shortcut", False))
        out["final"] = {
            "S": s.S, "lam": s.lam, "Pi": s.Pi, "gamma": s.gamma,
            "alpha": s.alpha, "phi": s.phi, "vphi": s.vphi, "beta": s.beta,
            "u": s.u, "udot": s.udot,
        }
    else:
        rec = traj.sample(t_end)
        out["Delta"] = traj.radial.Delta
        out["final"] = {
            "S": rec["S"], "theta": rec["theta"],
            "lam_x": rec["lam_x"], "lam_y": rec["lam_y"],
            "Pi_x": rec["Pi_x"], "Pi_y": rec["Pi_y"],
        }
    return out


def cmd_params(cfg: dict, out_dir: str) -> int:
    kind, _, traj = _solve(cfg)
    samples = int(cfg.get("samples", 201))
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, "params.csv")
    if kind == "1d":
        paramflow.trajectory_to_csv(traj, csv_path, samples)
    else:
        paramflow.trajectory2d_to_csv(traj, csv_path, samples)
    with open(os.path.join(out_dir, "summary.json"), "w") as fh:
        fh.write(_json_dumps(_summary(cfg, kind, traj)) + "\n")
    return 0


_APPLY_RE = re.compile(r"^gaussian\((.*)\)$")


def parse_apply_spec(spec: str) -> dict:
    match = _APPLY_RE.match(spec.strip())
    if not match:
        raise ConfigError(
            f"--apply spec must look like gaussian(sigma=1,x0=0,p0=0); got {spec!r}",
            field="apply",
        )
    out = {"sigma": 1.0, "x0": 0.0, "p0": 0.0}
    body = match.group(1).strip()
    if body:
        for part in body.split(","):
            if "=" not in part:
                raise ConfigError(f"malformed --apply entry {part!r}", field="apply")
            key, value = (s.strip() for s in part.split("=", 1))
            if key not in out:
                raise ConfigError(f"unknown --apply parameter {key!r}", field="apply")
            try:
                out[key] = float(value)
            except ValueError:
                raise ConfigError(f"--apply parameter {key!r} must be a number",
                                  field="apply") from None
    if out["sigma"] <= 0:
        raise ConfigError("--apply sigma must be positive", field="apply")
    return out


def cmd_kernel(cfg: dict, out_dir: str, apply_spec: str | None) -> int:
    kind, problem, traj = _solve(cfg)
    t_kernel = float(cfg.get("kernel_t", cfg["t_end"]))
    path = cfg.get("path", "path1")
    if kind == "1d":
        variant = "lp" if cfg["system"] == "lp" else path
    else:
        variant = "twod_path1" if path == "path1" else "twod_path2"
    kernel = greens.kernel_build(traj, t_kernel, variant)
    os.makedirs(out_dir, exist_ok=True)
    payload = kernel.as_dict()
    payload["system"] = cfg["system"]
    payload["variant"] = variant
    with open(os.path.join(out_dir, "kernel.json"), "w") as fh:
        fh.write(_json_dumps(payload) + "\n")
    if apply_spec is not None:
        if kind != "1d":
            raise DomainError("--apply operates on 1D systems")
        gauss = parse_apply_spec(apply_spec)
        grid_cfg = cfg.get("grid", {})
        n = int(grid_cfg.get("n", 1024))
        x_min = float(grid_cfg.get("x_min", -12.0))
        dx = float(grid_cfg.get("dx", 24.0 / 1024))
        psi0 = oracle.gaussian_state(
            n, x_min, dx, sigma=gauss["sigma"], x0=gauss["x0"], p0=gauss["p0"],
            hbar=float(cfg.get("hbar", 1.0)),
        )
        psi_out = greens.kernel_apply(kernel, psi0)
        greens.wavegrid_to_csv(psi_out, os.path.join(out_dir, "psi_out.csv"))
    return 0


def cmd_verify(out_dir: str, seed: int, corrupt_map: bool) -> int:
    results = verify.run_suite(seed=seed, corrupt_map=corrupt_map)
    os.makedirs(out_dir, exist_ok=True)
    report = {
        "seed": seed,
        "all_passed": all(r.passed for r in results),
        "n_checks": sum(r.count for r in results),
        "checks": [
            {
                "name": r.name,
                "passed": r.passed,
                "measured": r.measured,
                "threshold": r.threshold,
                "count": r.count,
                "note": r.note,
            }
            for r in results
        ],
    }
    with open(os.path.join(out_dir, "report.json"), "w") as fh:
        fh.write(_json_dumps(report) + "\n")
    return 0 if report["all_passed"] else 1


def cmd_constants(algebra: str, out_dir: str) -> int:
    table = quadops.structure_constants(algebra)
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, f"structure_constants_{algebra.lower()}.csv")
    lines = ["i,j,k,num,den"]
    for i, j, k, num, den in quadops.structure_table_rows(table):
        lines.append(f"{i},{j},{k},{num},{den}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    return 0


def _error_json(code: int, err: Exception) -> str:
    payload = {
        "error": {
            "exit_code": code,
            "type": type(err).__name__,
            "message": str(err),
        }
    }
    if isinstance(err, ConfigError) and err.field:
        payload["error"]["field"] = err.field
    if isinstance(err, CausticError) and err.valid_to is not None:
        payload["error"]["valid_to"] = err.valid_to
    return _json_dumps(payload)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="liegate",
        description="Exact time-evolution data for time-dependent quadratic "
                    "Hamiltonians",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_apply=False):
        p.add_argument("--system", choices=SYSTEMS, help="system preset")
        p.add_argument("--path", choices=("path1", "path2"),
                       help="factorization route")
        p.add_argument("--config", required=True, help="JSON configuration file")
        p.add_argument("--t-end", type=float, dest="t_end", help="solve horizon")
        p.add_argument("--tol", type=float, help="integration tolerance")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--seed", type=int, help="seed for randomized suites")
        if with_apply:
            p.add_argument("--apply", help="apply kernel to gaussian(sigma=..,x0=..,p0=..)")

    common(sub.add_parser("params", help="solve transformation parameters"))
    common(sub.add_parser("kernel", help="build the propagator kernel"),
           with_apply=True)

    pv = sub.add_parser("verify", help="run the invariant verification suite")
    pv.add_argument("--out", default=".", help="output directory")
    pv.add_argument("--seed", type=int, default=0, help="suite seed")
    pv.add_argument("--corrupt-map", action="store_true", help=argparse.SUPPRESS)

    pc = sub.add_parser("constants", help="export structure constants as CSV")
    pc.add_argument("--algebra", required=True, choices=("lp", "gho", "cp"))
    pc.add_argument("--out", default=".", help="output directory")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    threads = os.environ.get("LIEGATE_THREADS")
    if threads is not None and not threads.isdigit():
        print(_error_json(2, ConfigError("LIEGATE_THREADS must be an integer",
                                         field="LIEGATE_THREADS")))
        return 2
    try:
        if args.command == "verify":
            return cmd_verify(args.out, args.seed, args.corrupt_map)
        if args.command == "constants":
            return cmd_constants(args.algebra.upper(), args.out)
        overrides = {
            "system": args.system,
            "path": args.path,
            "t_end": args.t_end,
            "tol": args.tol,
            "seed": args.seed,
        }
        cfg = load_config(args.config, overrides)
        if args.command == "params":
            return cmd_params(cfg, args.out)
        return cmd_kernel(cfg, args.out, args.apply)
    except ConfigError as err:
        print(_error_json(2, err))
        return 2
    except CausticError as err:
        print(_error_json(4, err))
        return 4
    except LiegateError as err:
        print(_error_json(3, err))
        return 3


if __name__ == "__main__":
    sys.exit(main())
