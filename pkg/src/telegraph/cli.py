"""Command-line front end.

Exit codes: 0 success (nonexistence certificates are results, not
failures), 1 usage or configuration error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import configparser
import json
import logging
import math
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from . import energy, exact, matching, solver
from .errors import (AlphaOutOfRange, CflViolation, DomainError, MaxDepthExceeded,
                     ParseError, TelegraphError)
from .exprlang import compile_fn
from .problem import BoundaryKind, MixedProblem, validate

log = logging.getLogger("telegraph")

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2


class ConfigError(TelegraphError):
    pass


# --------------------------------------------------------------------------
# serialization

def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def to_json(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with floats written to 17 significant digits; non-finite floats become null."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return "null"
        text = fmt_float(obj)
        # keep integral values typed as numbers with a fraction for JSON readers
        return text if any(c in text for c in ".en") else text + ".0"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{to_json(str(k))}: {to_json(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + to_json(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, np.floating):
        return to_json(float(obj), indent, _level)
    if isinstance(obj, np.integer):
        return str(int(obj))
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def to_csv(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt_float(v) if isinstance(v, float) else str(v) for v in row))
    return "\n".join(lines) + "\n"


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}.{i}")
    else:
        yield prefix, obj


def _csv_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return fmt_float(v)
    text = str(v)
    if any(c in text for c in ',"\n'):
        text = '"' + text.replace('"', '""') + '"'
    return text


def render(doc: dict, fmt: str) -> str:
    if fmt == "csv":
        return to_csv(["key", "value"], [(k, _csv_value(v)) for k, v in _flatten(doc)])
    return to_json(doc) + "\n"


def _write(path: Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


# --------------------------------------------------------------------------
# configuration

@dataclass
class RunConfig:
    a: float = 1.0
    boundary: str = "dirichlet"
    phi: str = "0"
    psi: str = "0"
    mu: str = "0"
    F: str = "0"
    f: Optional[str] = None
    g: Optional[str] = None
    T: float = 1.0
    L: float = 1.0
    nt: int = 100
    nx: int = 100
    far_boundary: str = "dirichlet"
    snapshot_stride: int = 10
    blowup_threshold: float = 1e6
    tol: Optional[float] = None
    lam: Optional[float] = None
    support_bound: Optional[float] = None
    z_range: Optional[tuple] = None
    samples: int = 201
    form: str = "derived"
    fmt: Optional[str] = None
    prefix: Optional[str] = None
    exact: dict = field(default_factory=dict)


_KEYS = {
    "problem": {"a": float, "boundary": str, "phi": str, "psi": str, "mu": str, "F": str,
                "f": str, "g": str},
    "grid": {"T": float, "L": float, "nt": int, "nx": int, "far_boundary": str,
             "snapshot_stride": int, "blowup_threshold": float},
    "checks": {"tol": float, "lambda": float, "support_bound": float, "z_range": str,
               "samples": int, "form": str},
    "output": {"format": str, "prefix": str},
    "exact": {"alpha": float, "s": float, "t_max": float, "points": int},
}
_ATTR = {"lambda": "lam", "format": "fmt"}


def _unquote(text: str) -> str:
    text = text.strip()
    if len(text) >= 2 and text[0] == text[-1] and text[0] in "\"'":
        return text[1:-1]
    return text


def load_config(path: Optional[str], base: Optional[RunConfig] = None) -> RunConfig:
    """Read an INI file with sections [problem] [grid] [checks] [output]."""
    cfg = replace(base, exact=dict(base.exact)) if base is not None else RunConfig()
    if path is None:
        return cfg
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
    parser.optionxform = str  # F and f are different keys
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    for section in parser.sections():
        if section not in _KEYS:
            raise ConfigError(f"unknown config section [{section}]")
        for key, raw in parser.items(section):
            conv = _KEYS[section].get(key)
            if conv is None:
                raise ConfigError(f"unknown key {key!r} in [{section}]")
            text = _unquote(raw)
            try:
                value = conv(text)
            except ValueError:
                raise ConfigError(f"[{section}] {key}: cannot parse {text!r} as {conv.__name__}") from None
            if section == "exact":
                cfg.exact[key] = value
            elif key == "z_range":
                try:
                    lo, hi = (float(v) for v in text.split(","))
                except ValueError:
                    raise ConfigError(f"[checks] z_range must be 'lo, hi', got {text!r}") from None
                cfg.z_range = (lo, hi)
            else:
                setattr(cfg, _ATTR.get(key, key), value)
    return cfg


def _fn(src: str, variables, key: str):
    try:
        return compile_fn(src, variables, name=src)
    except ParseError as exc:
        raise ConfigError(f"[problem] {key} = {src!r}: {exc.message} at position {exc.position}") from None


def build_problem(cfg: RunConfig) -> MixedProblem:
    try:
        boundary = BoundaryKind.parse(cfg.boundary)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    g = _fn(cfg.g, ("z",), "g") if cfg.g is not None else None
    if cfg.f is not None:
        f = _fn(cfg.f, ("t", "x", "z"), "f")
    elif g is not None:
        f = energy.minus(g)
    else:
        f = _fn("0", ("t", "x", "z"), "f")
    p = MixedProblem(
        cfg.a, f, _fn(cfg.F, ("t", "x"), "F"), _fn(cfg.phi, ("x",), "phi"),
        _fn(cfg.psi, ("x",), "psi"), _fn(cfg.mu, ("t",), "mu"), boundary,
    )
    try:
        validate(p)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None
    return p


def _require(cfg: RunConfig, attr: str, key: str, section: str):
    value = getattr(cfg, attr)
    if value is None:
        raise ConfigError(f"missing required key {key!r} in [{section}]")
    return value


# --------------------------------------------------------------------------
# commands

def _verdict_doc(v) -> dict:
    if isinstance(v, matching.NonexistenceCertificate):
        return {"verdict": "NonexistenceCertificate", "violated_order": v.order, "certificate": v.text}
    return {"verdict": "Compatible", "violated_order": None, "certificate": None}


def cmd_check_matching(cfg: RunConfig) -> dict:
    p = build_problem(cfg)
    try:
        form = matching.SecondOrderForm(cfg.form.strip().lower())
    except ValueError:
        raise ConfigError(f"[checks] form must be 'derived' or 'literal', got {cfg.form!r}") from None
    report = matching.check(p, form, cfg.tol)
    doc = {
        "boundary": report.boundary.value,
        "residuals": [{"order": k, "value": v} for k, v in report.residuals],
        "tol": report.tol,
        "form": report.form.value if report.form else None,
    }
    doc.update(_verdict_doc(report.verdict))
    doc["assertion_cited"] = report.assertion_cited
    return doc


def cmd_check_energy(cfg: RunConfig) -> dict:
    g_src = _require(cfg, "g", "g", "problem")
    lam = _require(cfg, "lam", "lambda", "checks")
    X = _require(cfg, "support_bound", "support_bound", "checks")
    p = build_problem(cfg)
    g = _fn(g_src, ("z",), "g")
    ep = energy.EnergyProblem(p, g, X)
    rep = energy.blowup_certificate(ep, lam, cfg.samples, z_range=cfg.z_range)
    verdict = rep.verdict
    return {
        "E0": rep.E0,
        "lambda": rep.lam,
        "sign_condition": {
            "range": list(rep.z_range),
            "samples": rep.samples,
            "violations": [{"z": z, "gap": gap} for z, gap in rep.sign_violations],
        },
        "structural": dict(rep.structural),
        "verdict": str(verdict),
        "reasons": list(getattr(verdict, "reasons", ())),
        "certificate": getattr(verdict, "text", None),
        "assertion_cited": energy.CRITERION,
        "notes": list(rep.notes),
    }


def cmd_exact(alpha: float, s: float, ts) -> str:
    ps = exact.PowerSolution.from_alpha(alpha, s)
    t = np.asarray(ts, dtype=float)
    u, ut, utt = (exact.evaluate(ps, t, k) for k in (0, 1, 2))
    res = np.abs(utt - np.power(u, alpha))
    rows = [(float(a), float(b), float(c), float(d), float(e)) for a, b, c, d, e in zip(t, u, ut, utt, res)]
    return to_csv(["t", "u", "ut", "utt", "residual"], rows)


def _grid(cfg: RunConfig) -> solver.GridSpec:
    try:
        return solver.GridSpec(cfg.T, cfg.L, cfg.nt, cfg.nx)
    except ValueError as exc:
        raise ConfigError(f"[grid] {exc}") from None


def cmd_simulate(cfg: RunConfig, prefix: str) -> dict:
    p = build_problem(cfg)
    grid = _grid(cfg)
    try:
        far = solver.FarBoundary.parse(cfg.far_boundary)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    g = _fn(cfg.g, ("z",), "g") if cfg.g is not None else None
    opts = solver.RunOptions(cfg.blowup_threshold, cfg.snapshot_stride, g,
                             support_bound=cfg.support_bound)
    traj = solver.run(p, grid, far, opts)

    rows = [(t, float(x), float(u)) for t, field_ in traj.snapshots for x, u in zip(grid.x, field_)]
    _write(Path(f"{prefix}_snapshots.csv"), to_csv(["t", "x", "u"], rows))
    if g is not None:
        _write(Path(f"{prefix}_energy.csv"), to_csv(["t", "E"], traj.energy_series))
    summary = {"status": str(traj.status)}
    if isinstance(traj.status, solver.BlowUpDetected):
        summary["t_detect"] = traj.status.t_detect
        summary["blowup_threshold"] = cfg.blowup_threshold
    if isinstance(traj.status, solver.NumericalFailure):
        summary["t_fail"] = traj.status.t
        summary["reason"] = traj.status.reason
    summary["grid"] = {"dt": grid.dt, "dx": grid.dx, "nu": grid.courant(p.a),
                       "nt": grid.nt, "nx": grid.nx, "T": grid.T, "L": grid.L}
    summary["max_abs_u"] = traj.max_abs_u
    _write(Path(f"{prefix}_summary.json"), to_json(summary) + "\n")
    return summary


BLOWUP_PRESET = RunConfig(
    a=1.0, boundary="dirichlet", phi="5*bump(x,2,1)", psi="0", mu="0", F="0", g="-z^3",
    T=1.0, L=6.0, nt=75, nx=400, far_boundary="dirichlet", snapshot_stride=5,
    blowup_threshold=1e6, lam=4.0, support_bound=3.0, prefix="blowup",
)


def demo_nonuniqueness(alpha: float, s: float, t0: float, t_end: float,
                       nt: int, nx: int, L: float = 1.0, a: float = 1.0) -> dict:
    """Zero run versus injected glued run on one grid, plus a refinement ratio."""
    if not 0 < s < t0 < t_end:
        raise ConfigError(f"need 0 < s < t0 < t_end, got s={s}, t0={t0}, t_end={t_end}")
    p = exact.nonuniqueness_problem(alpha, a)
    ps = exact.PowerSolution.from_alpha(alpha, s)
    far = solver.FarBoundary.NEUMANN_ZERO
    opts = solver.RunOptions(snapshot_stride=nt)

    def glued_error(grid):
        levels = exact.sample_levels(ps, t0, grid.dt, grid.nx)
        traj = solver.run_from_state(p, grid, far, t0, levels, opts)
        t, u = traj.final
        return traj, u, float(np.max(np.abs(u - exact.evaluate(ps, t))))

    grid = solver.GridSpec(t_end, L, nt, nx)
    n0 = t0 / grid.dt
    if abs(n0 - round(n0)) > 1e-9 * max(1.0, n0):
        raise ConfigError(f"t0={t0} is not a multiple of dt={grid.dt}; adjust --nt")
    zero_traj = solver.run(p, grid, far, opts)
    glued, u_end, err = glued_error(grid)
    _, _, err_fine = glued_error(grid.refined(2))
    zero_end = zero_traj.final[1]
    return {
        "alpha": alpha, "s": s, "t0": t0, "t_end": t_end,
        "zero_status": str(zero_traj.status),
        "glued_status": str(glued.status),
        "zero_max_abs": float(max(np.max(np.abs(u)) for _, u in zero_traj.snapshots)),
        "glued_final_error_vs_exact": err,
        "separation_at_t_end": float(np.max(np.abs(u_end - zero_end))),
        "exact_separation_at_t_end": float(exact.evaluate(ps, t_end)),
        "convergence_ratio": err / err_fine if err_fine > 0 else None,
        "grid": {"dt": grid.dt, "dx": grid.dx, "nu": grid.courant(a), "nt": nt, "nx": nx},
    }


# --------------------------------------------------------------------------
# argument parsing

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _global_flags(parser, default):
    parser.add_argument("--config", default=default, help="INI config file")
    parser.add_argument("--output", default=default, help="output path prefix")
    parser.add_argument("--format", choices=("csv", "json"), default=default)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="telegraph", description=__doc__.splitlines()[0])
    _global_flags(parser, None)
    parser.add_argument("-v", "--verbose", action="store_true")
    common = _Parser(add_help=False)
    _global_flags(common, argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("check-matching", parents=[common], help="corner matching conditions")
    sub.add_parser("check-energy", parents=[common], help="negative-energy blow-up criterion")

    ex = sub.add_parser("exact-eval", parents=[common], help="tabulate the power-law solution")
    ex.add_argument("--alpha", type=float)
    ex.add_argument("--s", type=float)
    ex.add_argument("--t", type=float, action="append", help="evaluation time (repeatable)")
    ex.add_argument("--t-max", type=float)
    ex.add_argument("--points", type=int)

    sub.add_parser("simulate", parents=[common], help="run the leapfrog solver")
    bu = sub.add_parser("demo-blowup", parents=[common], help="simulate the negative-energy preset")
    bu.add_argument("--nx", type=int)
    bu.add_argument("--nt", type=int)

    nu = sub.add_parser("demo-nonuniqueness", parents=[common],
                        help="zero solution versus glued power solution")
    nu.add_argument("--alpha", type=float, default=0.5)
    nu.add_argument("--s", type=float, default=1.0)
    nu.add_argument("--t0", type=float, default=1.5)
    nu.add_argument("--t-end", type=float, default=2.5)
    nu.add_argument("--nt", type=int, default=100)
    nu.add_argument("--nx", type=int, default=20)
    nu.add_argument("--L", type=float, default=1.0)
    nu.add_argument("--a", type=float, default=1.0)
    return parser


def _emit(text: str, path: Optional[Path]) -> None:
    if path is not None:
        _write(path, text)
    sys.stdout.write(text)


def _dispatch(args) -> int:
    cmd = args.command
    base = BLOWUP_PRESET if cmd == "demo-blowup" else None
    cfg = load_config(args.config, base)
    prefix = args.output or cfg.prefix
    fmt = args.format or cfg.fmt

    if cmd == "check-matching":
        doc = cmd_check_matching(cfg)
        _emit(render(doc, fmt or "json"), Path(f"{prefix}_matching.{fmt or 'json'}") if prefix else None)
    elif cmd == "check-energy":
        doc = cmd_check_energy(cfg)
        _emit(render(doc, fmt or "json"), Path(f"{prefix}_energy_check.{fmt or 'json'}") if prefix else None)
    elif cmd == "exact-eval":
        alpha = args.alpha if args.alpha is not None else cfg.exact.get("alpha")
        if alpha is None:
            raise ConfigError("missing --alpha (or [exact] alpha)")
        s = args.s if args.s is not None else cfg.exact.get("s", 0.0)
        if args.t:
            ts = args.t
        else:
            t_max = args.t_max if args.t_max is not None else cfg.exact.get("t_max", 2.0)
            points = args.points if args.points is not None else cfg.exact.get("points", 201)
            if points < 1 or t_max < 0:
                raise ConfigError("need points >= 1 and t_max >= 0")
            ts = np.linspace(0.0, t_max, points)
        if min(ts) < 0:
            raise ConfigError("evaluation times must be non-negative")
        text = cmd_exact(alpha, s, ts)
        if fmt == "json":
            lines = text.strip().split("\n")
            header = lines[0].split(",")
            text = to_json([{h: float(v) for h, v in zip(header, ln.split(","))} for ln in lines[1:]]) + "\n"
        _emit(text, Path(f"{prefix}_exact.{fmt or 'csv'}") if prefix else None)
    elif cmd in ("simulate", "demo-blowup"):
        if cmd == "demo-blowup":
            if args.nx is not None:
                cfg.nx = args.nx
                cfg.nt = args.nt or solver.GridSpec.with_courant(cfg.T, cfg.L, cfg.nx, cfg.a).nt
            elif args.nt is not None:
                cfg.nt = args.nt
        summary = cmd_simulate(cfg, prefix or "simulation")
        sys.stdout.write(to_json(summary) + "\n")
    elif cmd == "demo-nonuniqueness":
        doc = demo_nonuniqueness(args.alpha, args.s, args.t0, args.t_end, args.nt, args.nx, args.L, args.a)
        _emit(render(doc, fmt or "json"), Path(f"{prefix}_nonuniqueness.{fmt or 'json'}") if prefix else None)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help, or a usage error already reported
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _dispatch(args)
    except (ConfigError, AlphaOutOfRange) as exc:
        print(f"telegraph: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, MaxDepthExceeded, CflViolation) as exc:
        print(f"telegraph: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, TelegraphError) as exc:
        print(f"telegraph: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
