"""Command-line entry point: ``tensurf {verify,converge,pointwise,ambient-check,list}``.

Exit codes: 0 when every report passes, 1 on any failed check, 2 on a
configuration error.  Settings come from built-in defaults, then the JSON
file named by ``TENSURF_CONFIG`` (or ``--config``), then command-line flags.
"""

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Optional

import numpy as np

from . import identities as ids
from .ambient_charts import CHARTS, ChartError, chart_by_name, kronecker_residuals, metrinilic_residual
from .quadrature import QuadratureError, rule_for, surface_geometry_on
from .report import (CONVERGENCE_FIELDS, REPORT_FIELDS, ConvergenceRow, observed_orders,
                     plot_convergence, render)
from .surface_geometry import (FD_STEP_ANALYTIC, FD_STEP_COMPUTED, codazzi_residual,
                               gauss_residual, sample, weingarten_residual)
from .zoo import HEIGHT_FUNCTIONS, ZooError, available_surfaces, from_selector

CONFIG_ENV = "TENSURF_CONFIG"

POINTWISE_TOLERANCES = {"weingarten": 1e-8, "codazzi": 1e-6, "gauss": 1e-13,
                        "R=2K": 1e-10, "H-routes": 1e-12}
AMBIENT_TOLERANCES = {"kronecker-metric": 1e-12, "kronecker-basis": 1e-12,
                      "metrinilic-metric": 1e-8, "metrinilic-basis": 1e-8}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    surfaces: list = field(default_factory=lambda: ["sphere:r=1"])
    identities: list = field(default_factory=lambda: ["all"])
    resolutions: list = field(default_factory=lambda: [64])
    tolerance: Optional[float] = None
    format: str = "table"
    out: Optional[str] = None
    seed: int = 42
    fd_step: Optional[float] = None
    boundary_nodes: int = ids.DEFAULT_BOUNDARY_NODES
    grid: int = 20
    charts: list = field(default_factory=lambda: ["spherical", "cylindrical"])
    points: int = 50
    timing: bool = False
    plot: Optional[str] = None

    def validate(self):
        if not self.surfaces:
            raise ConfigError("at least one surface is required")
        if not self.identities:
            raise ConfigError("at least one identity is required")
        for res in self.resolutions:
            if min(res if isinstance(res, (list, tuple)) else [res]) < 8:
                raise ConfigError(f"resolution {res} is below the minimum of 8 nodes per axis")
        if self.format not in ("table", "csv", "json"):
            raise ConfigError(f"unknown format {self.format!r}; valid: table, csv, json")
        if self.tolerance is not None and not self.tolerance > 0:
            raise ConfigError("tolerance must be positive")
        if self.fd_step is not None and not self.fd_step > 0:
            raise ConfigError("fd-step must be positive")
        return self


def parse_resolutions(text):
    """``64`` or ``16,32,64``; a single entry may be per-axis, e.g. ``32x32x64``."""
    out = []
    for item in str(text).split(","):
        item = item.strip()
        try:
            parts = [int(p) for p in item.split("x")]
        except ValueError as exc:
            raise ConfigError(f"bad resolution {item!r}") from exc
        out.append(parts[0] if len(parts) == 1 else tuple(parts))
    return out


def _res_key(res):
    return res if isinstance(res, int) else max(res)


def load_config(args):
    """Merge defaults, config file, and flags into a RunConfig."""
    cfg = RunConfig()
    path = getattr(args, "config", None) or os.environ.get(CONFIG_ENV)
    if path:
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        known = {f.name for f in fields(RunConfig)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        if "resolutions" in data:
            data["resolutions"] = parse_resolutions(
                ",".join(str(r) if not isinstance(r, list) else "x".join(map(str, r))
                         for r in data["resolutions"]))
        cfg = replace(cfg, **data)
    flag_map = {"surface": "surfaces", "identity": "identities", "chart": "charts",
                "tol": "tolerance", "format": "format", "out": "out", "seed": "seed",
                "fd_step": "fd_step", "boundary_nodes": "boundary_nodes", "grid": "grid",
                "points": "points", "timing": "timing", "plot": "plot"}
    updates = {}
    for flag, key in flag_map.items():
        value = getattr(args, flag, None)
        if value is not None:
            updates[key] = value
    if getattr(args, "res", None) is not None:
        updates["resolutions"] = parse_resolutions(args.res)
    if "identities" in updates:
        updates["identities"] = [i for item in updates["identities"] for i in item.split(",")]
    return replace(cfg, **updates).validate()


def _emit(text, cfg):
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)


def _surfaces(cfg):
    return [(sel, from_selector(sel).surface) for sel in cfg.surfaces]


def _identity_list(cfg, surface):
    if cfg.identities == ["all"]:
        return list(ids.applicable_ids(surface))
    for ident in cfg.identities:
        if ident not in ids.ALL_IDS:
            raise ConfigError(f"unknown identity {ident!r}; valid: all, {', '.join(ids.ALL_IDS)}")
    bad = [i for i in cfg.identities
           if i != "GB" and i not in ids.applicable_ids(surface)]
    if bad:
        raise ConfigError(f"identities {bad} do not apply to {surface.name}; "
                          f"applicable: {', '.join(ids.applicable_ids(surface))}")
    return list(cfg.identities)


def _tolerance(cfg):
    return ids.DEFAULT_TOLERANCE if cfg.tolerance is None else cfg.tolerance


def _resolve_rule(surface, res):
    try:
        return rule_for(surface, res)
    except QuadratureError as exc:
        raise ConfigError(str(exc)) from exc


def run_verify(cfg):
    """Every (surface, identity) pair at the largest resolution.  Returns (exit code, records)."""
    res = max(cfg.resolutions, key=_res_key)
    plan = []
    for sel, surface in _surfaces(cfg):
        plan.append((sel, surface, _identity_list(cfg, surface)))
    records = []
    for sel, surface, idents in plan:
        rule = _resolve_rule(surface, res)
        geo = surface_geometry_on(surface, rule)
        for ident in idents:
            rep = ids.run_identity(ident, surface, rule, _tolerance(cfg), cfg.boundary_nodes,
                                   cfg.seed, geo=geo, timing=cfg.timing)
            rec = rep.as_record()
            rec["surface"] = sel
            records.append(rec)
    return (0 if all(r["pass"] for r in records) else 1), records


def run_convergence(cfg):
    if len(cfg.resolutions) < 2:
        raise ConfigError("a convergence study needs at least two resolutions")
    resolutions = sorted(cfg.resolutions, key=_res_key)
    rows = []
    for sel, surface in _surfaces(cfg):
        idents = _identity_list(cfg, surface)
        per_res = []
        for res in resolutions:
            rule = _resolve_rule(surface, res)
            geo = surface_geometry_on(surface, rule)
            per_res.append({i: ids.run_identity(i, surface, rule, _tolerance(cfg),
                                                cfg.boundary_nodes, cfg.seed, geo=geo)
                            for i in idents})
        for ident in idents:
            reps = [pr[ident] for pr in per_res]
            orders = observed_orders([r.residual for r in reps])
            for rep, order in zip(reps, orders):
                rows.append(ConvergenceRow(ident, sel, rep.resolution, rep.residual, order))
    return rows


def _interior_grid(surface, count):
    axes = []
    for lo, hi in zip(surface.lower, surface.upper):
        h = (hi - lo) / count
        axes.append(lo + h * (np.arange(count) + 0.5))
    return np.stack([m.ravel() for m in np.meshgrid(*axes, indexing="ij")], axis=-1)


def pointwise_residuals(surface, grid=20, h_weingarten=FD_STEP_ANALYTIC, h_codazzi=FD_STEP_COMPUTED):
    """Max pointwise residuals over an interior grid; keys follow POINTWISE_TOLERANCES."""
    S = _interior_grid(surface, grid if surface.param_dim == 2 else max(8, grid // 2))
    geo = sample(surface, S)
    out = {
        "weingarten": float(np.max(weingarten_residual(surface, S, h_weingarten))),
        "codazzi": float(np.max(codazzi_residual(surface, S, h_codazzi))),
        "H-routes": float(np.max(np.abs(geo.H - np.einsum("...ab,...ab->...", geo.g_contra, geo.B_cov)))),
    }
    if surface.param_dim == 2:
        out["gauss"] = float(np.max(gauss_residual(surface, S)))
        out["R=2K"] = float(np.max(np.abs(geo.R_scalar - 2 * geo.K)))
    return out, len(S)


def _check_record(ident, label, resolution, value, tol, start, cfg):
    return {
        "identity_id": ident, "surface": label, "resolution": resolution,
        "lhs": float(value), "rhs": 0.0, "residual": float(value), "tolerance": float(tol),
        "pass": bool(value <= tol),
        "wall_time_ms": round(1000 * (time.perf_counter() - start), 3) if cfg.timing else None,
    }


def run_pointwise(cfg):
    records = []
    for sel, surface in _surfaces(cfg):
        start = time.perf_counter()
        kw = {} if cfg.fd_step is None else {"h_weingarten": cfg.fd_step, "h_codazzi": cfg.fd_step}
        values, count = pointwise_residuals(surface, cfg.grid, **kw)
        for key in ("weingarten", "codazzi", "gauss", "R=2K", "H-routes"):
            if key in values:
                tol = POINTWISE_TOLERANCES[key] if cfg.tolerance is None else cfg.tolerance
                records.append(_check_record(key, sel, f"{count} points", values[key], tol, start, cfg))
    return (0 if all(r["pass"] for r in records) else 1), records


def ambient_residuals(chart, points, h=1e-5):
    worst = dict.fromkeys(AMBIENT_TOLERANCES, 0.0)
    for Z in points:
        km, kb = kronecker_residuals(chart, Z)
        m = metrinilic_residual(chart, Z, h)
        for key, v in (("kronecker-metric", km), ("kronecker-basis", kb),
                       ("metrinilic-metric", m.r_metric), ("metrinilic-basis", m.r_basis)):
            worst[key] = max(worst[key], v)
    return worst


def run_ambient(cfg):
    rng = np.random.default_rng(cfg.seed)
    h = cfg.fd_step or 1e-5
    records = []
    for name in cfg.charts:
        chart = chart_by_name(name)
        start = time.perf_counter()
        pts = chart.random_points(cfg.points, rng, margin=max(1e-3, 4 * h))
        for key, value in ambient_residuals(chart, pts, h).items():
            tol = AMBIENT_TOLERANCES[key] if cfg.tolerance is None else cfg.tolerance
            records.append(_check_record(key, name, f"{cfg.points} points", value, tol, start, cfg))
    return (0 if all(r["pass"] for r in records) else 1), records


def _list_text():
    lines = ["surfaces (selector name: parameters with defaults):"]
    for name, params in available_surfaces().items():
        desc = ",".join(f"{k}={v:g}" if isinstance(v, float) else f"{k}={v}" for k, v in params.items())
        lines.append(f"  {name}" + (f":{desc}" if desc else ""))
    lines.append("  monge height functions f: " + ", ".join(HEIGHT_FUNCTIONS))
    lines.append("identities:")
    lines.append("  closed: " + ", ".join(ids.CLOSED_IDS))
    lines.append("  patch:  " + ", ".join(ids.PATCH_IDS))
    lines.append("  opt-in: " + ", ".join(ids.EXTRA_IDS))
    lines.append("charts: " + ", ".join(CHARTS))
    return "\n".join(lines) + "\n"


def build_parser():
    parser = argparse.ArgumentParser(
        prog="tensurf",
        description="Check surface integral identities and structural equations numerically.",
        epilog="Exit codes: 0 all checks pass, 1 a check failed, 2 configuration error.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--surface", action="append", help="zoo selector, e.g. torus:R=2,r=0.5 (repeatable)")
        p.add_argument("--tol", type=float, help="override every tolerance")
        p.add_argument("--format", choices=("table", "csv", "json"))
        p.add_argument("--out", help="write the report here instead of stdout")
        p.add_argument("--seed", type=int)
        p.add_argument("--fd-step", dest="fd_step", type=float)
        p.add_argument("--config", help=f"JSON config file (default: ${CONFIG_ENV})")
        p.add_argument("--timing", action="store_true", default=None,
                       help="record wall_time_ms (output is then not reproducible)")

    for name in ("verify", "converge"):
        p = sub.add_parser(name)
        common(p)
        p.add_argument("--identity", action="append", help="identity id or 'all' (repeatable)")
        p.add_argument("--res", help="nodes per axis, e.g. 64 or 16,32,64 or 32x32x64")
        p.add_argument("--boundary-nodes", dest="boundary_nodes", type=int)
        if name == "converge":
            p.add_argument("--plot", nargs="?", const="",
                           help="also render a PNG convergence figure "
                                "(no value: next to --out with a .png suffix)")
    p = sub.add_parser("pointwise")
    common(p)
    p.add_argument("--grid", type=int, help="interior samples per axis (default 20)")
    p = sub.add_parser("ambient-check")
    common(p)
    p.add_argument("--chart", action="append", help=f"one of {', '.join(CHARTS)} (repeatable)")
    p.add_argument("--points", type=int, help="random points per chart (default 50)")
    sub.add_parser("list")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "list":
        sys.stdout.write(_list_text())
        return 0
    try:
        cfg = load_config(args)
        if args.command == "verify":
            code, records = run_verify(cfg)
            _emit(render(records, cfg.format, REPORT_FIELDS), cfg)
        elif args.command == "converge":
            rows = run_convergence(cfg)
            _emit(render([r.as_record() for r in rows], cfg.format, CONVERGENCE_FIELDS), cfg)
            if cfg.plot is not None:
                target = cfg.plot or (str(Path(cfg.out).with_suffix(".png")) if cfg.out else None)
                if not target:
                    raise ConfigError("--plot without a path needs --out")
                plot_convergence(rows, target)
            code = 0
        elif args.command == "pointwise":
            code, records = run_pointwise(cfg)
            _emit(render(records, cfg.format, REPORT_FIELDS), cfg)
        else:
            code, records = run_ambient(cfg)
            _emit(render(records, cfg.format, REPORT_FIELDS), cfg)
    except (ConfigError, ZooError, ChartError, ids.IdentityError) as exc:
        print(f"tensurf: configuration error: {exc}", file=sys.stderr)
        return 2
    return code


if __name__ == "__main__":
    sys.exit(main())
