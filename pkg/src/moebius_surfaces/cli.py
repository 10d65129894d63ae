"""Command-line front end.

    moebius-surfaces catalog
    moebius-surfaces invariants --surface catenoid --dump nodes.csv
    moebius-surfaces verify --surface clifford --suite all
    moebius-surfaces classify --surface veronese
    moebius-surfaces obstruction --space s3
    moebius-surfaces integrate --system clifford --h 1e-3

Exit codes: 0 all checks pass, 1 a check failed, 2 usage or configuration error.
An optional ``--config file.json`` supplies defaults; flags on the command
line win.  MIL_THREADS bounds the number of worker threads.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, fields
from typing import Optional

import numpy as np

from . import isoparam, rigid
from .diffgrid import Grid
from .exprsurf import SurfaceError, builtin_names, catalog, load_surface
from .exprsurf.expr import ExprSyntaxError
from .invariants import UmbilicError, compute_invariants
from .minkowski import random_lorentz
from .verify import (
    SUITES, ResidualReport, classify, run_suites, structure_residuals,
    verdict_notes, willmore_field,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
COMMANDS = ("catalog", "invariants", "verify", "classify", "obstruction", "integrate")
FORMATS = ("json", "csv", "text")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str = ""
    surface: Optional[str] = None
    nu: Optional[int] = None
    nv: Optional[int] = None
    tol: Optional[float] = None
    suite: str = "all"
    format: str = "text"
    out: Optional[str] = None
    dump: Optional[str] = None
    seed: Optional[int] = None
    space: str = "s3"
    system: str = "clifford"
    h: float = 1e-3
    order: str = "uv"
    corrupt_schwarzian: float = 0.0

    @classmethod
    def keys(cls) -> set[str]:
        return {f.name for f in fields(cls)}

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.format not in FORMATS:
            raise UsageError(f"format must be one of {', '.join(FORMATS)}")
        if self.command in ("invariants", "verify", "classify") and not self.surface:
            raise UsageError(f"{self.command} needs --surface")
        if self.suite != "all" and self.suite not in SUITES:
            raise UsageError(f"unknown suite {self.suite!r} (choose from {', '.join(SUITES)}, all)")
        if self.space.lower() not in isoparam.SPACES:
            raise UsageError("space must be s3 or s4")
        if self.system not in rigid.SYSTEMS:
            raise UsageError("system must be clifford or veronese")
        if self.order not in ("uv", "vu"):
            raise UsageError("order must be uv or vu")
        for name in ("nu", "nv"):
            n = getattr(self, name)
            if n is not None and (not isinstance(n, int) or n < 16):
                raise UsageError(f"{name} must be an integer >= 16")
        if self.h <= 0 or (self.tol is not None and self.tol <= 0):
            raise UsageError("step and tolerance must be positive")
        return self


def load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("config must be a JSON object")
    unknown = sorted(set(data) - RunConfig.keys() - {"grid"})
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(unknown)}")
    grid = data.pop("grid", None) or {}
    bad = sorted(set(grid) - {"nu", "nv"})
    if bad:
        raise UsageError(f"unknown grid keys: {', '.join(bad)}")
    data.update(grid)
    return data


def threads() -> int:
    raw = os.environ.get("MIL_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise UsageError(f"MIL_THREADS must be an integer, got {raw!r}") from None


# -- serialization -------------------------------------------------------------

def _num(x) -> str:
    return format(float(x), ".12g")


def _jnum(x):
    x = float(x)
    return float(_num(x)) if np.isfinite(x) else None


def report_dict(rep: ResidualReport) -> dict:
    return {
        "surface": rep.surface,
        "grid": rep.grid,
        "checks": [{"name": c.name, "max": _jnum(c.max), "rms": _jnum(c.rms), "tol": _jnum(c.tol),
                    "pass": bool(c.passed), "nodes": c.node_count, "label": c.label}
                   for c in rep.sorted_checks()],
        "verdict": rep.verdict,
        "passed": rep.passed,
        "notes": list(rep.notes),
    }


def format_report(rep: ResidualReport, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report_dict(rep), indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["name", "label", "max", "rms", "tol", "pass", "nodes"])
        for c in rep.sorted_checks():
            w.writerow([c.name, c.label, _num(c.max), _num(c.rms), _num(c.tol),
                        "pass" if c.passed else "FAIL", c.node_count])
        return buf.getvalue()
    lines = [f"surface {rep.surface}  grid {rep.grid.get('nu')}x{rep.grid.get('nv')}"]
    width = max((len(c.name) for c in rep.checks.values()), default=4)
    lwidth = max((len(c.label) for c in rep.checks.values()), default=4)
    for c in rep.sorted_checks():
        status = "pass" if c.passed else "FAIL"
        lines.append(f"  {c.name:<{width}}  {c.label:<{lwidth}}  max {_num(c.max):>18}  "
                     f"tol {_num(c.tol):>8}  {status}" + (f"  ({c.note})" if c.note else ""))
    if rep.verdict:
        lines.append(f"verdict: {rep.verdict}")
    lines += [f"note: {n}" for n in rep.notes]
    lines.append("result: " + ("pass" if rep.passed else "FAIL " + ", ".join(rep.failing())))
    return "\n".join(lines) + "\n"


def _write(text: str, path: Optional[str]) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc}") from exc


def emit_report(report: ResidualReport, fmt: str = "json", path: Optional[str] = None) -> None:
    """Deterministic serialization: sorted check names, 12 significant digits."""
    if fmt not in FORMATS:
        raise UsageError(f"format must be one of {', '.join(FORMATS)}")
    _write(format_report(report, fmt), path)


NODE_COLUMNS = ("u", "v", "K", "ReP", "ImP", "psi", "willmore_res", "kk", "abs_kappa_sq",
                "umbilic_free")


def node_table(inv) -> str:
    """Plot-ready CSV of per-node invariants on the requested domain."""
    U, V = inv.domain.mesh()
    wres = inv.crop(willmore_field(inv)).astype(float)
    cols = [U, V, inv.crop(inv.K), inv.crop(inv.P).real, inv.crop(inv.P).imag,
            inv.crop(inv.psi), wres, inv.crop(inv.kk), np.abs(inv.crop(inv.kappa_sq))]
    cols = [np.asarray(c, dtype=float) for c in cols]
    mask = inv.crop(inv.mask)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(NODE_COLUMNS)
    for i in range(U.shape[0]):
        for j in range(U.shape[1]):
            w.writerow([_num(c[i, j]) if np.isfinite(c[i, j]) else "nan" for c in cols]
                       + [int(mask[i, j])])
    return buf.getvalue()


# -- commands -------------------------------------------------------------------

def _surface(cfg: RunConfig):
    try:
        spec = load_surface(cfg.surface)
    except (SurfaceError, ExprSyntaxError) as exc:
        raise UsageError(str(exc)) from exc
    except OSError as exc:
        raise UsageError(f"cannot read surface {cfg.surface}: {exc}") from exc
    if cfg.nu or cfg.nv:
        g = spec.grid
        spec = spec.with_grid(Grid(g.u_range, g.v_range, cfg.nu or g.nu, cfg.nv or g.nv,
                                   g.periodic_u, g.periodic_v))
    if cfg.seed is not None:
        spec = spec.transformed(random_lorentz(cfg.seed, spec.n))
    return spec


def _invariants(cfg: RunConfig):
    spec = _surface(cfg)
    try:
        return spec, compute_invariants(spec)
    except UmbilicError as exc:
        raise UsageError(f"{spec.name}: {exc}") from exc


def cmd_catalog(cfg: RunConfig) -> int:
    rows = []
    for spec in catalog():
        g = spec.grid
        rows.append({"name": spec.name, "target": spec.target, "grid": g.to_dict(),
                     "expect_K": spec.expect_K, "expect_P": spec.expect_P,
                     "description": spec.description})
    if cfg.format == "json":
        _write(json.dumps(rows, indent=2, sort_keys=True) + "\n", cfg.out)
    else:
        lines = [f"{r['name']:<17} {r['target']:<3} {r['grid']['nu']}x{r['grid']['nv']:<4} "
                 f"K={r['expect_K']} P={r['expect_P']}  {r['description']}" for r in rows]
        _write("\n".join(lines) + "\n", cfg.out)
    return EXIT_OK


def cmd_invariants(cfg: RunConfig) -> int:
    spec, inv = _invariants(cfg)
    if cfg.dump:
        _write(node_table(inv), cfg.dump)
    sel = inv.interior
    stats = {}
    for key, f in (("K", inv.K), ("ReP", inv.P.real), ("ImP", inv.P.imag)):
        vals = np.asarray(f[sel], dtype=float)
        stats[key] = {"min": _jnum(vals.min()), "max": _jnum(vals.max()), "mean": _jnum(vals.mean())}
    iso = float(np.max(np.abs(inv.kappa_sq[sel])))
    summary = {"surface": spec.name, "grid": spec.grid.to_dict(), "nodes": int(sel.sum()),
               "stats": stats, "max_abs_kappa_sq": _jnum(iso)}
    if cfg.format == "json":
        _write(json.dumps(summary, indent=2, sort_keys=True) + "\n", cfg.out)
    elif cfg.format == "csv":
        _write(node_table(inv), cfg.out)
    else:
        lines = [f"surface {spec.name}  interior nodes {summary['nodes']}"]
        for k, s in stats.items():
            lines.append(f"  {k:<4} min {_num(s['min'])}  max {_num(s['max'])}  mean {_num(s['mean'])}")
        lines.append(f"  max|<kappa,kappa>| {_num(iso)}")
        _write("\n".join(lines) + "\n", cfg.out)
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    spec, inv = _invariants(cfg)
    suites = SUITES if cfg.suite == "all" else (cfg.suite,)
    rep = run_suites(inv, suites, tol=cfg.tol, workers=threads())
    if cfg.corrupt_schwarzian:
        bad = structure_residuals(inv, s=inv.s + cfg.corrupt_schwarzian, tol=cfg.tol)
        for name, chk in bad.checks.items():
            rep.checks[f"corrupt.{name}"] = chk
        rep.notes.append(f"Schwarzian shifted by {cfg.corrupt_schwarzian:g}")
    v = classify(inv, cfg.tol)
    rep.verdict = v.label
    rep.notes.extend(verdict_notes(v))
    rep.config.update(seed=cfg.seed, surface_source=cfg.surface)
    if cfg.dump:
        _write(node_table(inv), cfg.dump)
    emit_report(rep, cfg.format, cfg.out)
    if not rep.passed:
        print("failing checks: " + ", ".join(rep.failing()), file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_classify(cfg: RunConfig) -> int:
    spec, inv = _invariants(cfg)
    v = classify(inv, cfg.tol)
    out = {"surface": spec.name, "verdict": v.label, "rules": v.fired,
           "K_range": [_jnum(x) for x in v.K_range],
           "P_max_dev": None if v.P_max_dev is None else _jnum(v.P_max_dev),
           "notes": verdict_notes(v)}
    if cfg.format == "json":
        _write(json.dumps(out, indent=2, sort_keys=True) + "\n", cfg.out)
    else:
        lines = [f"{spec.name}: {v.label}"] + [f"  - {r}" for r in v.fired]
        lines += [f"note: {n}" for n in out["notes"]]
        _write("\n".join(lines) + "\n", cfg.out)
    return EXIT_OK


def cmd_obstruction(cfg: RunConfig) -> int:
    space = cfg.space.lower()
    ob = isoparam.reduce_obstruction(space)
    verdict = isoparam.obstruction_verdict(ob.coeffs)
    if cfg.format == "json":
        out = {**ob.to_dict(), **verdict.to_dict()}
        _write(json.dumps(out, indent=2, sort_keys=True) + "\n", cfg.out)
    else:
        F, G = isoparam.build_FG(space)
        lines = [f"space {space.upper()}",
                 f"  F(psi) = {F}",
                 f"  G(psi) = ({G.num}) / ({G.den})",
                 f"  cos^{ob.cos_power}(psi) * [2KF + (2G-F')(G-F') + F(2G'-F'')] =",
                 f"    {ob.polynomial_str()}"]
        for i, (p, rs) in enumerate(zip(ob.raw, verdict.root_sets)):
            roots = "{" + ", ".join(str(r) for r in rs) + "}" if rs or not p.is_zero() else "(identically 0)"
            lines.append(f"  c{i} = {p.factored()}   roots {roots}")
        inter = "{" + ", ".join(str(r) for r in verdict.intersection) + "}"
        lines += [f"  common roots {inter}", verdict.message]
        _write("\n".join(lines) + "\n", cfg.out)
    return EXIT_OK if verdict.holds else EXIT_FAIL


def cmd_integrate(cfg: RunConfig) -> int:
    if cfg.system == "clifford":
        traj = rigid.clifford_trajectory(h=cfg.h, order=cfg.order)
    else:
        traj = rigid.veronese_trajectory(h=cfg.h, order=cfg.order)
    rep = rigid.reconstructed_invariants(traj)
    if cfg.system == "clifford":
        rep.add("rigid.closed_form", np.array([rigid.closed_form_error(traj)]), True, 1e-6)
        rep.add("rigid.mixed_partial", np.array([traj.diagnostics["mixed_partial"]]), True, 1e-8)
    if cfg.dump:
        try:
            rigid.write_trajectory_csv(traj, cfg.dump)
        except OSError as exc:
            raise UsageError(f"cannot write {cfg.dump}: {exc}") from exc
    emit_report(rep, cfg.format, cfg.out)
    if not rep.passed:
        print("failing checks: " + ", ".join(rep.failing()), file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


HANDLERS = {"catalog": cmd_catalog, "invariants": cmd_invariants, "verify": cmd_verify,
            "classify": cmd_classify, "obstruction": cmd_obstruction, "integrate": cmd_integrate}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="moebius-surfaces", description="Moebius invariants of surfaces in S^3 and S^4")
    p.add_argument("--config", help="JSON file with default settings")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def common(sp, surface=True):
        if surface:
            sp.add_argument("--surface", help=f"builtin ({', '.join(builtin_names())}) or file")
            sp.add_argument("--nu", type=int)
            sp.add_argument("--nv", type=int)
            sp.add_argument("--tol", type=float)
            sp.add_argument("--seed", type=int, help="apply a seeded random Moebius transform")
        sp.add_argument("--format", choices=FORMATS)
        sp.add_argument("--out", help="report path (default stdout)")

    common(sub.add_parser("catalog", help="list builtin surfaces"), surface=False)
    sp = sub.add_parser("invariants", help="compute invariants")
    common(sp)
    sp.add_argument("--dump", help="per-node CSV path")
    sp = sub.add_parser("verify", help="run verification suites")
    common(sp)
    sp.add_argument("--suite", choices=SUITES + ("all",))
    sp.add_argument("--dump", help="per-node CSV path")
    sp.add_argument("--corrupt-schwarzian", type=float, dest="corrupt_schwarzian",
                    help="also run the structure suite with s shifted by this amount")
    common(sub.add_parser("classify", help="classify among constant-K models"))
    sp = sub.add_parser("obstruction", help="exact obstruction polynomial")
    common(sp, surface=False)
    sp.add_argument("--space", choices=("s3", "s4"))
    sp = sub.add_parser("integrate", help="integrate a rigid frame system")
    common(sp, surface=False)
    sp.add_argument("--system", choices=tuple(rigid.SYSTEMS))
    sp.add_argument("--h", type=float)
    sp.add_argument("--order", choices=("uv", "vu"))
    sp.add_argument("--dump", help="trajectory CSV path")
    return p


def parse_config(argv) -> RunConfig:
    args = build_parser().parse_args(argv)
    if not args.command:
        raise UsageError("a command is required: " + ", ".join(COMMANDS))
    values = load_config(args.config) if args.config else {}
    for k, v in vars(args).items():
        if k != "config" and v is not None:
            values[k] = v
    values["command"] = args.command
    try:
        cfg = RunConfig(**values)
    except TypeError as exc:
        raise UsageError(f"invalid configuration: {exc}") from exc
    return cfg.validate()


def run(argv=None) -> int:
    try:
        cfg = parse_config(sys.argv[1:] if argv is None else argv)
        return HANDLERS[cfg.command](cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
