"""Reader and writer for surface definition documents.

A document is line oriented::

    # comments start with '#'
    [surface]
    name = catenoid
    target = R3
    c1 = cosh(v)*cos(u)
    c2 = cosh(v)*sin(u)
    c3 = v
    [grid]
    u0 = 0
    u1 = 2*pi
    v0 = -1.2
    v1 = 1.2
    nu = 64
    nv = 96
    periodic_u = true
    periodic_v = false
    [expect]
    K = 1
    P = 0

Several ``key=value`` pairs may share a line (``target=S3 builtin=clifford``);
lines before the first section header belong to ``[surface]``.  Components
are ``c1`` ... ``c5``; ``x y z w`` are accepted as aliases of ``c1`` ... ``c4``.
Numeric values may be constant expressions such as ``pi/sqrt(2)``.
"""
from __future__ import annotations

import re

from ..diffgrid import Grid
from .catalog import builtin as builtin_surface
from .expr import ExprSyntaxError, evaluate_expr, parse_expr, to_text, variables
from .surface import TARGETS, SurfaceError, SurfaceSpec, validate

SECTIONS = {
    "surface": {"name", "target", "builtin", "description",
                "c1", "c2", "c3", "c4", "c5", "x", "y", "z", "w"},
    "grid": {"u0", "u1", "v0", "v1", "nu", "nv", "periodic_u", "periodic_v"},
    "expect": {"K", "P"},
}
ALIASES = {"x": "c1", "y": "c2", "z": "c3", "w": "c4"}
DEFAULT_GRID = Grid((0.0, 1.0), (0.0, 1.0), 64, 64)

_KEY = re.compile(r"([A-Za-z_]\w*)\s*=")


class DocumentError(ExprSyntaxError):
    pass


TEXT_KEYS = {"description"}  # free text: the value runs to the end of the line


def _split_pairs(text: str, lineno: int):
    """Yield (key, value, value_column) for every ``key=value`` on a line."""
    keys = list(_KEY.finditer(text))
    if not keys or text[:keys[0].start()].strip():
        raise DocumentError("expected key = value", lineno, 1 + len(text) - len(text.lstrip()))
    cut = next((i + 1 for i, m in enumerate(keys) if m.group(1) in TEXT_KEYS), len(keys))
    keys = keys[:cut]
    for i, m in enumerate(keys):
        end = keys[i + 1].start() if i + 1 < len(keys) else len(text)
        raw = text[m.end():end]
        lead = len(raw) - len(raw.lstrip())
        yield m.group(1), raw.strip(), m.end() + lead + 1, m.start() + 1


def _read(text: str) -> dict:
    entries: dict[str, dict] = {s: {} for s in SECTIONS}
    section = "surface"
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].rstrip()
        if not body.strip():
            continue
        stripped = body.strip()
        if stripped.startswith("["):
            name = stripped[1:-1].strip() if stripped.endswith("]") else None
            if name not in SECTIONS:
                raise DocumentError(f"unknown section {stripped}", lineno, body.index("[") + 1)
            section = name
            continue
        for key, value, vcol, kcol in _split_pairs(body, lineno):
            if key not in SECTIONS[section]:
                raise DocumentError(f"unknown key {key!r} in [{section}]", lineno, kcol)
            key = ALIASES.get(key, key) if section == "surface" else key
            if key in entries[section]:
                raise DocumentError(f"duplicate key {key!r}", lineno, kcol)
            if not value:
                raise DocumentError(f"missing value for {key!r}", lineno, vcol)
            entries[section][key] = (value, lineno, vcol)
    return entries


def _number(entry):
    value, line, col = entry
    e = parse_expr(value, line, col)
    if variables(e):
        raise DocumentError("numeric value may not depend on u, v", line, col)
    return float(evaluate_expr(e, 0.0, 0.0))


def _integer(entry):
    x = _number(entry)
    if x != int(x):
        raise DocumentError("expected an integer", entry[1], entry[2])
    return int(x)


def _boolean(entry):
    value, line, col = entry
    if value.lower() in ("true", "yes", "1"):
        return True
    if value.lower() in ("false", "no", "0"):
        return False
    raise DocumentError(f"expected true/false, got {value!r}", line, col)


def parse_surface(text: str, check: bool = True) -> SurfaceSpec:
    """Parse a surface document into a validated SurfaceSpec."""
    entries = _read(text)
    surf, grid_e, expect_e = entries["surface"], entries["grid"], entries["expect"]

    base = None
    if "builtin" in surf:
        value, line, col = surf["builtin"]
        try:
            base = builtin_surface(value)
        except SurfaceError as exc:
            raise DocumentError(str(exc), line, col) from None
    target = surf["target"][0] if "target" in surf else (base.target if base else None)
    if target is None:
        raise DocumentError("missing key 'target'", 1, 1)
    if target not in TARGETS:
        _, line, col = surf["target"]
        raise DocumentError(f"unknown target {target!r}", line, col)

    comps = sorted(k for k in surf if re.fullmatch(r"c\d", k))
    components = None
    if comps:
        if base is not None:
            raise DocumentError("give either builtin or components, not both", surf[comps[0]][1], 1)
        expected = [f"c{i}" for i in range(1, TARGETS[target] + 1)]
        if comps != expected:
            line = surf[comps[-1]][1]
            raise DocumentError(
                f"target {target} needs components {', '.join(expected)}, got {', '.join(comps)}",
                line, 1)
        components = tuple(parse_expr(surf[k][0], surf[k][1], surf[k][2]) for k in comps)
    elif base is None:
        raise DocumentError("document defines neither builtin nor components", 1, 1)
    elif base.target != target:
        _, line, col = surf["target"]
        raise DocumentError(f"builtin {base.name} has target {base.target}", line, col)

    g0 = base.grid if base else DEFAULT_GRID
    grid = Grid(
        (_number(grid_e["u0"]) if "u0" in grid_e else g0.u_range[0],
         _number(grid_e["u1"]) if "u1" in grid_e else g0.u_range[1]),
        (_number(grid_e["v0"]) if "v0" in grid_e else g0.v_range[0],
         _number(grid_e["v1"]) if "v1" in grid_e else g0.v_range[1]),
        _integer(grid_e["nu"]) if "nu" in grid_e else g0.nu,
        _integer(grid_e["nv"]) if "nv" in grid_e else g0.nv,
        _boolean(grid_e["periodic_u"]) if "periodic_u" in grid_e else g0.periodic_u,
        _boolean(grid_e["periodic_v"]) if "periodic_v" in grid_e else g0.periodic_v,
    )
    expect_K = _number(expect_e["K"]) if "K" in expect_e else (base.expect_K if base else None)
    expect_P = _number(expect_e["P"]) if "P" in expect_e else (base.expect_P if base else None)
    name = surf["name"][0] if "name" in surf else (base.name if base else "surface")
    description = surf["description"][0] if "description" in surf else (base.description if base else "")

    spec = SurfaceSpec(
        name=name, target=target, grid=grid,
        builtin=base.builtin if base else None, components=components,
        expect_K=expect_K, expect_P=expect_P, description=description,
        raw=base.raw if base else None,
    )
    if check:
        validate(spec)
    return spec


def format_surface(spec: SurfaceSpec) -> str:
    """Inverse of parse_surface (programmatic modifiers are not written)."""
    lines = ["[surface]", f"name = {spec.name}", f"target = {spec.target}"]
    if spec.description:
        lines.append(f"description = {spec.description}")
    if spec.builtin is not None:
        lines.append(f"builtin = {spec.builtin}")
    else:
        lines += [f"c{i} = {to_text(e)}" for i, e in enumerate(spec.components, start=1)]
    g = spec.grid
    lines += [
        "[grid]",
        f"u0 = {g.u_range[0]!r}", f"u1 = {g.u_range[1]!r}",
        f"v0 = {g.v_range[0]!r}", f"v1 = {g.v_range[1]!r}",
        f"nu = {g.nu}", f"nv = {g.nv}",
        f"periodic_u = {str(g.periodic_u).lower()}",
        f"periodic_v = {str(g.periodic_v).lower()}",
    ]
    if spec.expect_K is not None or spec.expect_P is not None:
        lines.append("[expect]")
        if spec.expect_K is not None:
            lines.append(f"K = {spec.expect_K!r}")
        if spec.expect_P is not None:
            lines.append(f"P = {spec.expect_P!r}")
    return "\n".join(lines) + "\n"


def load_surface(source: str) -> SurfaceSpec:
    """Builtin name or path to a document."""
    from pathlib import Path
    path = Path(source)
    if path.suffix or path.exists():
        return parse_surface(path.read_text())
    return builtin_surface(source)
