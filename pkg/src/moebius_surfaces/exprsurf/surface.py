"""Surface specifications: a map (u, v) -> S^n, possibly via R^n."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from ..diffgrid import Grid, d_z
from ..minkowski import LorentzTransform, lift_to_cone, project_to_sphere
from .expr import Expr, evaluate_expr

TARGETS = {"R3": 3, "R4": 4, "S3": 4, "S4": 5}
UNIT_TOL = 1e-9
IMMERSION_TOL = 1e-8


class SurfaceError(ValueError):
    pass


def sphere_dim(target: str) -> int:
    """n such that the surface lives in S^n."""
    return 3 if target in ("R3", "S3") else 4


def inverse_stereographic(x) -> np.ndarray:
    """sigma(x) = (2x, |x|^2 - 1) / (|x|^2 + 1), pole at the last coordinate."""
    x = np.asarray(x)
    r2 = np.sum(x * x, axis=-1, keepdims=True)
    return np.concatenate([2.0 * x, r2 - 1.0], axis=-1) / (r2 + 1.0)


@dataclass(frozen=True)
class SurfaceSpec:
    name: str
    target: str
    grid: Grid
    builtin: Optional[str] = None
    components: Optional[tuple[Expr, ...]] = None
    expect_K: Optional[float] = None
    expect_P: Optional[float] = None
    description: str = ""
    # programmatic modifiers, not part of the document format
    chart_angle: float = 0.0
    lorentz: Optional[LorentzTransform] = field(default=None, compare=False)
    raw: Optional[Callable] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.target not in TARGETS:
            raise SurfaceError(f"unknown target {self.target!r}")
        if (self.builtin is None) == (self.components is None):
            raise SurfaceError("exactly one of builtin / components must be given")
        if self.components is not None and len(self.components) != TARGETS[self.target]:
            raise SurfaceError(
                f"target {self.target} needs {TARGETS[self.target]} components, "
                f"got {len(self.components)}")

    @property
    def n(self) -> int:
        return sphere_dim(self.target)

    @property
    def is_euclidean(self) -> bool:
        return self.target.startswith("R")

    def with_grid(self, grid: Grid) -> "SurfaceSpec":
        return replace(self, grid=grid)

    def transformed(self, M: LorentzTransform) -> "SurfaceSpec":
        """Same surface moved by the Moebius transformation M."""
        if M.dim != self.n + 2:
            raise SurfaceError("Lorentz transform has the wrong dimension")
        total = M if self.lorentz is None else M @ self.lorentz
        return replace(self, lorentz=total)

    def rotated_chart(self, theta: float) -> "SurfaceSpec":
        """Reparametrize by z = e^{i theta} w (new grid coordinate is w)."""
        return replace(self, chart_angle=self.chart_angle + theta)


def raw_point(spec: SurfaceSpec, u, v) -> np.ndarray:
    """Components as written: a point of R^n or S^n before any lifting."""
    dtype = np.result_type(np.asarray(u).dtype, np.asarray(v).dtype, float)
    u = np.asarray(u, dtype=dtype)
    v = np.asarray(v, dtype=dtype)
    if spec.chart_angle:
        c, s = np.cos(spec.chart_angle), np.sin(spec.chart_angle)
        u, v = c * u - s * v, s * u + c * v
    if spec.components is not None:
        return np.stack([evaluate_expr(e, u, v) for e in spec.components], axis=-1)
    return np.asarray(spec.raw(u, v), dtype=dtype)


def evaluate(spec: SurfaceSpec, u, v) -> np.ndarray:
    """Point of the unit sphere S^n for parameters (u, v)."""
    x = raw_point(spec, u, v)
    if spec.is_euclidean:
        x = inverse_stereographic(x)
    if spec.lorentz is not None:
        x = project_to_sphere(spec.lorentz(lift_to_cone(x)), tol=1e-8)
    return x


def sample(spec: SurfaceSpec, grid: Optional[Grid] = None, dtype=float) -> np.ndarray:
    g = grid or spec.grid
    U, V = g.mesh(dtype)
    return evaluate(spec, U, V)


def validate(spec: SurfaceSpec, grid: Optional[Grid] = None) -> None:
    """Unit-norm and immersion checks on the grid; raises SurfaceError."""
    g = grid or spec.grid
    U, V = g.mesh()
    if not spec.is_euclidean:
        x = raw_point(spec, U, V)
        dev = float(np.max(np.abs(np.sqrt(np.sum(x * x, axis=-1)) - 1.0)))
        if dev > UNIT_TOL:
            raise SurfaceError(
                f"surface {spec.name!r} is not on the unit sphere "
                f"(max deviation {dev:.3e})")
    f = evaluate(spec, U, V)
    fz = d_z(f, g)
    metric = 2.0 * np.real(np.sum(fz * np.conj(fz), axis=-1))
    if np.min(metric) <= IMMERSION_TOL:
        raise SurfaceError(
            f"surface {spec.name!r} is not immersed on its grid "
            f"(min metric {np.min(metric):.3e})")
