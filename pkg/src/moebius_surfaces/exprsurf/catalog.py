"""The builtin surfaces used throughout the test-suite."""
from __future__ import annotations

import numpy as np

from ..diffgrid import Grid
from .surface import SurfaceError, SurfaceSpec

A_CLIFFORD = float(2.0 * np.sqrt(2.0))
CLIFFORD_PERIOD = float(np.pi / np.sqrt(2.0))


def clifford(u, v):
    a = A_CLIFFORD
    return np.stack([np.cos(a * u), np.sin(a * u), np.cos(a * v), np.sin(a * v)], -1) / np.sqrt(2.0)


def catenoid(u, v):
    return np.stack([np.cosh(v) * np.cos(u), np.cosh(v) * np.sin(u), v + 0 * u], -1)


def enneper(u, v):
    return np.stack([u - u**3 / 3 + u * v**2, -v + v**3 / 3 - u**2 * v, u**2 - v**2], -1)


def helicoid(u, v):
    return np.stack([np.sinh(v) * np.cos(u), np.sinh(v) * np.sin(u), u + 0 * v], -1)


def complex_parabola(u, v):
    # f(z) = (z, z^2/2) in C^2 = R^4
    return np.stack([u + 0 * v, v + 0 * u, (u**2 - v**2) / 2, u * v], -1)


def veronese_from_s2(x, y, z):
    r3 = np.sqrt(3.0)
    return np.stack([
        r3 * x * y, r3 * x * z, r3 * y * z,
        r3 * (x**2 - y**2) / 2, (x**2 + y**2 - 2 * z**2) / 2,
    ], -1)


def veronese(u, v):
    r2 = u**2 + v**2
    x, y, z = 2 * u / (1 + r2), 2 * v / (1 + r2), (r2 - 1) / (1 + r2)
    return veronese_from_s2(x, y, z)


def cylinder(u, v):
    return np.stack([np.cos(u), np.sin(u), v + 0 * u], -1)


def _entries():
    two_pi = 2 * np.pi
    return [
        SurfaceSpec("clifford", "S3", Grid((0.0, CLIFFORD_PERIOD), (0.0, CLIFFORD_PERIOD), 64, 64, True, True),
                    builtin="clifford", expect_K=0.0, expect_P=-2.0, raw=clifford,
                    description="Clifford torus in its flat chart"),
        SurfaceSpec("catenoid", "R3", Grid((0.0, two_pi), (-1.2, 1.2), 64, 96, True, False),
                    builtin="catenoid", expect_K=1.0, expect_P=0.0, raw=catenoid,
                    description="catenoid, minimal in R^3"),
        SurfaceSpec("enneper", "R3", Grid((-1.0, 1.0), (-1.0, 1.0), 96, 96),
                    builtin="enneper", expect_K=1.0, expect_P=0.0, raw=enneper,
                    description="Enneper surface, minimal in R^3"),
        SurfaceSpec("helicoid", "R3", Grid((-1.0, 1.0), (-1.0, 1.0), 96, 96),
                    builtin="helicoid", expect_K=1.0, expect_P=0.0, raw=helicoid,
                    description="helicoid, minimal in R^3"),
        SurfaceSpec("complex_parabola", "R4", Grid((0.2, 1.2), (0.2, 1.2), 96, 96),
                    builtin="complex_parabola", expect_K=2.0, expect_P=0.0, raw=complex_parabola,
                    description="complex curve w = z^2/2 in C^2"),
        SurfaceSpec("veronese", "S4", Grid((0.15, 1.0), (0.15, 1.0), 96, 96),
                    builtin="veronese", expect_K=0.5, expect_P=-3.0, raw=veronese,
                    description="Veronese sphere in S^4, stereographic chart"),
        SurfaceSpec("cylinder", "R3", Grid((0.0, two_pi), (-1.0, 1.0), 64, 64, True, False),
                    builtin="cylinder", raw=cylinder,
                    description="round cylinder, not Willmore (negative control)"),
    ]


def catalog() -> list[SurfaceSpec]:
    return _entries()


def builtin(name: str) -> SurfaceSpec:
    for spec in _entries():
        if spec.name == name:
            return spec
    raise SurfaceError(f"unknown surface {name!r}")


def builtin_names() -> list[str]:
    return [s.name for s in _entries()]
