"""Uniform grids on a coordinate rectangle and the operators d_z, d_zbar.

Fields are numpy arrays whose first two axes index the (u, v) nodes; any
trailing axes (e.g. Lorentz components) ride along.  Periodic directions are
differentiated spectrally, the others with 6th-order finite differences
(7-point stencils, one-sided near the edges).
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
import scipy.fft as sfft

STENCIL = 7
ORDER = 6
MARGIN = 3


@dataclass(frozen=True)
class Grid:
    u_range: tuple[float, float]
    v_range: tuple[float, float]
    nu: int
    nv: int
    periodic_u: bool = False
    periodic_v: bool = False

    def __post_init__(self):
        if self.nu < 16 or self.nv < 16:
            raise ValueError("grids need at least 16 nodes per direction")
        if not self.u_range[1] > self.u_range[0] or not self.v_range[1] > self.v_range[0]:
            raise ValueError("empty coordinate range")

    @property
    def hu(self) -> float:
        u0, u1 = self.u_range
        return (u1 - u0) / (self.nu if self.periodic_u else self.nu - 1)

    @property
    def hv(self) -> float:
        v0, v1 = self.v_range
        return (v1 - v0) / (self.nv if self.periodic_v else self.nv - 1)

    @property
    def u(self) -> np.ndarray:
        return self.u_range[0] + self.hu * np.arange(self.nu)

    @property
    def v(self) -> np.ndarray:
        return self.v_range[0] + self.hv * np.arange(self.nv)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nu, self.nv)

    def nodes(self, dtype=float) -> tuple[np.ndarray, np.ndarray]:
        """Node coordinates computed in ``dtype`` (e.g. np.longdouble)."""
        def axis(lo, hi, n, periodic):
            lo, hi = np.asarray(lo, dtype), np.asarray(hi, dtype)
            return lo + (hi - lo) * np.arange(n, dtype=dtype) / (n if periodic else n - 1)
        return (axis(*self.u_range, self.nu, self.periodic_u),
                axis(*self.v_range, self.nv, self.periodic_v))

    def mesh(self, dtype=float) -> tuple[np.ndarray, np.ndarray]:
        if dtype is float:
            return np.meshgrid(self.u, self.v, indexing="ij")
        return np.meshgrid(*self.nodes(dtype), indexing="ij")

    def interior(self, margin: int = MARGIN) -> np.ndarray:
        """Boolean mask dropping ``margin`` nodes along non-periodic edges."""
        mask = np.ones(self.shape, dtype=bool)
        if margin:
            if not self.periodic_u:
                mask[:margin, :] = False
                mask[-margin:, :] = False
            if not self.periodic_v:
                mask[:, :margin] = False
                mask[:, -margin:] = False
        return mask

    def refined(self, factor: int = 2) -> "Grid":
        """Same rectangle with spacing divided by ``factor``."""
        nu = self.nu * factor if self.periodic_u else (self.nu - 1) * factor + 1
        nv = self.nv * factor if self.periodic_v else (self.nv - 1) * factor + 1
        return replace(self, nu=nu, nv=nv)

    def padded(self, pad: int) -> tuple["Grid", tuple[slice, slice]]:
        """Grid extended by ``pad`` ghost nodes beyond each non-periodic edge.

        Returns the larger grid and the index slices recovering this one.
        """
        ur, nu, su = self.u_range, self.nu, slice(None)
        vr, nv, sv = self.v_range, self.nv, slice(None)
        if pad and not self.periodic_u:
            ur = (ur[0] - pad * self.hu, ur[1] + pad * self.hu)
            nu, su = nu + 2 * pad, slice(pad, pad + self.nu)
        if pad and not self.periodic_v:
            vr = (vr[0] - pad * self.hv, vr[1] + pad * self.hv)
            nv, sv = nv + 2 * pad, slice(pad, pad + self.nv)
        return replace(self, u_range=ur, v_range=vr, nu=nu, nv=nv), (su, sv)

    def to_dict(self) -> dict:
        return {
            "u0": self.u_range[0], "u1": self.u_range[1],
            "v0": self.v_range[0], "v1": self.v_range[1],
            "nu": self.nu, "nv": self.nv,
            "periodic_u": self.periodic_u, "periodic_v": self.periodic_v,
        }


def fd_weights(offsets, m: int = 1) -> np.ndarray:
    """Fornberg's weights for the m-th derivative at 0 from nodes ``offsets``."""
    x = np.asarray(offsets, dtype=float)
    n = len(x)
    c = np.zeros((n, m + 1))
    c1, c4 = 1.0, x[0]
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, m)
        c2, c5, c4 = 1.0, c4, x[i]
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, m]


@lru_cache(maxsize=None)
def _edge_weights():
    half = STENCIL // 2
    central = fd_weights(np.arange(-half, half + 1))
    left = [fd_weights(np.arange(-i, STENCIL - i)) for i in range(half)]
    return central, left


def _fd_axis(f: np.ndarray, h: float, axis: int) -> np.ndarray:
    n = f.shape[axis]
    if n < STENCIL:
        raise ValueError(f"need at least {STENCIL} nodes for the FD stencil, got {n}")
    g = np.moveaxis(f, axis, 0)
    out = np.empty_like(g)
    central, left = _edge_weights()
    half = STENCIL // 2
    acc = np.zeros_like(g[half:n - half])
    for k, w in enumerate(central):
        acc = acc + w * g[k:n - 2 * half + k]
    out[half:n - half] = acc
    for i, w in enumerate(left):
        acc = np.zeros_like(g[0])
        for k in range(STENCIL):
            acc = acc + w[k] * g[k]
        out[i] = acc
        # mirrored stencil at the far edge: weights flip sign
        acc = np.zeros_like(g[0])
        for k in range(STENCIL):
            acc = acc - w[k] * g[n - 1 - k]
        out[n - 1 - i] = acc
    return np.moveaxis(out, 0, axis) / h


def _spectral_axis(f: np.ndarray, length: float, axis: int) -> np.ndarray:
    n = f.shape[axis]
    k = np.fft.rfftfreq(n, d=1.0 / n) * (2.0 * np.pi / length)
    if n % 2 == 0:
        k[-1] = 0.0  # Nyquist mode carries no first derivative
    shape = [1] * f.ndim
    shape[axis] = k.size
    F = sfft.rfft(f, axis=axis)
    return sfft.irfft(1j * k.reshape(shape).astype(f.dtype) * F, n=n, axis=axis)


def _real_partial(f: np.ndarray, g: Grid, axis: int) -> np.ndarray:
    if axis == 0:
        if g.periodic_u:
            return _spectral_axis(f, g.u_range[1] - g.u_range[0], 0)
        return _fd_axis(f, g.hu, 0)
    if g.periodic_v:
        return _spectral_axis(f, g.v_range[1] - g.v_range[0], 1)
    return _fd_axis(f, g.hv, 1)


def _check(f: np.ndarray, g: Grid) -> np.ndarray:
    f = np.asarray(f)
    if f.shape[:2] != g.shape:
        raise ValueError(f"field shape {f.shape[:2]} does not match grid {g.shape}")
    return f


def d_u(f, g: Grid) -> np.ndarray:
    f = _check(f, g)
    if np.iscomplexobj(f):
        return _real_partial(f.real, g, 0) + 1j * _real_partial(f.imag, g, 0)
    return _real_partial(f, g, 0)


def d_v(f, g: Grid) -> np.ndarray:
    f = _check(f, g)
    if np.iscomplexobj(f):
        return _real_partial(f.real, g, 1) + 1j * _real_partial(f.imag, g, 1)
    return _real_partial(f, g, 1)


def _parts(f, g):
    f = _check(f, g)
    a = np.real(f)
    b = np.imag(f) if np.iscomplexobj(f) else None
    au, av = _real_partial(a, g, 0), _real_partial(a, g, 1)
    if b is None:
        return au, av, None, None
    return au, av, _real_partial(b, g, 0), _real_partial(b, g, 1)


def d_z(f, g: Grid) -> np.ndarray:
    """(d_u - i d_v) f / 2, computed from real and imaginary parts separately."""
    au, av, bu, bv = _parts(f, g)
    if bu is None:
        return 0.5 * (au - 1j * av)
    return 0.5 * ((au + bv) + 1j * (bu - av))


def d_zbar(f, g: Grid) -> np.ndarray:
    """(d_u + i d_v) f / 2; satisfies d_z(conj f) == conj(d_zbar f) bitwise."""
    au, av, bu, bv = _parts(f, g)
    if bu is None:
        return 0.5 * (au + 1j * av)
    return 0.5 * ((au - bv) + 1j * (bu + av))


def laplacian_conformal(f, omega, g: Grid) -> np.ndarray:
    """4 e^{-2 omega} d_z d_zbar f."""
    omega = np.asarray(omega)
    if np.iscomplexobj(omega) and np.max(np.abs(omega.imag)) > 0:
        raise ValueError("conformal factor omega must be real")
    lap = 4.0 * d_z(d_zbar(f, g), g)
    if not np.iscomplexobj(f):
        lap = lap.real
    return np.exp(-2.0 * np.real(omega)) * lap


def quadrature_weights(g: Grid) -> np.ndarray:
    wu = np.full(g.nu, g.hu)
    wv = np.full(g.nv, g.hv)
    if not g.periodic_u:
        wu[[0, -1]] *= 0.5
    if not g.periodic_v:
        wv[[0, -1]] *= 0.5
    return np.outer(wu, wv)


def integrate_density(f, weight, g: Grid) -> float:
    """Trapezoid / rectangle rule for the integral of f*weight du dv."""
    f = np.asarray(_check(f, g))
    weight = np.asarray(weight) * np.ones(g.shape)
    if np.iscomplexobj(f) or np.iscomplexobj(weight):
        raise ValueError("integrate_density expects real fields")
    return float(np.sum(f * weight * quadrature_weights(g)))
