"""Moebius invariants of a conformally parametrized surface in S^3 or S^4.

Conventions: every pairing <a, b> is the complex *bilinear* Minkowski form;
the Hermitian pairing is always written <a, conj(b)>.  Vector fields have
shape (nu, nv, n+2).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .diffgrid import Grid, d_u, d_v, d_z, d_zbar, integrate_density, laplacian_conformal
from .exprsurf.surface import SurfaceError, SurfaceSpec, raw_point, sample
from .minkowski import hermitian_norm2, lift_to_cone, lorentz_dot as dot

UMBILIC_REL = 1e-6
# kk below this is discretisation noise (a round sphere gives ~1e-10 on the default grids)
UMBILIC_ABS = 1e-8
PSI_MIN = 1e-8
NORMAL_TOL = 1e-6
DUAL_DEFECT_TOL = 1e-5
GHOST_NODES = 16
# extended precision: roundoff, not truncation, limits 5-7 nested FD derivatives
WORK_DTYPE = np.longdouble


class UmbilicError(ValueError):
    pass


@dataclass
class FrameField:
    Y: np.ndarray
    Yz: np.ndarray
    N: np.ndarray
    Yzz: np.ndarray
    Yzzb: np.ndarray
    grid: Grid

    @property
    def Yzb(self) -> np.ndarray:
        return np.conj(self.Yz)

    def gram_residuals(self) -> dict[str, np.ndarray]:
        Y, Yz, Yzb, N = self.Y, self.Yz, self.Yzb, self.N
        return {
            "<Y,Y>": np.abs(dot(Y, Y)),
            "<N,N>": np.abs(dot(N, N)),
            "<Y,N>+1": np.abs(dot(Y, N) + 1.0),
            "<N,Yz>": np.abs(dot(N, Yz)),
            "<Yz,Yz>": np.abs(dot(Yz, Yz)),
            "<Yz,Yzb>-1/2": np.abs(dot(Yz, Yzb) - 0.5),
        }


@dataclass
class InvariantField:
    """Per-node invariants; ``mask`` marks umbilic-free (usable) nodes."""
    grid: Grid
    n: int
    frame: FrameField
    s: np.ndarray
    kappa: np.ndarray
    kk: np.ndarray            # <kappa, conj kappa>
    kappa_sq: np.ndarray      # <kappa, kappa>
    omega: np.ndarray
    K: np.ndarray
    Dz_kappa: np.ndarray
    Dzb_kappa: np.ndarray
    mubar: np.ndarray
    rho: np.ndarray
    P: np.ndarray
    psi: np.ndarray
    Theta: np.ndarray
    lam: np.ndarray
    sres_swillmore: np.ndarray
    mask: np.ndarray
    name: str = ""
    domain: Optional[Grid] = None
    window: tuple = (slice(None), slice(None))
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.domain is None:
            self.domain = self.grid

    @property
    def mu(self) -> np.ndarray:
        return np.conj(self.mubar)

    @property
    def region(self) -> np.ndarray:
        """Requested domain minus its boundary margin, on the working grid."""
        out = np.zeros(self.grid.shape, dtype=bool)
        out[self.window] = self.domain.interior()
        return out

    @property
    def interior(self) -> np.ndarray:
        return self.mask & self.region

    def crop(self, f: np.ndarray) -> np.ndarray:
        """Restrict a working-grid field to the requested domain."""
        return np.asarray(f)[self.window]

    @property
    def metric(self) -> np.ndarray:
        return np.exp(2.0 * self.omega)


# -- lift and frame ---------------------------------------------------------

def canonical_lift_from_field(F: np.ndarray, g: Grid) -> np.ndarray:
    """Rescale any light-cone lift F so that <Y_z, Y_zbar> = 1/2."""
    Fz = d_z(F, g)
    metric = 2.0 * np.real(dot(Fz, np.conj(Fz)))
    if np.any(metric <= 0):
        raise SurfaceError("degenerate induced metric: not an immersion")
    return F / np.sqrt(metric)[..., None]


def canonical_lift(spec: SurfaceSpec, g: Optional[Grid] = None) -> np.ndarray:
    g = g or spec.grid
    return canonical_lift_from_field(lift_to_cone(sample(spec, g)), g)


def build_frame(Y: np.ndarray, g: Grid) -> FrameField:
    """Frame {Y, Y_z, Y_zbar, N} with N = 2 Y_zzb + 2 <Y_zzb, Y_zzb> Y."""
    Y = np.asarray(Y)
    Yz = d_z(Y, g)
    if np.max(np.abs(Yz)) == 0.0:
        raise SurfaceError("constant lift: not an immersion")
    Yzz = d_z(Yz, g)
    Yzzb = np.real(d_zbar(Yz, g))
    N = 2.0 * Yzzb + 2.0 * dot(Yzzb, Yzzb)[..., None] * Y
    return FrameField(Y=Y, Yz=Yz, N=N, Yzz=Yzz, Yzzb=Yzzb, grid=g)


def schwarzian_hopf(fr: FrameField) -> tuple[np.ndarray, np.ndarray]:
    """s = 2 <Y_zz, N>,  kappa = Y_zz + (s/2) Y."""
    s = 2.0 * dot(fr.Yzz, fr.N)
    kappa = fr.Yzz + 0.5 * s[..., None] * fr.Y
    return s, kappa


def umbilic_mask(kk: np.ndarray) -> np.ndarray:
    metric = 4.0 * kk
    return (kk >= UMBILIC_ABS) & (metric >= UMBILIC_REL * np.median(np.abs(metric)))


def metric_curvature(kappa: np.ndarray, g: Grid, mask=None) -> tuple[np.ndarray, np.ndarray]:
    """omega = log(4<kappa, conj kappa>)/2 and K = -Laplacian(omega)."""
    kk = hermitian_norm2(kappa)
    if mask is None:
        mask = umbilic_mask(kk)
    floor = np.max(kk) * 1e-300 + 1e-300
    omega = 0.5 * np.log(4.0 * np.maximum(kk, floor))
    K = -laplacian_conformal(omega, omega, g)
    return omega, K


# -- normal bundle ----------------------------------------------------------

def tangential_part(w: np.ndarray, fr: FrameField) -> np.ndarray:
    """Component of w in V = span{Y, Y_z, Y_zbar, N}."""
    a = -dot(w, fr.N)
    d = -dot(w, fr.Y)
    b = 2.0 * dot(w, fr.Yzb)
    c = 2.0 * dot(w, fr.Yz)
    return (a[..., None] * fr.Y + b[..., None] * fr.Yz
            + c[..., None] * fr.Yzb + d[..., None] * fr.N)


def normal_residual(xi: np.ndarray, fr: FrameField) -> np.ndarray:
    """max over frame vectors of |<xi, e>| relative to |xi|."""
    size = np.sqrt(np.maximum(hermitian_norm2(xi), 1e-300))
    prods = [dot(xi, fr.Y), dot(xi, fr.Yz), dot(xi, fr.Yzb), dot(xi, fr.N)]
    return np.max(np.abs(np.stack(prods)), axis=0) / size


def normal_connection(xi: np.ndarray, fr: FrameField, mask=None, check: bool = True):
    """(D_z xi, D_zbar xi) for a section xi of the complexified normal bundle."""
    g = fr.grid
    if check:
        res = normal_residual(xi, fr)
        sel = g.interior() if mask is None else (mask & g.interior())
        worst = float(np.max(res[sel])) if np.any(sel) else 0.0
        if worst > NORMAL_TOL:
            raise ValueError(f"field is not normal to the mean curvature sphere ({worst:.3e})")
    xz = d_z(xi, g)
    xzb = d_zbar(xi, g)
    return xz - tangential_part(xz, fr), xzb - tangential_part(xzb, fr)


def _det(A: np.ndarray) -> np.ndarray:
    # cofactor expansion along the first row; keeps the input dtype (np.linalg.det is double-only)
    m = A.shape[-1]
    if m == 1:
        return A[..., 0, 0]
    if m == 2:
        return A[..., 0, 0] * A[..., 1, 1] - A[..., 0, 1] * A[..., 1, 0]
    out = 0
    for k in range(m):
        minor = np.delete(np.delete(A, 0, axis=-2), k, axis=-1)
        out = out + (-1) ** k * A[..., 0, k] * _det(minor)
    return out


def lorentz_cross(vectors: list[np.ndarray]) -> np.ndarray:
    """Vector X with <X, w> = det[w, vectors...] (dim-1 real vector fields)."""
    A = np.stack(vectors, axis=-2)
    dim = A.shape[-1]
    cof = []
    for k in range(dim):
        minor = np.delete(A, k, axis=-1)
        cof.append((-1) ** k * _det(minor))
    X = np.stack(cof, axis=-1)
    X[..., 0] = -X[..., 0]
    return X


def _unit(w):
    return w / np.sqrt(np.maximum(np.real(dot(w, w)), 1e-300))[..., None]


def normal_basis(fr: FrameField, mask=None) -> list[np.ndarray]:
    """Smooth orthonormal frame of the normal bundle V^perp.

    Rank 1 (S^3): the cross product of Y, Re Y_z, Im Y_z, N.  Rank 2 (S^4):
    the coordinate axis whose projection to V^perp stays largest over the grid,
    completed by a cross product.
    """
    dim = fr.Y.shape[-1]
    span = [fr.Y, np.real(fr.Yz), np.imag(fr.Yz), fr.N]
    if dim == 5:
        return [_unit(lorentz_cross(span))]
    if dim != 6:
        raise ValueError("normal frames are implemented for S^3 and S^4 only")
    sel = np.ones(fr.grid.shape, dtype=bool) if mask is None else mask
    best, best_score = None, -np.inf
    for i in range(dim):
        e = np.zeros(dim)
        e[i] = 1.0
        w = np.broadcast_to(e, fr.Y.shape).astype(fr.Y.dtype)
        w = np.real(w - tangential_part(w, fr))
        score = float(np.min(np.real(dot(w, w))[sel]))
        if score > best_score:
            best, best_score = w, score
    X1 = _unit(best)
    return [X1, _unit(lorentz_cross(span + [X1]))]


# -- scalar invariants ------------------------------------------------------

def unwrap_phase(P: np.ndarray, valid: np.ndarray) -> np.ndarray:
    """Continuous arg P: unwrap along rows, then align rows along the first column."""
    ang = np.angle(P)
    psi = np.unwrap(ang, axis=1)
    col = np.unwrap(ang[:, 0])
    psi = psi + (col - psi[:, 0])[:, None]
    idx = np.argwhere(valid)
    if len(idx):
        i, j = idx[0]
        base = ang[i, j]
        if base <= -np.pi + 1e-12:
            base = np.pi
        psi = psi + 2 * np.pi * np.round((base - psi[i, j]) / (2 * np.pi))
    return np.where(valid, psi, np.nan)


def mu_rho_P(kappa, Dzb_kappa, kk, g: Grid, Dz_kappa=None):
    """mu-bar (least squares along kappa), rho, P, psi, Theta and the defect."""
    mubar = -2.0 * dot(Dzb_kappa, np.conj(kappa)) / kk
    resid = Dzb_kappa + 0.5 * mubar[..., None] * kappa
    defect = np.sqrt(np.abs(hermitian_norm2(resid)) / kk)
    rho = d_z(mubar, g) - 2.0 * kk
    P = rho / kk
    Theta = rho * dot(kappa, kappa)
    lam = None if Dz_kappa is None else dot(Dz_kappa, np.conj(kappa)) / kk
    return mubar, rho, P, Theta, defect, lam


def invariants_from_lift(Y: np.ndarray, g: Grid, name: str = "",
                         domain: Optional[Grid] = None, window=None) -> InvariantField:
    """Full pipeline starting from a lift sampled on ``g``.

    ``domain``/``window`` describe the requested sub-grid when ``g`` carries
    ghost nodes; statistics are then taken on the domain only.
    """
    Y = canonical_lift_from_field(np.asarray(Y), g)
    fr = build_frame(Y, g)
    s, kappa = schwarzian_hopf(fr)
    kk = hermitian_norm2(kappa)
    mask = umbilic_mask(kk)
    if not np.any(mask):
        raise UmbilicError("no umbilic-free nodes")
    kk_safe = np.where(mask, kk, np.max(kk))
    omega, K = metric_curvature(kappa, g, mask)
    Dz_kappa, Dzb_kappa = normal_connection(kappa, fr, mask, check=False)
    mubar, rho, P, Theta, defect, lam = mu_rho_P(kappa, Dzb_kappa, kk_safe, g, Dz_kappa)
    psi = unwrap_phase(P, mask & (np.abs(P) >= PSI_MIN))
    return InvariantField(
        grid=g, n=Y.shape[-1] - 2, frame=fr, s=s, kappa=kappa, kk=kk,
        kappa_sq=dot(kappa, kappa), omega=omega, K=K,
        Dz_kappa=Dz_kappa, Dzb_kappa=Dzb_kappa, mubar=mubar, rho=rho, P=P,
        psi=psi, Theta=Theta, lam=lam, sres_swillmore=defect, mask=mask, name=name,
        domain=domain, window=window or (slice(None), slice(None)),
    )


def compute_invariants(spec: SurfaceSpec, g: Optional[Grid] = None,
                       ghost: int = GHOST_NODES, dtype=WORK_DTYPE) -> InvariantField:
    """Run the pipeline on ``g`` (default: the spec's grid).

    The closed-form surface is sampled on ``ghost`` extra nodes beyond each
    non-periodic edge so one-sided stencils stay away from the domain.
    """
    g = g or spec.grid
    work, window = g.padded(ghost)
    F = lift_to_cone(sample(spec, work, dtype))
    return invariants_from_lift(F, work, name=spec.name, domain=g, window=window)


# -- dual surface and functionals ------------------------------------------

def dual_surface(inv: InvariantField) -> tuple[np.ndarray, dict]:
    """Y-hat = |mu|^2/2 Y + mubar Y_z + mu Y_zbar + N, with its defining identities."""
    from .verify import willmore_field  # verify imports this module

    sel = inv.interior
    worst = float(np.max(inv.sres_swillmore[sel]))
    if worst > DUAL_DEFECT_TOL:
        raise ValueError(f"surface is not S-Willmore (defect {worst:.3e}); dual undefined")
    # in S^3 the normal bundle has rank 1, so the defect alone is always ~0
    wres = float(np.max(willmore_field(inv)[sel]))
    if wres > DUAL_DEFECT_TOL:
        raise ValueError(f"surface is not Willmore (residual {wres:.3e}); dual undefined")
    fr, g = inv.frame, inv.grid
    mu, mubar, rho = inv.mu, inv.mubar, inv.rho
    Yhat = np.real(0.5 * (np.abs(mu) ** 2)[..., None] * fr.Y
                   + mubar[..., None] * fr.Yz + mu[..., None] * fr.Yzb + fr.N)
    Yhz = d_z(Yhat, g)
    rhs = 0.5 * mu[..., None] * Yhat + rho[..., None] * (fr.Yz + 0.5 * mu[..., None] * fr.Y)
    checks = {
        "yhat_null": np.abs(dot(Yhat, Yhat)),
        "yhat_z": np.sqrt(np.sum(np.abs(Yhz - rhs) ** 2, axis=-1)),
        "yhat_conformal": np.abs(dot(Yhz, Yhz)),
        "yhat_metric": np.abs(dot(Yhz, np.conj(Yhz)) - 0.5 * np.abs(rho) ** 2),
    }
    return Yhat, checks


def willmore_functional(kappa: np.ndarray, g: Grid) -> float:
    """W = 4 * integral of <kappa, conj kappa> du dv."""
    return integrate_density(hermitian_norm2(kappa), 4.0, g)


def willmore_of(inv: InvariantField) -> float:
    return willmore_functional(inv.crop(inv.kappa), inv.domain)


@dataclass
class EuclideanShape:
    H: np.ndarray
    K: np.ndarray
    dM: np.ndarray
    W_tilde: float


def euclidean_shape(spec: SurfaceSpec, g: Optional[Grid] = None,
                    ghost: int = GHOST_NODES) -> EuclideanShape:
    """Classical H, K for an R^3 surface; normal is f_v x f_u normalized."""
    if spec.target != "R3":
        raise SurfaceError("euclidean_shape needs an R3 target")
    domain = g or spec.grid
    g, window = domain.padded(ghost)
    U, V = g.mesh(WORK_DTYPE)
    f = raw_point(spec, U, V)
    fu, fv = d_u(f, g), d_v(f, g)
    fuu, fuv, fvv = d_u(fu, g), d_v(fu, g), d_v(fv, g)
    nrm = np.cross(fv, fu)
    nrm /= np.linalg.norm(nrm, axis=-1, keepdims=True)
    E, F, G = (np.sum(a * b, -1) for a, b in ((fu, fu), (fu, fv), (fv, fv)))
    L, M, Nn = (np.sum(a * nrm, -1) for a in (fuu, fuv, fvv))
    det = E * G - F * F
    H = (E * Nn - 2 * F * M + G * L) / (2 * det)
    K = (L * Nn - M * M) / det
    dM = np.sqrt(det)
    H, K, dM = H[window], K[window], dM[window]
    W_tilde = integrate_density(H * H - K, dM, domain)
    return EuclideanShape(H=H, K=K, dM=dM, W_tilde=W_tilde)
