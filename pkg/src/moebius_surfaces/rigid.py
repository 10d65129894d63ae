"""Integration of the constant-invariant frame systems (Clifford, Veronese).

Both systems are written in the real coordinates z = u + iv.  With
d_u = d_z + d_zbar and d_v = i(d_z - d_zbar):

    F_uu = 2 Re F_zz + 2 F_zzbar,   F_vv = -2 Re F_zz + 2 F_zzbar,
    F_uv = -2 Im F_zz,              G_u = 2 Re G_z,  G_v = -2 Im G_z  (G real).

The frame is integrated with classic RK4 along a spine line through the
initial point and then along the transverse lines (all lines at once).
No re-orthonormalization is applied: Gram drift is a diagnostic.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .diffgrid import Grid, MARGIN, d_u, d_v
from .invariants import GHOST_NODES, WORK_DTYPE, InvariantField, invariants_from_lift
from .minkowski import lorentz_dot
from .verify import ISOTROPY_TOL, ResidualReport, classify

GRAM_TOL = 1e-10
DRIFT_FLAG = 1e-6

A_CLIFFORD = 2 * math.sqrt(2)


class FrameError(ValueError):
    pass


@dataclass(frozen=True)
class RigidSystem:
    """Real first-order frame system: state (..., nvec, dim) -> derivative."""

    name: str
    names: tuple[str, ...]
    dim: int
    du: Callable
    dv: Callable
    gram: Callable  # (u, v) -> expected Gram matrix of the state vectors
    meta: dict = field(default_factory=dict)


def _split(S):
    return [S[..., k, :] for k in range(S.shape[-2])]


def _stack(*vecs):
    return np.stack(vecs, axis=-2)


# -- Clifford ---------------------------------------------------------------

def clifford_rhs() -> RigidSystem:
    """Y_zz = X, Y_zzbar = -Y + N/2, N_z = -2 Y_z, X_z = -2 Y_zbar (state Y, Y_u, Y_v, N, X)."""

    def du(S, u, v):
        Y, Yu, Yv, N, X = _split(S)
        return _stack(Yu, 2 * X - 2 * Y + N, 0 * Yv, -2 * Yu, -2 * Yu)

    def dv(S, u, v):
        Y, Yu, Yv, N, X = _split(S)
        return _stack(Yv, 0 * Yu, -2 * X - 2 * Y + N, -2 * Yv, 2 * Yv)

    G = np.array([[0, 0, 0, -1, 0], [0, 1, 0, 0, 0], [0, 0, 1, 0, 0],
                  [-1, 0, 0, 0, 0], [0, 0, 0, 0, 1]], dtype=float)

    def gram(u, v):
        return np.broadcast_to(G, np.shape(u) + G.shape)

    return RigidSystem("clifford", ("Y", "Y_u", "Y_v", "N", "X"), 5, du, dv, gram,
                       {"K": 0.0, "P": -2.0, "space": "S3"})


def clifford_closed_form(u, v, dtype=float) -> np.ndarray:
    """Explicit frame of Y = (sqrt2, cos au, sin au, cos av, sin av) / (2 sqrt2), a = 2 sqrt2."""
    u = np.asarray(u, dtype=dtype)
    v = np.asarray(v, dtype=dtype)
    a = 2 * np.sqrt(np.asarray(2, dtype=dtype))
    cu, su, cv, sv = np.cos(a * u), np.sin(a * u), np.cos(a * v), np.sin(a * v)
    z, one = np.zeros_like(cu), np.ones_like(cu)
    r2 = np.sqrt(np.asarray(2, dtype=dtype))
    Y = np.stack([r2 * one, cu, su, cv, sv], axis=-1) / (2 * r2)
    Yu = np.stack([z, -su, cu, z, z], axis=-1)
    Yv = np.stack([z, z, z, -sv, cv], axis=-1)
    circ = np.stack([z, cu, su, cv, sv], axis=-1)
    N = 2 * Y - r2 * circ  # 2 Y_zzbar + 2 Y
    X = -np.stack([z, cu, su, -cv, -sv], axis=-1) / r2  # Y_zz
    return np.stack([Y, Yu, Yv, N, X], axis=-2)


# -- Veronese ---------------------------------------------------------------

def veronese_metric(u, v):
    """omega with e^{2 omega} = 8 / (1 + |z|^2)^2 (curvature 1/2): (e2w, omega_z, omega_zz)."""
    z = u + 1j * v
    r = 1 + u * u + v * v
    e2w = 8 / (r * r)
    wz = -np.conj(z) / r
    wzz = np.conj(z) ** 2 / (r * r)
    return e2w, wz, wzz


def veronese_rhs() -> RigidSystem:
    """Isotropic frame with constant K = 1/2 (state Y, Y_u, Y_v, N, Re kappa, Im kappa).

    Y_zz = q Y + kappa, Y_zzbar = -e Y/4 + N/2,
    N_z = -e Y_z/2 + 2 q Y_zbar - 2 omega_zbar kappa,
    kappa_z = 3 omega_z kappa,
    kappa_zbar = -omega_zbar kappa - omega_z e Y/2 - e Y_z/2,
    with e = e^{2 omega} and q = omega_z^2 - omega_zz.
    """

    def parts(S, u, v):
        Y, Yu, Yv, N, kr, ki = _split(S)
        e, wz, wzz = veronese_metric(u, v)
        e, wz, wzz = e[..., None], wz[..., None], wzz[..., None]
        q = wz * wz - wzz
        kap = kr + 1j * ki
        Yz = 0.5 * (Yu - 1j * Yv)
        Yzb = 0.5 * (Yu + 1j * Yv)
        Yzz = q * Y + kap
        Yzzb = -0.25 * e * Y + 0.5 * N
        Nz = -0.5 * e * Yz + 2 * q * Yzb - 2 * np.conj(wz) * kap
        kz = 3 * wz * kap
        kzb = -np.conj(wz) * kap - 0.5 * wz * e * Y - 0.5 * e * Yz
        return Y, Yu, Yv, Yzz, Yzzb, Nz, kz, kzb

    def du(S, u, v):
        Y, Yu, Yv, Yzz, Yzzb, Nz, kz, kzb = parts(S, u, v)
        ku = kz + kzb
        return _stack(Yu, 2 * Yzz.real + 2 * Yzzb, -2 * Yzz.imag, 2 * Nz.real, ku.real, ku.imag)

    def dv(S, u, v):
        Y, Yu, Yv, Yzz, Yzzb, Nz, kz, kzb = parts(S, u, v)
        kv = 1j * (kz - kzb)
        return _stack(Yv, -2 * Yzz.imag, -2 * Yzz.real + 2 * Yzzb, -2 * Nz.imag, kv.real, kv.imag)

    def gram(u, v):
        e = veronese_metric(np.asarray(u, dtype=float), np.asarray(v, dtype=float))[0]
        G = np.zeros(np.shape(e) + (6, 6))
        G[..., 0, 3] = G[..., 3, 0] = -1
        G[..., 1, 1] = G[..., 2, 2] = 1
        G[..., 4, 4] = G[..., 5, 5] = e / 8
        return G

    return RigidSystem("veronese", ("Y", "Y_u", "Y_v", "N", "Re kappa", "Im kappa"), 6,
                       du, dv, gram, {"K": 0.5, "P": -3.0, "space": "S4"})


def veronese_init(dtype=float) -> np.ndarray:
    """Frame at z = 0: Y = (e0+e5)/sqrt2, N = (e0-e5)/sqrt2, Y_u = e1, Y_v = e2, kappa = e3 + i e4."""
    E = np.eye(6, dtype=dtype)
    r = np.sqrt(np.asarray(2, dtype=dtype))
    return np.stack([(E[0] + E[5]) / r, E[1], E[2], (E[0] - E[5]) / r, E[3], E[4]])


SYSTEMS = {"clifford": clifford_rhs, "veronese": veronese_rhs}


# -- integration -------------------------------------------------------------

def gram_matrix(S: np.ndarray) -> np.ndarray:
    return lorentz_dot(S[..., :, None, :], S[..., None, :, :])


def check_init(sys: RigidSystem, init: np.ndarray, u0: float, v0: float, tol: float = GRAM_TOL):
    init = np.asarray(init)
    if init.shape != (len(sys.names), sys.dim):
        raise FrameError(f"{sys.name} state must have shape {(len(sys.names), sys.dim)}")
    dev = np.abs(gram_matrix(init).astype(float) - sys.gram(np.asarray(u0), np.asarray(v0)))
    if np.max(dev) > tol:
        i, j = np.unravel_index(np.argmax(dev), dev.shape)
        raise FrameError(f"initial frame violates <{sys.names[i]},{sys.names[j]}> "
                         f"by {dev[i, j]:.3e} (tol {tol:g})")


def _rk4_line(f, S, t0, targets, fixed, h, along_u):
    """Integrate dS/dt = f from t0 to each sorted target; ``fixed`` is the other coordinate."""
    out = np.empty((len(targets),) + S.shape, dtype=S.dtype)

    def F(state, t):
        tt = np.full(state.shape[:-2], t, dtype=state.dtype)
        return f(state, tt, fixed) if along_u else f(state, fixed, tt)

    hs = []
    for sel, order in ((targets >= t0, 1), (targets < t0, -1)):
        idx = np.nonzero(sel)[0][::order]
        y, t = S.copy(), S.dtype.type(t0)
        for i in idx:
            span = targets[i] - t
            m = max(1, math.ceil(abs(float(span)) / h - 1e-9))
            dt = span / m
            if m and span:
                hs.append(abs(float(dt)))
            for _ in range(m):
                k1 = F(y, t)
                k2 = F(y + 0.5 * dt * k1, t + 0.5 * dt)
                k3 = F(y + 0.5 * dt * k2, t + 0.5 * dt)
                k4 = F(y + dt * k3, t + dt)
                y = y + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
                t = t + dt
            t = targets[i]
            out[i] = y
    return out, (max(hs) if hs else 0.0)


@dataclass
class Trajectory:
    system: str
    grid: Grid            # requested grid
    work: Grid            # grid actually integrated (with ghost nodes)
    window: tuple
    state: np.ndarray     # (nu, nv, nvec, dim) on the work grid
    origin: tuple[float, float]
    h: float
    h_eff: float
    order: str
    diagnostics: dict = field(default_factory=dict)

    @property
    def Y(self) -> np.ndarray:
        return self.state[..., 0, :]

    def crop(self, f):
        return f[self.window]

    @property
    def flagged(self) -> bool:
        return self.diagnostics.get("gram_drift", 0.0) > DRIFT_FLAG


def integrate_frame(sys: RigidSystem, init: np.ndarray, grid: Grid, h: float = 1e-3,
                    origin: tuple[float, float] = (0.0, 0.0), order: str = "uv",
                    ghost: int = 0, check: bool = True, dtype=WORK_DTYPE) -> Trajectory:
    """RK4 sweep from ``origin``: spine along the first axis of ``order``, then transverse lines.

    The largest substep used never exceeds ``h``; each grid interval is split
    evenly so the nodes are hit exactly (h_eff <= h).
    """
    if order not in ("uv", "vu"):
        raise ValueError("order must be 'uv' or 'vu'")
    if h <= 0:
        raise ValueError("step must be positive")
    u0, v0 = origin
    if check:
        check_init(sys, init, u0, v0)
    work, window = grid.padded(ghost)
    us, vs = work.nodes(dtype)
    S0 = np.asarray(init, dtype=dtype)
    U0, V0 = dtype(u0), dtype(v0)
    if order == "uv":
        spine, h1 = _rk4_line(sys.du, S0, U0, us, V0, h, True)          # (nu, nvec, dim)
        lines, h2 = _rk4_line(sys.dv, spine, V0, vs, us, h, False)     # (nv, nu, nvec, dim)
        state = np.swapaxes(lines, 0, 1)
    else:
        spine, h1 = _rk4_line(sys.dv, S0, V0, vs, U0, h, False)
        state, h2 = _rk4_line(sys.du, spine, U0, us, vs, h, True)      # (nu, nv, nvec, dim)
    traj = Trajectory(sys.name, grid, work, window, state, (float(u0), float(v0)), h,
                      max(h1, h2), order)
    traj.diagnostics.update(gram_diagnostics(sys, traj))
    traj.diagnostics.update(compatibility(traj))
    return traj


def gram_diagnostics(sys: RigidSystem, traj: Trajectory) -> dict:
    U, V = traj.work.mesh()
    dev = np.abs(gram_matrix(traj.state).astype(float) - sys.gram(U, V))
    drift = np.max(dev, axis=(-2, -1))
    arc = np.abs(U - traj.origin[0]) + np.abs(V - traj.origin[1])
    rate = np.where(arc > 0, drift / np.maximum(arc, 1e-300), 0.0)
    return {"gram_drift": float(np.max(drift)), "gram_drift_per_length": float(np.max(rate)),
            "gram_field": drift}


def compatibility(traj: Trajectory) -> dict:
    """Mixed-partial residuals |(Y_u)_v - (Y_v)_u| and |Y_u - dY/du|, |Y_v - dY/dv| on the domain."""
    g, S = traj.work, traj.state
    Y, Yu, Yv = S[..., 0, :], S[..., 1, :], S[..., 2, :]
    sel = np.zeros(g.shape, dtype=bool)
    sel[traj.window] = True
    if not (traj.grid.periodic_u and traj.grid.periodic_v):
        inner = np.zeros(traj.grid.shape, dtype=bool)
        inner[traj.grid.interior(MARGIN)] = True
        sel[traj.window] = inner
    norm = lambda w: np.sqrt(np.sum(w.astype(float) ** 2, axis=-1))  # noqa: E731
    mixed = norm(d_v(Yu, g) - d_u(Yv, g))
    tang = np.maximum(norm(d_u(Y, g) - Yu), norm(d_v(Y, g) - Yv))
    return {"mixed_partial": float(np.max(mixed[sel])), "tangent_consistency": float(np.max(tang[sel]))}


def sweep_difference(a: Trajectory, b: Trajectory) -> float:
    return float(np.max(np.abs((a.state - b.state).astype(float))))


def clifford_trajectory(grid: Optional[Grid] = None, h: float = 1e-3, order: str = "uv",
                        dtype=WORK_DTYPE) -> Trajectory:
    """Integrate the Clifford system from the explicit frame at (0, 0) over one period."""
    from .exprsurf.catalog import CLIFFORD_PERIOD
    grid = grid or Grid((0.0, CLIFFORD_PERIOD), (0.0, CLIFFORD_PERIOD), 64, 64, True, True)
    init = clifford_closed_form(0.0, 0.0, dtype)
    return integrate_frame(clifford_rhs(), init, grid, h=h, order=order, dtype=dtype)


VERONESE_GRID = Grid((-1.5, 1.5), (-1.5, 1.5), 96, 96)


def veronese_trajectory(grid: Optional[Grid] = None, h: float = 1e-3, order: str = "uv",
                        ghost: int = GHOST_NODES, dtype=WORK_DTYPE) -> Trajectory:
    """Integrate the Veronese system from the frame at z = 0 over the patch (plus ghost nodes)."""
    grid = grid or VERONESE_GRID
    return integrate_frame(veronese_rhs(), veronese_init(dtype), grid, h=h, order=order,
                           ghost=ghost, dtype=dtype)


def closed_form_error(traj: Trajectory) -> float:
    """max |Y_integrated - Y_explicit| for a Clifford trajectory."""
    if traj.system != "clifford":
        raise ValueError("closed form is available for the Clifford system only")
    U, V = traj.work.mesh(traj.state.dtype)
    ref = clifford_closed_form(U, V, traj.state.dtype)
    return float(np.max(np.abs((traj.crop(traj.state) - ref[traj.window])[..., 0, :]).astype(float)))


def trajectory_invariants(traj: Trajectory) -> InvariantField:
    return invariants_from_lift(traj.Y, traj.work, name=f"{traj.system}-integrated",
                                domain=traj.grid, window=traj.window)


RECON_TOL = {"clifford": (1e-6, 1e-6), "veronese": (1e-3, 1e-2)}


def reconstructed_invariants(traj: Trajectory, inv: Optional[InvariantField] = None) -> ResidualReport:
    """Feed the integrated lift through the invariants pipeline and compare with the model."""
    sys = SYSTEMS[traj.system]()
    inv = inv or trajectory_invariants(traj)
    kt, pt = RECON_TOL[traj.system]
    rep = ResidualReport(surface=inv.name, grid=traj.grid.to_dict(),
                         config={"h": traj.h, "h_eff": traj.h_eff, "order": traj.order,
                                 "origin": list(traj.origin)})
    sel = inv.interior
    rep.add("recon.K", inv.K - sys.meta["K"], sel, kt, f"K = {sys.meta['K']:g}")
    rep.add("recon.P", inv.P - sys.meta["P"], sel, pt, f"P = {sys.meta['P']:g}")
    if sys.meta["space"] == "S4":
        rep.add("isotropy", inv.kappa_sq, sel, ISOTROPY_TOL)
    d = traj.diagnostics
    rep.add("rigid.gram_drift", np.array([d["gram_drift"]]), True, DRIFT_FLAG,
            f"per unit length {d['gram_drift_per_length']:.3e}")
    rep.verdict = classify(inv).label
    return rep


def write_trajectory_csv(traj: Trajectory, path) -> None:
    """Node dump on the requested grid: u, v, Y components, Gram drift."""
    U, V = traj.work.mesh()
    U, V = traj.crop(U), traj.crop(V)
    Y = traj.crop(traj.Y).astype(float)
    drift = traj.crop(traj.diagnostics["gram_field"])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["u", "v"] + [f"Y{k}" for k in range(Y.shape[-1])] + ["gram_drift"])
        for i in range(U.shape[0]):
            for j in range(U.shape[1]):
                w.writerow([f"{x:.12g}" for x in (U[i, j], V[i, j], *Y[i, j], drift[i, j])])
