"""Residual suites for the structure, integrability and Willmore equations,
the P-identities, the auxiliary flat metric, and the (K, P) classifier."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .diffgrid import Grid, d_z, d_zbar, laplacian_conformal
from .invariants import (
    InvariantField, dual_surface, normal_basis, normal_connection, tangential_part,
)
from .minkowski import hermitian_norm2, lorentz_dot as dot

SPECTRAL_TOL = 1e-6
FD_TOL = 1e-4
ISOTROPY_TOL = 1e-6
FAMILY_TOL = 1e-9

LABELS = {
    "mov-eq.1": "Eq (mov-eq) line 1",
    "mov-eq.2": "Eq (mov-eq) line 2",
    "mov-eq.3": "Eq (mov-eq) line 3",
    "mov-eq.4": "Eq (mov-eq) line 4",
    "gauss": "Eq (gauss)",
    "codazzi": "Eq (codazzi)",
    "ricci": "Eq (ricci)",
    "willmore": "Eq (willmore)",
    "swillmore.defect": "Eq (swillmore)",
    "swillmore.willmore2": "Eq (willmore2)",
    "swillmore.rho": "rho_zbar = mubar rho",
    "swillmore.theta": "Theta holomorphic",
    "dual.null": "Eq (yhat)",
    "dual.yhat_z": "Eq (yhat-z)",
    "dual.conformal": "Eq (yhat-metric)",
    "dual.metric": "Eq (yhat-metric)",
    "P1": "Eq (P1)", "P3": "Eq (P3)", "P4": "Eq (P4)",
    "P5": "Eq (P5)", "P6": "Eq (P6)", "P7": "Eq (P7)",
    "isotropy": "isotropy <kappa,kappa> = 0",
    "auxmetric": "Eq (metric): flat auxiliary metric",
}


def default_tolerance(g: Grid) -> float:
    return SPECTRAL_TOL if (g.periodic_u and g.periodic_v) else FD_TOL


@dataclass
class Check:
    name: str
    max: float
    rms: float
    node_count: int
    tol: float
    passed: bool
    note: str = ""

    @property
    def label(self) -> str:
        base = self.name.split("@")[0]
        return LABELS.get(base, LABELS.get(base.split(":")[0], base))

    def to_dict(self) -> dict:
        return {"name": self.name, "max": self.max, "rms": self.rms,
                "tol": self.tol, "pass": self.passed}


@dataclass
class ResidualReport:
    surface: str
    grid: dict
    checks: dict[str, Check] = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    verdict: Optional[str] = None
    notes: list[str] = field(default_factory=list)

    def add(self, name: str, residual, select, tol: float, note: str = "") -> Check:
        r = np.abs(np.asarray(residual)).astype(float)
        sel = np.broadcast_to(select, r.shape) & np.isfinite(r)
        vals = r[sel]
        if vals.size == 0:
            chk = Check(name, 0.0, 0.0, 0, tol, True, note or "vacuous")
        else:
            mx = float(np.max(vals))
            rms = float(np.sqrt(np.mean(vals ** 2)))
            chk = Check(name, mx, min(rms, mx), int(vals.size), tol, mx <= tol, note)
        self.checks[name] = chk
        return chk

    def add_trivial(self, name: str, tol: float, note: str) -> Check:
        chk = Check(name, 0.0, 0.0, 0, tol, True, note)
        self.checks[name] = chk
        return chk

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks.values())

    def failing(self) -> list[str]:
        return sorted(n for n, c in self.checks.items() if not c.passed)

    def merge(self, other: "ResidualReport") -> "ResidualReport":
        self.checks.update(other.checks)
        self.notes.extend(n for n in other.notes if n not in self.notes)
        return self

    def sorted_checks(self) -> list[Check]:
        return [self.checks[k] for k in sorted(self.checks)]

    @property
    def config_hash(self) -> str:
        blob = json.dumps({"surface": self.surface, "grid": self.grid, "config": self.config},
                          sort_keys=True, default=str)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def new_report(inv: InvariantField, **config) -> ResidualReport:
    return ResidualReport(surface=inv.name, grid=inv.domain.to_dict(), config=config)


def _vnorm(w) -> np.ndarray:
    """Euclidean norm of the component vector."""
    return np.sqrt(np.sum(np.abs(w) ** 2, axis=-1))


def _nnorm(w) -> np.ndarray:
    """Hermitian Minkowski norm, for sections of the (spacelike) normal bundle."""
    return np.sqrt(np.abs(hermitian_norm2(w)))


def _cc(x):
    return x[..., None]


# -- structure equations ------------------------------------------------------

def structure_residuals(inv: InvariantField, s=None, tol: Optional[float] = None) -> ResidualReport:
    tol = default_tolerance(inv.domain) if tol is None else tol
    fr, g, sel = inv.frame, inv.grid, inv.interior
    s = inv.s if s is None else s
    kappa, kk = inv.kappa, inv.kk
    rep = new_report(inv, suite="structure", tol=tol)
    rep.add("mov-eq.1", _vnorm(fr.Yzz + 0.5 * _cc(s) * fr.Y - kappa), sel, tol)
    rep.add("mov-eq.2", _vnorm(fr.Yzzb + _cc(kk) * fr.Y - 0.5 * fr.N), sel, tol)
    Nz = d_z(fr.N, g)
    rep.add("mov-eq.3", _vnorm(Nz + 2 * _cc(kk) * fr.Yz + _cc(s) * fr.Yzb - 2 * inv.Dzb_kappa), sel, tol)
    worst = np.zeros(g.shape)
    for xi in normal_basis(fr, inv.mask):
        xz = d_z(xi, g)
        res = (tangential_part(xz, fr) - 2 * _cc(dot(xi, inv.Dzb_kappa)) * fr.Y
               + 2 * _cc(dot(xi, kappa)) * fr.Yzb)
        worst = np.maximum(worst, _vnorm(res))
    rep.add("mov-eq.4", worst, sel, tol)
    return rep


# -- integrability -------------------------------------------------------------

@dataclass
class _Hopf:
    """Hopf field with its normal derivatives, possibly rotated by a phase."""
    kappa: np.ndarray
    Dz: np.ndarray
    Dzb: np.ndarray
    DzbDzb: np.ndarray


def _hopf_data(inv: InvariantField, kappa=None) -> _Hopf:
    if kappa is None:
        kappa, Dz, Dzb = inv.kappa, inv.Dz_kappa, inv.Dzb_kappa
    else:
        Dz, Dzb = normal_connection(kappa, inv.frame, inv.mask, check=False)
    _, DzbDzb = normal_connection(Dzb, inv.frame, inv.mask, check=False)
    return _Hopf(kappa, Dz, Dzb, DzbDzb)


def _gauss_field(inv, h: _Hopf):
    lhs = 0.5 * d_zbar(inv.s, inv.grid)
    rhs = 3 * dot(np.conj(h.Dzb), h.kappa) + dot(np.conj(h.kappa), h.Dz)
    return np.abs(lhs - rhs)


def _codazzi_field(inv, h: _Hopf):
    w = np.imag(h.DzbDzb + 0.5 * _cc(np.conj(inv.s)) * h.kappa)
    return _nnorm(w)


def _willmore_field(inv, h: _Hopf):
    w = h.DzbDzb + 0.5 * _cc(np.conj(inv.s)) * h.kappa
    return _nnorm(w) / np.sqrt(inv.kk)


def _ricci_field(inv, h: _Hopf):
    fr, g = inv.frame, inv.grid
    worst = np.zeros(g.shape)
    for xi in normal_basis(fr, inv.mask):
        Dz_xi, Dzb_xi = normal_connection(xi, fr, check=False)
        _, Dzb_Dz = normal_connection(Dz_xi, fr, check=False)
        Dz_Dzb, _ = normal_connection(Dzb_xi, fr, check=False)
        curv = Dzb_Dz - Dz_Dzb
        rhs = (2 * _cc(dot(xi, h.kappa)) * np.conj(h.kappa)
               - 2 * _cc(dot(xi, np.conj(h.kappa))) * h.kappa)
        worst = np.maximum(worst, _nnorm(curv - rhs))
    return worst


def willmore_field(inv: InvariantField) -> np.ndarray:
    """Per-node |D_zbar D_zbar kappa + s-bar kappa / 2| / |kappa| on the working grid."""
    return _willmore_field(inv, _hopf_data(inv))


def integrability_residuals(inv: InvariantField, tol: Optional[float] = None,
                            kappa=None) -> ResidualReport:
    tol = default_tolerance(inv.domain) if tol is None else tol
    h = _hopf_data(inv, kappa)
    rep = new_report(inv, suite="integrability", tol=tol)
    sel = inv.interior
    rep.add("gauss", _gauss_field(inv, h), sel, tol)
    rep.add("codazzi", _codazzi_field(inv, h), sel, tol)
    note = "rank-1 normal bundle: both sides vanish" if inv.n == 3 else ""
    rep.add("ricci", _ricci_field(inv, h), sel, tol, note)
    return rep


def willmore_residual(inv: InvariantField, tol: Optional[float] = None, kappa=None) -> ResidualReport:
    tol = default_tolerance(inv.domain) if tol is None else tol
    rep = new_report(inv, suite="willmore", tol=tol)
    rep.add("willmore", _willmore_field(inv, _hopf_data(inv, kappa)), inv.interior, tol)
    return rep


# -- S-Willmore ---------------------------------------------------------------

def swillmore_checks(inv: InvariantField, tol: Optional[float] = None) -> ResidualReport:
    tol = default_tolerance(inv.domain) if tol is None else tol
    g, sel = inv.grid, inv.interior
    mu, mubar, rho = inv.mu, inv.mubar, inv.rho
    rep = new_report(inv, suite="swillmore", tol=tol)
    defect = rep.add("swillmore.defect", inv.sres_swillmore, sel, tol)
    rep.add("swillmore.willmore2", d_z(mu, g) - 0.5 * mu ** 2 - inv.s, sel, tol)
    rep.add("swillmore.rho", d_zbar(rho, g) - mubar * rho, sel, tol)
    iso = inv.n == 4 and np.max(np.abs(inv.kappa_sq[sel])) < ISOTROPY_TOL
    rep.add("swillmore.theta", d_zbar(inv.Theta, g), sel, tol,
            "isotropic: Theta vanishes identically" if iso else "")
    if defect.passed:
        try:
            _, dual = dual_surface(inv)
        except ValueError:
            dual = None
        if dual is not None:
            rep.add("dual.null", dual["yhat_null"], sel, tol)
            rep.add("dual.yhat_z", dual["yhat_z"], sel, tol)
            rep.add("dual.conformal", dual["yhat_conformal"], sel, tol)
            rep.add("dual.metric", dual["yhat_metric"], sel, tol)
    return rep


# -- P identities ----------------------------------------------------------------

def log_derivatives(P: np.ndarray, g: Grid):
    """Branch-free d_z log|P| and d_z psi from d_z P and d_zbar P."""
    a = d_z(P, g) / P
    b = np.conj(d_zbar(P, g) / P)  # d_z log conj(P)
    return 0.5 * (a + b), (a - b) / 2j


def laplacians_of_log_P(inv: InvariantField):
    """(Delta log|P|, Delta psi) without choosing a branch of arg P."""
    g = inv.grid
    lz, pz = log_derivatives(inv.P, g)
    scale = 4.0 * np.exp(-2.0 * inv.omega)
    lap_log = scale * np.real(d_zbar(lz, g))
    lap_psi = scale * np.real(d_zbar(pz, g))
    return lap_log, lap_psi


def p_is_zero(inv: InvariantField, tol: float) -> bool:
    return float(np.max(np.abs(inv.P[inv.interior]))) < 100 * tol


def is_isotropic(inv: InvariantField) -> bool:
    return inv.n == 4 and float(np.max(np.abs(inv.kappa_sq[inv.interior]))) < ISOTROPY_TOL


def lemmaP_residuals(inv: InvariantField, tol: Optional[float] = None) -> ResidualReport:
    tol = default_tolerance(inv.domain) if tol is None else tol
    sel = inv.interior
    P, K = inv.P, inv.K
    rep = new_report(inv, suite="lemmaP", tol=tol)
    if inv.n == 4:
        iso = rep.add("isotropy", inv.kappa_sq, sel, ISOTROPY_TOL)
        if not iso.passed:
            rep.notes.append("not isotropic: (P5)-(P7) do not apply")
            return rep
        names, first, shift = ("P5", "P6", "P7"), K - (0.5 * P.real + 2.0), 2.0
    else:
        names, first, shift = ("P1", "P3", "P4"), P.real - 2.0 * (K - 1.0), 0.0
    rep.add(names[0], first, sel, tol)
    if p_is_zero(inv, tol):
        note = "P≡0: (P2)-(P4) vacuous" if inv.n == 3 else "P≡0: (P6)-(P7) vacuous"
        rep.notes.append(note)
        rep.add_trivial(names[1], tol, note)
        rep.add_trivial(names[2], tol, note)
        return rep
    lap_log, lap_psi = laplacians_of_log_P(inv)
    nonzero = sel & (np.abs(P) >= 1e-8)
    rep.add(names[1], lap_log - (4.0 * K - shift), nonzero, tol)
    rep.add(names[2], lap_psi - P.imag, nonzero, tol)
    return rep


# -- auxiliary flat metric -----------------------------------------------------

def aux_metric_curvature(P: np.ndarray, omega: np.ndarray, g: Grid) -> np.ndarray:
    """Curvature of sqrt|P| e^{2 omega} |dz|^2."""
    wt = 0.25 * np.log(np.abs(P)) + omega
    return -laplacian_conformal(wt, wt, g)


def aux_flat_metric(inv: InvariantField, tol: Optional[float] = None) -> ResidualReport:
    tol = default_tolerance(inv.domain) if tol is None else tol
    rep = new_report(inv, suite="auxmetric", tol=tol)
    sel = inv.interior
    if inv.n != 3:
        rep.add_trivial("auxmetric", tol, "inapplicable: surface not in S^3")
        return rep
    if p_is_zero(inv, tol) or float(np.min(np.abs(inv.P[sel]))) < 1e-8:
        rep.add_trivial("auxmetric", tol, "inapplicable: P≡0")
        return rep
    rep.add("auxmetric", aux_metric_curvature(inv.P, inv.omega, inv.grid), sel, tol)
    return rep


# -- associated family -----------------------------------------------------------

def _graded_pair(a, wa: int, b, wb: int, t: float):
    """<e^{i wa t} a, e^{i wb t} b>: the phase is applied only if the weights
    do not cancel, so weight-0 pairings are bit-identical to the t=0 ones."""
    p = dot(a, b)
    w = wa + wb
    return p if w == 0 else np.exp(1j * w * t) * p


def associated_family_check(inv: InvariantField, t: float,
                            tol: Optional[float] = None) -> ResidualReport:
    """Compare residuals and P of the member kappa -> e^{it} kappa with t=0."""
    tol = default_tolerance(inv.domain) if tol is None else tol
    rep = new_report(inv, suite="associated", t=t, tol=tol)
    sel = inv.interior
    base = _hopf_data(inv)
    if t == 0:
        rot = base
    else:
        rot = _hopf_data(inv, np.exp(1j * t) * inv.kappa)
    tag = f"@t={t:.6g}"
    w0 = _willmore_field(inv, base)
    rep.add("willmore" + tag, _willmore_field(inv, rot), sel, tol)
    pairs = [("gauss", _gauss_field), ("willmore", _willmore_field), ("ricci", _ricci_field)]
    for name, fn in pairs:
        r0 = w0 if name == "willmore" else fn(inv, base)
        rep.add(f"{name}:family_shift{tag}", fn(inv, rot) - r0, sel, FAMILY_TOL)
    # direct recomputation of mu, rho, P from the rotated fields
    kk_t = np.real(dot(rot.kappa, np.conj(rot.kappa)))
    mubar_t = -2.0 * dot(rot.Dzb, np.conj(rot.kappa)) / kk_t
    P_t = (d_z(mubar_t, inv.grid) - 2.0 * kk_t) / kk_t
    rep.add(f"P:family_shift{tag}", P_t - inv.P, sel, FAMILY_TOL)
    # graded recomputation: every pairing carries matching kappa / conj-kappa weights
    kk_g = np.real(_graded_pair(inv.kappa, 1, np.conj(inv.kappa), -1, t))
    mubar_g = -2.0 * _graded_pair(inv.Dzb_kappa, 1, np.conj(inv.kappa), -1, t) / np.where(inv.mask, kk_g, np.max(kk_g))
    P_g = (d_z(mubar_g, inv.grid) - 2.0 * kk_g) / np.where(inv.mask, kk_g, np.max(kk_g))
    identical = np.array_equal(P_g[sel], inv.P[sel])
    chk = rep.add(f"P:bitwise{tag}", 0.0 if identical else np.inf, np.array(True), 0.0)
    chk.note = "bit-identical" if identical else "bits differ"
    return rep


# -- suites and classifier -------------------------------------------------------

SUITES = ("structure", "integrability", "willmore", "swillmore", "lemmaP",
          "auxmetric", "associated")
FAMILY_TS = (np.pi / 6, np.pi / 3, np.pi)


def run_suite(inv: InvariantField, suite: str, tol: Optional[float] = None) -> ResidualReport:
    if suite == "structure":
        return structure_residuals(inv, tol=tol)
    if suite == "integrability":
        return integrability_residuals(inv, tol=tol)
    if suite == "willmore":
        return willmore_residual(inv, tol=tol)
    if suite == "swillmore":
        return swillmore_checks(inv, tol=tol)
    if suite == "lemmaP":
        return lemmaP_residuals(inv, tol=tol)
    if suite == "auxmetric":
        return aux_flat_metric(inv, tol=tol)
    if suite == "associated":
        rep = new_report(inv, suite="associated")
        for t in FAMILY_TS:
            rep.merge(associated_family_check(inv, t, tol=tol))
        return rep
    raise ValueError(f"unknown suite {suite!r}")


def run_suites(inv: InvariantField, suites: Iterable[str], tol: Optional[float] = None,
               workers: int = 1) -> ResidualReport:
    """Run several suites and merge the reports in name order."""
    suites = sorted(set(suites))
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda s: run_suite(inv, s, tol), suites))
    else:
        parts = [run_suite(inv, s, tol) for s in suites]
    rep = new_report(inv, suites=suites, tol=tol)
    for part in parts:
        rep.merge(part)
    return rep


@dataclass
class Verdict:
    label: str
    fired: list[str]
    K_range: tuple[float, float]
    P_max_dev: Optional[float] = None

    def __str__(self):
        return self.label


CLASSES_S3 = (("MinimalR3", 1.0, 0.0), ("CliffordClass", 0.0, -2.0))
CLASSES_S4 = (("ComplexCurve", 2.0, 0.0), ("VeroneseClass", 0.5, -3.0))


def classify(inv: InvariantField, tol: Optional[float] = None) -> Verdict:
    """Place the surface among the constant-K Willmore models."""
    tol = default_tolerance(inv.domain) if tol is None else tol
    sel = inv.interior
    K, P = inv.K[sel], inv.P[sel]
    krange = (float(np.min(K)), float(np.max(K)))
    fired = []
    iso = is_isotropic(inv)
    if inv.n == 4:
        fired.append(f"isotropy max|<k,k>| {'<' if iso else '>='} {ISOTROPY_TOL:g}")
    w = willmore_residual(inv, tol=tol).checks["willmore"]
    if not w.passed and not iso:
        fired.append(f"willmore residual {w.max:.3e} > {tol:g}")
        return Verdict("NotWillmore", fired, krange)
    fired.append(f"willmore residual {w.max:.3e} <= {tol:g}")
    if krange[1] - krange[0] > 20 * tol:
        fired.append(f"K spread {krange[1] - krange[0]:.3e} > {20 * tol:g}")
        return Verdict("NonConstantK", fired, krange)
    classes = CLASSES_S3 if inv.n == 3 else (CLASSES_S4 if iso else ())
    for label, K0, P0 in classes:
        kdev = float(np.max(np.abs(K - K0)))
        pdev = float(np.max(np.abs(P - P0)))
        if kdev < 10 * tol and pdev < 100 * tol:
            fired.append(f"|K-{K0:g}| = {kdev:.3e} < {10 * tol:g}")
            fired.append(f"|P-({P0:g})| = {pdev:.3e} < {100 * tol:g}")
            return Verdict(label, fired, krange, pdev)
    fired.append("constant K matches no model")
    return Verdict("Indeterminate", fired, krange)


def verdict_notes(v: Verdict) -> list[str]:
    """Remarks attached to reports of a given class."""
    if v.label == "VeroneseClass":
        return ["P resolves to -3: K = Re P/2 + 2 at K = 1/2 forces P = -3; "
                "the value P = -2 quoted in one derivation of this model is inconsistent with it"]
    return []
