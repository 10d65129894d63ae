"""Acceptance criteria 1-12, one pass/fail line each.

The lines are printed as each test runs (visible with -s) and repeated in the
terminal summary by conftest.py.  Run as a script for the lines alone:
``python3 tests/test_acceptance.py``.
"""
from functools import lru_cache

import numpy as np
import pytest

from moebius_surfaces.diffgrid import Grid
from moebius_surfaces.exprsurf import builtin
from moebius_surfaces.exprsurf.catalog import CLIFFORD_PERIOD
from moebius_surfaces.invariants import compute_invariants, euclidean_shape, willmore_of
from moebius_surfaces.isoparam import (
    RatPoly, TrigRational, build_FG, eisenhart_identity, identity_numeric_check,
    obstruction_verdict, reduce_obstruction,
)
from moebius_surfaces.minkowski import random_lorentz
from moebius_surfaces.rigid import (
    clifford_trajectory, closed_form_error, reconstructed_invariants, veronese_trajectory,
)
from moebius_surfaces.verify import (
    FAMILY_TS, associated_family_check, classify, run_suites, structure_residuals,
    verdict_notes, willmore_residual,
)

RESULTS: dict[int, str] = {}


def record(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[n] = line
    print(line)
    assert ok, line


@lru_cache(maxsize=None)
def inv_of(name):
    return compute_invariants(builtin(name))


def sup(field, inv):
    return float(np.max(np.abs(np.asarray(field[inv.interior]))))


def test_criterion_01_clifford():
    c = inv_of("clifford")
    assert (c.domain.nu, c.domain.nv) == (64, 64)
    k, p = sup(c.K, c), sup(c.P + 2, c)
    w = willmore_residual(c).checks["willmore"].max
    rep = run_suites(c, ["structure", "integrability", "swillmore", "lemmaP", "auxmetric"])
    ok = k < 1e-6 and p < 1e-6 and w < 1e-6 and rep.passed and {"P1", "P3", "P4"} <= set(rep.checks)
    record(1, ok, f"clifford |K|={k:.2e} |P+2|={p:.2e} willmore={w:.2e} "
                  f"suites {'pass' if rep.passed else 'fail: ' + ','.join(rep.failing())}")


def test_criterion_02_minimal_surfaces():
    parts, ok = [], True
    for name in ("catenoid", "enneper", "helicoid"):
        c = inv_of(name)
        k, p = sup(c.K - 1, c), sup(c.P, c)
        ok &= k < 1e-4 and p < 1e-5
        parts.append(f"{name} |K-1|={k:.1e} |P|={p:.1e}")
    c = inv_of("catenoid")
    W = willmore_of(c)
    W_closed = 4 * np.pi * np.tanh(1.2)
    W_tilde = euclidean_shape(builtin("catenoid")).W_tilde
    e1, e2 = abs(W / W_closed - 1), abs(W - W_tilde) / W_tilde
    ok &= e1 < 5e-3 and e2 < 5e-3
    record(2, ok, "; ".join(parts) + f"; W rel err {e1:.1e}, |W-W~|/W~ {e2:.1e}")


def test_criterion_03_complex_curve():
    c = inv_of("complex_parabola")
    iso, k, p = sup(c.kappa_sq, c), sup(c.K - 2, c), sup(c.P, c)
    record(3, iso < 1e-6 and k < 1e-3 and p < 1e-3,
           f"complex_parabola iso={iso:.1e} |K-2|={k:.1e} |P|={p:.1e}")


def test_criterion_04_veronese():
    c = inv_of("veronese")
    iso, k, p = sup(c.kappa_sq, c), sup(c.K - 0.5, c), sup(c.P + 3, c)
    notes = verdict_notes(classify(c))
    ok = iso < 1e-6 and k < 1e-3 and p < 1e-2 and bool(notes)
    record(4, ok, f"veronese |K-1/2|={k:.1e} |P+3|={p:.1e} iso={iso:.1e}; logged: {notes[0] if notes else '-'}")


def test_criterion_05_negative_controls():
    w = willmore_residual(inv_of("cylinder")).checks["willmore"]
    c = inv_of("clifford")
    bad = structure_residuals(c, s=c.s + 0.1)
    ok = (not w.passed) and w.max > 0.05 and not bad.passed
    record(5, ok, f"cylinder willmore={w.max:.3f} (fails), corrupted s fails {','.join(bad.failing())}")


def test_criterion_06_moebius_invariance():
    # the FD catenoid runs on its grid refined 2x: boosts distort the sampling and the
    # default 64x96 grid leaves up to 4.7e-6 of 6th-order truncation (62x less at 2x)
    worst = {}
    for name, factor in (("clifford", 1), ("catenoid", 2)):
        spec = builtin(name)
        g = spec.grid.refined(factor) if factor > 1 else spec.grid
        base = compute_invariants(spec, g)
        dk = dp = 0.0
        for seed in range(20):
            t = compute_invariants(spec.transformed(random_lorentz(seed, spec.n)), g)
            dk = max(dk, sup(t.K - base.K, base))
            dp = max(dp, sup(t.P - base.P, base))
        worst[name] = (dk, dp)
    ok = all(max(v) < 1e-6 for v in worst.values())
    record(6, ok, "; ".join(f"{n} max dK={a:.1e} dP={b:.1e}" for n, (a, b) in worst.items())
           + " over 20 seeds (catenoid grid 2x)")


def test_criterion_07_associated_family():
    worst, bitwise = 0.0, True
    for name in ("clifford", "catenoid"):
        c = inv_of(name)
        for t in FAMILY_TS:
            rep = associated_family_check(c, t)
            worst = max([worst] + [ch.max for k, ch in rep.checks.items() if "family_shift" in k])
            bitwise &= all(ch.note == "bit-identical" for k, ch in rep.checks.items() if "bitwise" in k)
    record(7, worst < 1e-9 and bitwise,
           f"max shift vs t=0 {worst:.1e}, P bit-stable {bitwise} (clifford, catenoid; t=pi/6,pi/3,pi)")


def test_criterion_08_s3_obstruction():
    ob = reduce_obstruction("s3")
    K = RatPoly.K()
    c0, c1 = 4 * (27 * K - 8) * (K - 1), -4 * (3 * K - 1) * (3 * K - 8)
    r = ob.raw[0].lead() / c0.lead()
    exact = len(ob.raw) == 2 and r != 0 and ob.raw[0] == c0 * r and ob.raw[1] == c1 * r
    v = obstruction_verdict(ob.coeffs)
    roots = [sorted(float(x) for x in rs) for rs in v.root_sets]
    ok = exact and roots == [[8 / 27, 1.0], [1 / 3, 8 / 3]] and v.holds
    record(8, ok, f"{ob.polynomial_str()}; roots {[[str(x) for x in rs] for rs in v.root_sets]}; {v.message}")


def test_criterion_09_s4_obstruction():
    ob = reduce_obstruction("s4")
    v = obstruction_verdict(ob.coeffs)
    F, G = build_FG("s4")
    E = eisenhart_identity(F, G)
    rng = np.random.default_rng(2024)
    worst = 0.0
    for k, psi in zip(rng.uniform(-3, 3, 20), rng.uniform(-1.3, 1.3, 20)):
        # numeric sampling of the Eisenhart expression with hand-written derivatives
        c, s = np.cos(psi), np.sin(psi)
        Fn = 4 * k * c * c - 2 * (k - 2) * s * s
        F1, F2 = -(12 * k - 8) * s * c, -(12 * k - 8) * (c * c - s * s)
        Gn, G1 = 2 * (k - 2) * s / c, 2 * (k - 2) / (c * c)
        direct = 2 * k * Fn + (2 * Gn - F1) * (Gn - F1) + Fn * (2 * G1 - F2)
        worst = max(worst, abs(ob.evaluate(k, psi) - direct * c ** ob.cos_power),
                    abs(E.evaluate(k, psi) - direct))
    record(9, v.holds and worst < 1e-10,
           f"{ob.polynomial_str()}; common roots none; 20-sample agreement {worst:.1e}")


def test_criterion_10_eisenhart():
    plane = eisenhart_identity(1, 0, K=0).is_zero()
    sphere = eisenhart_identity(1, TrigRational.cot(), K=1).is_zero()
    coth = lambda t: np.cosh(t) / np.sinh(t)  # noqa: E731
    hyp = identity_numeric_check(lambda t: 1.0, coth, -1.0, np.linspace(0.2, 3.0, 15),
                                 dF=lambda t: 0.0, d2F=lambda t: 0.0, dG=lambda t: -1 / np.sinh(t) ** 2)
    record(10, plane and sphere and hyp < 1e-12,
           f"(1,0,0) exact zero {plane}, (1,cot,1) exact zero {sphere}, (1,coth,-1) residual {hyp:.1e}")


@lru_cache(maxsize=None)
def veronese_traj():
    return veronese_trajectory()


def test_criterion_11_rigid():
    t = clifford_trajectory(h=1e-3)
    err, drift = closed_form_error(t), t.diagnostics["gram_drift"]
    rep = reconstructed_invariants(veronese_traj())
    k, p = rep.checks["recon.K"].max, rep.checks["recon.P"].max
    ok = err < 1e-6 and drift < 1e-8 and k < 1e-3 and p < 1e-2 and rep.verdict == "VeroneseClass"
    record(11, ok, f"clifford |Y-Y_cf|={err:.1e} drift={drift:.1e}; veronese |K-1/2|={k:.1e} |P+3|={p:.1e}")


def test_criterion_12_convergence():
    spec = builtin("catenoid")
    g0 = spec.grid
    coarse = Grid(g0.u_range, g0.v_range, 24, 24, g0.periodic_u, g0.periodic_v)
    errs = []
    for g in (coarse, coarse.refined(2)):
        c = compute_invariants(spec, g)
        errs.append(sup(c.K - 1, c))
    L = CLIFFORD_PERIOD
    g = Grid((0.0, L), (0.0, L), 16, 16, True, True)
    rk = [closed_form_error(clifford_trajectory(g, h=L / 16 / m)) for m in (2, 4)]
    r1, r2 = errs[0] / errs[1], rk[0] / rk[1]
    record(12, r1 >= 16 and 12 < r2 < 20,
           f"catenoid K error {errs[0]:.1e} -> {errs[1]:.1e} (x{r1:.0f}); RK4 halving x{r2:.1f}")


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q", "-s", "-p", "no:cacheprovider"]))
