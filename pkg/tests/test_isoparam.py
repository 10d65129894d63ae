from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from moebius_surfaces.isoparam import (
    AlgebraicRoot, RatPoly, TrigPoly, TrigRational, build_FG, eisenhart_identity,
    identity_numeric_check, obstruction_verdict, poly_gcd, reduce_obstruction,
)

# -- strategies: random exact TrigPolys ------------------------------------------

small = st.integers(-5, 5)
ratpolys = st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=4),
                    max_size=3).map(RatPoly)
trigpolys = st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 2)), ratpolys,
                            max_size=4).map(TrigPoly.from_terms)


@settings(max_examples=60, deadline=None)
@given(trigpolys, trigpolys, trigpolys)
def test_ring_axioms(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert a + (-a) == TrigPoly()


@settings(max_examples=60, deadline=None)
@given(trigpolys, trigpolys)
def test_leibniz(a, b):
    assert (a * b).diff() == a.diff() * b + a * b.diff()


@settings(max_examples=40, deadline=None)
@given(st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)), small, max_size=4),
       st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)), small, max_size=4))
def test_reduction_is_confluent(ta, tb):
    # building from unreduced terms then multiplying equals reducing the product of terms
    prod = {}
    for (j1, k1), x in ta.items():
        for (j2, k2), y in tb.items():
            key = (j1 + j2, k1 + k2)
            prod[key] = prod.get(key, 0) + x * y
    assert TrigPoly.from_terms(ta) * TrigPoly.from_terms(tb) == TrigPoly.from_terms(prod)


@settings(max_examples=40, deadline=None)
@given(trigpolys, st.floats(-2, 2), st.floats(0.1, 1.4))
def test_trigpoly_matches_floats(a, k, psi):
    # derivative agrees with a central difference of the numeric evaluation
    h = 1e-6
    fd = (a.evaluate(k, psi + h) - a.evaluate(k, psi - h)) / (2 * h)
    assert a.diff().evaluate(k, psi) == pytest.approx(fd, abs=1e-6)


def test_sin_squared_reduces():
    c, s = TrigPoly.cos(), TrigPoly.sin()
    assert s * s == 1 - c * c
    assert s.diff() == c and c.diff() == -s


def test_trigrational_equality_by_cross_multiplication():
    t = TrigRational.tan()
    assert t * TrigRational.cot() == TrigRational(1)
    assert TrigRational(TrigPoly.sin() * 2, TrigPoly.cos() * 2) == t
    # tan' = 1 + tan^2
    assert t.diff() == 1 + t * t


# -- RatPoly ---------------------------------------------------------------------

def test_ratpoly_roots_rational_and_quadratic():
    p = RatPoly([8, -35, 27])  # (27K - 8)(K - 1)
    assert sorted(float(r) for r in p.roots()) == pytest.approx([8 / 27, 1])
    q = RatPoly([-Fraction(1, 2), -1, 1])  # K^2 - K - 1/2
    rs = q.roots()
    assert sorted(str(r) for r in rs) == ["1/2 + 1/2*sqrt(3)", "1/2 - 1/2*sqrt(3)"]
    for r in rs:
        assert q(float(r)) == pytest.approx(0, abs=1e-12)
    assert RatPoly([1, 0, 1]).roots() == []


def test_poly_gcd():
    a = RatPoly([-1, 1]) * RatPoly([-2, 1])
    b = RatPoly([-1, 1]) * RatPoly([3, 1])
    assert poly_gcd(a, b) == RatPoly([-1, 1])


def test_factored_form():
    assert RatPoly([8, -35, 27]).factored() == "(27K-8)(K-1)"
    assert (RatPoly([8, -35, 27]) * 4).factored() == "4(27K-8)(K-1)"
    assert RatPoly([1, 2, 1]).factored() == "(K+1)^2"


# -- F and G -----------------------------------------------------------------------

def test_build_FG_examples():
    F, G = build_FG("s3")
    assert F.subs_K(0).evaluate(0, 0.0) == 0
    # at psi = pi/2: F = -2(K - 1)
    for k in (Fraction(0), Fraction(3, 2), Fraction(5)):
        assert F.subs_K(k).evaluate(k, np.pi / 2) == pytest.approx(float(-2 * (k - 1)))
    F4, G4 = build_FG("s4")
    K = RatPoly.K()
    assert G4.num == TrigPoly.from_terms({(0, 1): 2 * (K - 2)})
    assert G4.den == TrigPoly.cos()
    with pytest.raises(ValueError):
        build_FG("s5")


# -- Eisenhart identity ------------------------------------------------------------

def test_eisenhart_plane():
    assert eisenhart_identity(1, 0, K=0).is_zero()


def test_eisenhart_sphere():
    assert eisenhart_identity(1, TrigRational.cot(), K=1).is_zero()
    assert not eisenhart_identity(1, TrigRational.cot(), K=2).is_zero()


def test_numeric_checker_examples():
    assert identity_numeric_check(lambda t: 1.0, lambda t: 0.0, 0.0, [0.2, 0.9],
                                  dF=lambda t: 0.0, d2F=lambda t: 0.0, dG=lambda t: 0.0) == 0
    cot = lambda t: np.cos(t) / np.sin(t)  # noqa: E731
    r = identity_numeric_check(lambda t: 1.0, cot, 1.0, [0.3, 0.7, 1.2],
                               dF=lambda t: 0.0, d2F=lambda t: 0.0, dG=lambda t: -1 / np.sin(t) ** 2)
    assert r < 1e-12
    coth = lambda t: np.cosh(t) / np.sinh(t)  # noqa: E731
    r = identity_numeric_check(lambda t: 1.0, coth, -1.0, [0.3, 0.7, 1.2, 2.0],
                               dF=lambda t: 0.0, d2F=lambda t: 0.0, dG=lambda t: -1 / np.sinh(t) ** 2)
    assert r < 1e-12


def test_numeric_checker_finite_differences():
    r = identity_numeric_check(lambda t: 1.0, lambda t: np.cos(t) / np.sin(t), 1.0, [0.5, 1.0])
    assert r < 1e-5


def test_numeric_checker_skips_nonpositive_F():
    F = lambda t: np.cos(t)  # noqa: E731
    with pytest.warns(UserWarning, match="skipped"):
        identity_numeric_check(F, lambda t: 0.0, 0.0, [0.2, 2.0])
    with pytest.raises(ValueError):
        with pytest.warns(UserWarning):
            identity_numeric_check(F, lambda t: 0.0, 0.0, [2.0, 3.0])


def test_symbolic_matches_numeric_checker():
    rng = np.random.default_rng(5)
    for space in ("s3", "s4"):
        F, G = build_FG(space)
        E = eisenhart_identity(F, G)
        done = 0
        while done < 50:
            k, psi = rng.uniform(-3, 3), rng.uniform(-1.4, 1.4)
            if F.evaluate(k, psi) <= 0:
                continue
            num = identity_numeric_check(F, G, k, [psi])
            assert abs(E.evaluate(k, psi)) == pytest.approx(num, abs=1e-10)
            done += 1


# -- obstruction -----------------------------------------------------------------------

def test_s3_obstruction_exact():
    ob = reduce_obstruction("s3")
    K = RatPoly.K()
    c0 = 4 * (27 * K - 8) * (K - 1)
    c1 = -4 * (3 * K - 1) * (3 * K - 8)
    assert len(ob.raw) == 2 and not ob.odd_terms
    # exactly a nonzero rational multiple of the displayed polynomial
    ratio = ob.raw[0].lead() / c0.lead()
    assert ratio != 0
    assert ob.raw[0] == c0 * ratio and ob.raw[1] == c1 * ratio
    assert ob.polynomial_str() == "4(27K-8)(K-1) - 4(3K-1)(3K-8)*cos^2(psi)"
    assert ob.content == 4
    assert ob.raw[0](1) == 0 and ob.raw[1](1) == 40


def test_s3_verdict():
    v = obstruction_verdict(reduce_obstruction("s3").coeffs)
    assert [sorted(str(r) for r in rs) for rs in v.root_sets] == [["1", "8/27"], ["1/3", "8/3"]]
    assert v.intersection == () and v.holds
    assert v.message == "no admissible constant K"


def test_sanity_control_verdict():
    v = obstruction_verdict([RatPoly([-2, 1]), RatPoly([-2, 1])])
    assert not v.holds
    assert [str(r) for r in v.intersection] == ["2"]
    assert v.message == "admissible K exist: 2"
    assert not obstruction_verdict([RatPoly(), RatPoly()]).holds


def _sympy_reduction(m, cos_power):
    """Second route: sympy derivation of E * cos^p reduced modulo s^2 + c^2 - 1."""
    K, x, c, s = sp.symbols("K psi c s")
    F = 4 * (K * sp.cos(x) ** 2 - (K - m) / 2 * sp.sin(x) ** 2)
    G = 2 * (K - m) * sp.sin(x) / sp.cos(x)
    E = 2 * K * F + (2 * G - F.diff(x)) * (G - F.diff(x)) + F * (2 * G.diff(x) - F.diff(x, 2))
    num, den = sp.fraction(sp.together((E * sp.cos(x) ** cos_power).subs({sp.sin(x): s, sp.cos(x): c})))
    out = sp.cancel(sp.rem(sp.expand(num), s ** 2 + c ** 2 - 1, s) / den)
    assert s not in out.free_symbols and sp.fraction(out)[1].is_number
    return out, K, c


@pytest.mark.parametrize("space, m", [("s3", 1), ("s4", 2)])
def test_obstruction_matches_sympy(space, m):
    ob = reduce_obstruction(space)
    reduced, K, c = _sympy_reduction(m, ob.cos_power)
    ours = sum(sum(sp.Rational(q.numerator, q.denominator) * K ** i for i, q in enumerate(p.coeffs))
               * c ** (2 * j) for j, p in enumerate(ob.raw))
    assert sp.expand(reduced - ours) == 0


def test_s4_obstruction_reference_output():
    ob = reduce_obstruction("s4")
    assert ob.polynomial_str() == "4(27K-16)(K-2) - 4(3K-2)(3K-16)*cos^2(psi)"
    v = obstruction_verdict(ob.coeffs)
    assert [sorted(str(r) for r in rs) for rs in v.root_sets] == [["16/27", "2"], ["16/3", "2/3"]]
    assert v.holds


def _eisenhart_by_hand(k, psi, m):
    c, s = np.cos(psi), np.sin(psi)
    F = 4 * k * c * c - 2 * (k - m) * s * s
    F1 = -(12 * k - 4 * m) * s * c
    F2 = -(12 * k - 4 * m) * (c * c - s * s)
    G = 2 * (k - m) * s / c
    G1 = 2 * (k - m) / (c * c)
    return 2 * k * F + (2 * G - F1) * (G - F1) + F * (2 * G1 - F2)


@pytest.mark.parametrize("space, m, n", [("s3", 1, 20), ("s4", 2, 20), ("s4", 2, 50)])
def test_obstruction_matches_sampling(space, m, n):
    rng = np.random.default_rng(11 + n)
    ob = reduce_obstruction(space)
    for k, psi in zip(rng.uniform(-3, 3, n), rng.uniform(-1.3, 1.3, n)):
        direct = _eisenhart_by_hand(k, psi, m) * np.cos(psi) ** ob.cos_power
        assert ob.evaluate(k, psi) == pytest.approx(direct, abs=1e-10)


@pytest.mark.parametrize("space", ["s3", "s4"])
def test_normalization_is_unique(space):
    base = reduce_obstruction(space)
    for extra in (1, 2, 5):
        ob = reduce_obstruction(space, extra_cos_power=extra)
        assert ob.coeffs == base.coeffs and ob.raw == base.raw
    assert base.coeffs[0].lead() > 0


def test_obstruction_serialises():
    d = reduce_obstruction("s4").to_dict()
    assert d["normalized"][0] == ["32", "-70", "27"]
    assert isinstance(AlgebraicRoot(Fraction(1)).rational, bool)
