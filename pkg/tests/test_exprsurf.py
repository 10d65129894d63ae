import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from moebius_surfaces.exprsurf import (
    ExprDomainError, ExprSyntaxError, builtin, builtin_names, catalog, evaluate,
    evaluate_expr, format_surface, inverse_stereographic, parse_expr, parse_surface, sample,
    to_text, validate,
)
from moebius_surfaces.exprsurf.catalog import veronese_from_s2
from moebius_surfaces.exprsurf.expr import variables
from moebius_surfaces.minkowski import lorentz_dot

CATENOID_DOC = """\
target=R3
x=cosh(v)*cos(u) y=cosh(v)*sin(u) z=v
[grid]
u0=0 u1=2*pi nu=64 periodic_u=true
v0=-1 v1=1 nv=48
"""


def test_parse_and_evaluate():
    e = parse_expr("2*sin(u)^2 + cosh(v) - pi/2")
    assert variables(e) == {"u", "v"}
    val = evaluate_expr(e, np.array([0.3]), np.array([0.2]))
    assert val[0] == pytest.approx(2 * np.sin(0.3) ** 2 + np.cosh(0.2) - np.pi / 2)


def test_precedence_and_unary_minus():
    assert evaluate_expr(parse_expr("-2^2"), 0.0, 0.0) == -4
    assert evaluate_expr(parse_expr("2^3^2"), 0.0, 0.0) == 512
    assert evaluate_expr(parse_expr("1-2-3"), 0.0, 0.0) == -4


def test_unknown_variable_position():
    with pytest.raises(ExprSyntaxError) as exc:
        parse_surface("target=R3\nx=cos(w) y=v z=u")
    assert "unknown variable w" in str(exc.value)
    assert (exc.value.line, exc.value.column) == (2, 7)


def test_syntax_error_has_position():
    with pytest.raises(ExprSyntaxError) as exc:
        parse_expr("sin(u")
    assert exc.value.column >= 1


def test_domain_error_location():
    with pytest.raises(ExprDomainError, match=r"\(u, v\) = \(-1, 0\)"):
        evaluate_expr(parse_expr("log(u)"), np.array([1.0, -1.0]), np.array([0.0, 0.0]))


def test_roundtrip_text():
    e = parse_expr("sqrt(u^2+1)*exp(-v)/3")
    assert parse_expr(to_text(e)) == e


def test_builtin_document():
    spec = parse_surface("target=S3 builtin=clifford")
    assert spec.builtin == "clifford" and spec.target == "S3"


def test_catenoid_document_is_valid():
    spec = parse_surface(CATENOID_DOC)
    validate(spec)
    assert spec.grid.periodic_u and spec.grid.nv == 48


def test_component_count_mismatch():
    with pytest.raises(Exception, match="component"):
        parse_surface("target=R3\nx=u y=v")


def test_non_unit_sphere_image():
    with pytest.raises(Exception, match="unit"):
        parse_surface("target=S3\nc1=u c2=v c3=0 c4=1")


@pytest.mark.parametrize("name", builtin_names())
def test_document_roundtrip(name):
    spec = builtin(name)
    doc = format_surface(spec)
    again = parse_surface(doc)
    assert again == spec
    assert format_surface(again) == doc


def test_roundtrip_of_expression_surface():
    spec = parse_surface(CATENOID_DOC)
    assert parse_surface(format_surface(spec)) == spec


def test_stereographic_examples():
    np.testing.assert_allclose(inverse_stereographic(np.zeros(3)), [0, 0, 0, -1])
    x = np.array([0.6, 0.8, 0.0])
    np.testing.assert_allclose(inverse_stereographic(x), [0.6, 0.8, 0.0, 0.0])


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-50, 50), min_size=3, max_size=3))
def test_stereographic_unit_norm(x):
    assert np.linalg.norm(inverse_stereographic(np.array(x))) == pytest.approx(1.0, abs=1e-12)


def test_stereographic_preserves_conformality():
    # complex-step directional derivatives of the rational map are exact to rounding
    rng = np.random.default_rng(11)
    h = 1e-30
    for _ in range(20):
        x = rng.normal(size=3)
        a = rng.normal(size=3)
        b = np.cross(a, rng.normal(size=3))
        b *= np.linalg.norm(a) / np.linalg.norm(b)
        fz = (inverse_stereographic(x + 1j * h * a).imag
              - 1j * inverse_stereographic(x + 1j * h * b).imag) / (2 * h)
        assert abs(np.sum(fz * fz)) < 1e-9 * np.sum(np.abs(fz) ** 2)


def test_clifford_point():
    np.testing.assert_allclose(evaluate(builtin("clifford"), 0.0, 0.0),
                               np.array([1, 0, 1, 0]) / np.sqrt(2), atol=1e-15)


def test_clifford_matches_standard_form():
    a = 2 * np.sqrt(2)
    u, v = 0.37, 1.02
    ref = np.array([np.cos(a * u), np.sin(a * u), np.cos(a * v), np.sin(a * v)]) / np.sqrt(2)
    np.testing.assert_allclose(evaluate(builtin("clifford"), u, v), ref, atol=1e-14)


def test_veronese_lands_on_unit_sphere():
    rng = np.random.default_rng(3)
    p = rng.normal(size=(20, 3))
    p /= np.linalg.norm(p, axis=1, keepdims=True)
    w = veronese_from_s2(p[:, 0], p[:, 1], p[:, 2])
    np.testing.assert_allclose(np.linalg.norm(w, axis=1), 1.0, atol=1e-12)


@pytest.mark.parametrize("spec", catalog(), ids=lambda s: s.name)
def test_catalog_valid(spec):
    validate(spec)


def test_unknown_builtin():
    with pytest.raises(Exception, match="unknown surface"):
        builtin("torus-of-doom")


def test_transformed_spec_stays_on_sphere():
    from moebius_surfaces.minkowski import lift_to_cone, random_lorentz
    spec = builtin("clifford").transformed(random_lorentz(7, 3))
    Y = lift_to_cone(sample(spec))
    assert np.max(np.abs(lorentz_dot(Y, Y))) < 1e-12
