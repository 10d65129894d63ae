import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from moebius_surfaces.minkowski import (
    LorentzTransform, boost, eta, hermitian_norm2, is_null, lift_to_cone, lorentz_dot,
    project_to_sphere, random_lorentz, rotation,
)

R2 = np.sqrt(2.0)
Y00 = np.array([R2, 1.0, 0.0, 1.0, 0.0]) / (2 * R2)  # explicit Clifford lift at the origin


def test_basis_products():
    e = np.eye(5)
    assert lorentz_dot(e[0], e[0]) == -1
    assert lorentz_dot(e[1], e[1]) == 1
    assert lorentz_dot(e[0], e[1]) == 0


def test_clifford_origin_is_null():
    assert abs(lorentz_dot(Y00, Y00)) < 1e-16
    assert is_null(Y00)


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        lorentz_dot(np.ones(4), np.ones(5))


def test_bilinear_not_hermitian():
    k = np.array([0, 1, 1j, 0, 0])
    assert lorentz_dot(k, k) == 0          # isotropic under the bilinear form
    assert hermitian_norm2(k) == pytest.approx(2.0)


def test_project_to_sphere_examples():
    x = np.array([0.6, 0.0, 0.8])
    np.testing.assert_allclose(project_to_sphere(np.r_[1.0, x]), x)
    np.testing.assert_allclose(project_to_sphere(np.r_[2.0, 2 * x]), x)
    np.testing.assert_allclose(project_to_sphere(Y00), np.array([1, 0, 1, 0]) / R2, atol=1e-15)


def test_project_errors():
    with pytest.raises(ValueError, match="light cone"):
        project_to_sphere(np.array([1.0, 2.0, 0.0]))
    with pytest.raises(ValueError, match="point at infinity"):
        project_to_sphere(np.array([0.0, 0.0, 0.0]))


def test_lift_roundtrip():
    x = np.array([0.0, 0.6, 0.8])
    np.testing.assert_allclose(project_to_sphere(lift_to_cone(x)), x)


def test_identity_transform():
    M = LorentzTransform.identity(5)
    assert M.form_defect() == 0


def test_transform_validation():
    with pytest.raises(ValueError):
        LorentzTransform(2 * np.eye(4))
    with pytest.raises(ValueError):
        LorentzTransform(-np.eye(4))  # preserves the form but reverses time


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), n=st.sampled_from([3, 4]))
def test_random_lorentz_preserves_form(seed, n):
    M = random_lorentz(seed, n)
    d = n + 2
    assert np.max(np.abs(M.matrix.T @ eta(d) @ M.matrix - eta(d))) < 1e-12
    assert M.matrix[0, 0] > 0
    rng = np.random.default_rng(seed)
    x = rng.normal(size=d - 1)
    Y = lift_to_cone(x / np.linalg.norm(x))
    MY = M(Y)
    assert abs(lorentz_dot(MY, MY)) < 1e-10
    a, b = rng.normal(size=d), rng.normal(size=d)
    assert lorentz_dot(M(a), M(b)) == pytest.approx(lorentz_dot(a, b), rel=1e-10, abs=1e-10)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(-10, 10), min_size=5, max_size=5),
       st.lists(st.floats(-10, 10), min_size=5, max_size=5))
def test_symmetry(a, b):
    assert lorentz_dot(np.array(a), np.array(b)) == lorentz_dot(np.array(b), np.array(a))


@settings(max_examples=25, deadline=None)
@given(st.floats(0.01, 100.0))
def test_projection_scale_invariant(lam):
    x = np.array([0.0, 0.6, 0.8])
    np.testing.assert_allclose(project_to_sphere(lam * lift_to_cone(x)), x, atol=1e-14)


def test_rotation_and_boost_are_lorentz():
    LorentzTransform(rotation(5, 1, 3, 0.7) @ boost(5, 2, 0.9))
