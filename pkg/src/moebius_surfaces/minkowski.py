"""Minkowski space R^{n+1,1}, its complexification and the light cone.

Signature is (-, +, ..., +) with index 0 timelike.  The pairing is always
complex *bilinear*; a Hermitian product is spelled out explicitly as
``lorentz_dot(a, np.conj(b))``.
"""
from __future__ import annotations

import numpy as np

NULL_TOL = 1e-9
FORM_TOL = 1e-12


def eta(dim: int) -> np.ndarray:
    """Gram matrix diag(-1, 1, ..., 1) of size ``dim``."""
    g = np.ones(dim)
    g[0] = -1.0
    return np.diag(g)


def lorentz_dot(a, b):
    """Bilinear Minkowski product over the last axis (no conjugation).

    Works on single vectors and on stacked fields of shape ``(..., dim)``.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape[-1] != b.shape[-1]:
        raise ValueError(
            f"dimension mismatch: {a.shape[-1]} vs {b.shape[-1]}")
    return -a[..., 0] * b[..., 0] + np.sum(a[..., 1:] * b[..., 1:], axis=-1)


def lorentz_norm2(a):
    return lorentz_dot(a, a)


def hermitian_norm2(a):
    """<a, conj(a)>; real and >= 0 on spacelike subspaces."""
    return np.real(lorentz_dot(a, np.conj(a)))


def is_null(Y, tol: float = NULL_TOL) -> bool:
    Y = np.asarray(Y)
    scale = np.sum(np.abs(Y) ** 2, axis=-1)
    return bool(np.all(np.abs(lorentz_dot(Y, Y)) <= tol * scale))


def project_to_sphere(Y, tol: float = NULL_TOL) -> np.ndarray:
    """Map a null vector (or stack of them) to the point Y[1:]/Y[0] of S^n."""
    Y = np.asarray(Y)
    if Y.dtype.kind != "f":
        Y = Y.astype(float)
    scale = np.sum(Y * Y, axis=-1)
    if np.any(np.abs(lorentz_dot(Y, Y)) > tol * scale):
        raise ValueError("vector is not on the light cone")
    y0 = Y[..., 0]
    if np.any(np.abs(y0) <= tol * np.sqrt(scale)):
        raise ValueError("point at infinity of affine chart (Y0 = 0)")
    return Y[..., 1:] / y0[..., None]


def lift_to_cone(x) -> np.ndarray:
    """x in S^n  ->  (1, x) on the light cone."""
    x = np.asarray(x)
    if x.dtype.kind != "f":
        x = x.astype(float)
    one = np.ones(x.shape[:-1] + (1,), dtype=x.dtype)
    return np.concatenate([one, x], axis=-1)


class LorentzTransform:
    """Orthochronous Lorentz matrix acting on R^{n+1,1}."""

    def __init__(self, matrix, tol: float = FORM_TOL):
        M = np.array(matrix, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise ValueError("Lorentz matrix must be square")
        G = eta(M.shape[0])
        defect = np.max(np.abs(M.T @ G @ M - G))
        if defect > tol:
            raise ValueError(f"matrix does not preserve the form (defect {defect:.3e})")
        if M[0, 0] <= 0:
            raise ValueError("transform is not orthochronous")
        M.setflags(write=False)
        self.matrix = M

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def form_defect(self) -> float:
        G = eta(self.dim)
        return float(np.max(np.abs(self.matrix.T @ G @ self.matrix - G)))

    def __call__(self, Y):
        return np.asarray(Y) @ self.matrix.T

    def __matmul__(self, other: "LorentzTransform") -> "LorentzTransform":
        return LorentzTransform(self.matrix @ other.matrix, tol=1e-10)

    @classmethod
    def identity(cls, dim: int) -> "LorentzTransform":
        return cls(np.eye(dim))


def rotation(dim: int, i: int, j: int, angle: float) -> np.ndarray:
    if i == 0 or j == 0:
        raise ValueError("rotations act in spacelike planes only")
    R = np.eye(dim)
    c, s = np.cos(angle), np.sin(angle)
    R[i, i] = R[j, j] = c
    R[i, j], R[j, i] = -s, s
    return R


def boost(dim: int, i: int, rapidity: float) -> np.ndarray:
    B = np.eye(dim)
    ch, sh = np.cosh(rapidity), np.sinh(rapidity)
    B[0, 0] = B[i, i] = ch
    B[0, i] = B[i, 0] = sh
    return B


def random_lorentz(seed: int, n: int) -> LorentzTransform:
    """Random orthochronous transform of R^{n+1,1}, deterministic in ``seed``.

    A random rotation, one boost in the (0,1) plane with rapidity drawn from
    [-1, 1], then a second random rotation: a boost in a random direction.
    """
    dim = n + 2
    rng = np.random.default_rng(seed)

    def random_rotation():
        R = np.eye(dim)
        for i in range(1, dim):
            for j in range(i + 1, dim):
                R = rotation(dim, i, j, rng.uniform(-np.pi, np.pi)) @ R
        return R

    M = random_rotation() @ boost(dim, 1, rng.uniform(-1.0, 1.0)) @ random_rotation()
    return LorentzTransform(M)
