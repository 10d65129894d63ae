"""scikit-learn style wrappers: one sample = one surface.

    >>> est = MoebiusInvariants().fit(["clifford", "catenoid"])
    >>> est.transform(["clifford"]).shape
    (1, 7)
"""
from __future__ import annotations

import os
from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .diffgrid import Grid
from .exprsurf import SurfaceSpec, load_surface
from .invariants import GHOST_NODES, InvariantField, compute_invariants
from .minkowski import random_lorentz
from .verify import CLASSES_S3, CLASSES_S4, classify, willmore_field

FEATURES = ("K_mean", "K_std", "ReP_mean", "ImP_mean", "P_std", "willmore_max", "isotropy_max")


def check_surface(x) -> SurfaceSpec:
    """Coerce a builtin name, document path or SurfaceSpec."""
    if isinstance(x, SurfaceSpec):
        return x
    if isinstance(x, (str, os.PathLike)):
        return load_surface(os.fspath(x))
    raise TypeError(f"expected a surface name, path or SurfaceSpec, got {type(x).__name__}")


def check_surfaces(X) -> list[SurfaceSpec]:
    """A single surface or a non-empty iterable of them."""
    if isinstance(X, (str, os.PathLike, SurfaceSpec)):
        return [check_surface(X)]
    if isinstance(X, np.ndarray):
        X = X.ravel().tolist()
    try:
        items = list(X)
    except TypeError:
        raise TypeError(f"expected surfaces, got {type(X).__name__}") from None
    if not items:
        raise ValueError("no surfaces given")
    return [check_surface(x) for x in items]


def _features(inv: InvariantField) -> np.ndarray:
    sel = inv.interior
    K = np.asarray(inv.K[sel], dtype=float)
    P = np.asarray(inv.P[sel], dtype=complex)
    wres = np.asarray(willmore_field(inv)[sel], dtype=float)
    iso = np.abs(np.asarray(inv.kappa_sq[sel], dtype=complex))
    return np.array([K.mean(), K.std(), P.real.mean(), P.imag.mean(), np.abs(P - P.mean()).max(),
                     wres.max(), iso.max()])


class MoebiusInvariants(TransformerMixin, BaseEstimator):
    """Summary Moebius invariants per surface.

    Parameters
    ----------
    nu, nv : grid overrides (None keeps each surface's own grid)
    ghost : ghost nodes beyond non-periodic edges
    moebius_seed : apply a seeded random Moebius transform first (invariance checks)
    """

    def __init__(self, nu: Optional[int] = None, nv: Optional[int] = None,
                 ghost: int = GHOST_NODES, moebius_seed: Optional[int] = None):
        self.nu = nu
        self.nv = nv
        self.ghost = ghost
        self.moebius_seed = moebius_seed

    def _prepare(self, spec: SurfaceSpec) -> SurfaceSpec:
        if self.nu or self.nv:
            g = spec.grid
            spec = spec.with_grid(Grid(g.u_range, g.v_range, self.nu or g.nu, self.nv or g.nv,
                                       g.periodic_u, g.periodic_v))
        if self.moebius_seed is not None:
            spec = spec.transformed(random_lorentz(self.moebius_seed, spec.n))
        return spec

    def _compute(self, specs) -> list[InvariantField]:
        return [compute_invariants(self._prepare(s), ghost=self.ghost) for s in specs]

    def fit(self, X, y=None):
        specs = check_surfaces(X)
        self.invariants_ = self._compute(specs)
        self.surfaces_ = specs
        self.surface_names_ = [s.name for s in specs]
        self.n_features_out_ = len(FEATURES)
        return self

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "invariants_")
        rows = []
        for s in check_surfaces(X):
            # reuse the fitted field when the same surface comes back
            hit = next((inv for f, inv in zip(self.surfaces_, self.invariants_)
                        if f == s and f.lorentz is s.lorentz), None)
            rows.append(_features(hit if hit is not None else self._compute([s])[0]))
        return np.vstack(rows)

    def get_feature_names_out(self, input_features=None):
        return np.array(FEATURES, dtype=object)


class MoebiusClassifier(ClassifierMixin, BaseEstimator):
    """Rule-based placement among the constant-K Willmore models (no training)."""

    def __init__(self, tol: Optional[float] = None, ghost: int = GHOST_NODES):
        self.tol = tol
        self.ghost = ghost

    def fit(self, X=None, y=None):
        labels = [c[0] for c in CLASSES_S3 + CLASSES_S4]
        self.classes_ = np.array(sorted(labels + ["Indeterminate", "NonConstantK", "NotWillmore"]))
        return self

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "classes_")
        specs = check_surfaces(X)
        self.verdicts_ = [classify(compute_invariants(s, ghost=self.ghost), self.tol) for s in specs]
        return np.array([v.label for v in self.verdicts_])
