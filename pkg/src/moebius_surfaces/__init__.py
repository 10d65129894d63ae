"""Moebius-geometric invariants of surfaces in S^3 and S^4.

The pipeline takes a conformally parametrized surface (closed form, text
document or integrated frame), builds its canonical light-cone lift, and
computes the Schwarzian s, Hopf differential kappa, Moebius metric and
curvature K, and the scalar invariant P = rho / <kappa, kappa-bar>.
Verification suites check the structure, integrability, Willmore and
S-Willmore equations and the identities relating K and P.
"""
from .diffgrid import Grid, d_u, d_v, d_z, d_zbar
from .estimator import MoebiusClassifier, MoebiusInvariants
from .exprsurf import builtin, builtin_names, catalog, load_surface, parse_surface
from .invariants import InvariantField, UmbilicError, compute_invariants, invariants_from_lift
from .minkowski import LorentzTransform, lorentz_dot, random_lorentz
from .verify import ResidualReport, classify, run_suites

__version__ = "0.1.0"

__all__ = [
    "Grid", "d_u", "d_v", "d_z", "d_zbar", "MoebiusClassifier", "MoebiusInvariants",
    "builtin", "builtin_names", "catalog", "load_surface", "parse_surface",
    "InvariantField", "UmbilicError", "compute_invariants", "invariants_from_lift",
    "LorentzTransform", "lorentz_dot", "random_lorentz", "ResidualReport", "classify",
    "run_suites",
]
