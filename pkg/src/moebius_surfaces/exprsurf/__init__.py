from .catalog import builtin, builtin_names, catalog
from .document import DocumentError, format_surface, load_surface, parse_surface
from .expr import ExprDomainError, ExprSyntaxError, evaluate_expr, parse_expr, to_text
from .surface import (
    SurfaceError, SurfaceSpec, evaluate, inverse_stereographic, raw_point, sample,
    sphere_dim, validate,
)

__all__ = [
    "builtin", "builtin_names", "catalog", "DocumentError", "format_surface",
    "load_surface", "parse_surface", "ExprDomainError", "ExprSyntaxError",
    "evaluate_expr", "parse_expr", "to_text", "SurfaceError", "SurfaceSpec",
    "evaluate", "inverse_stereographic", "raw_point", "sample", "sphere_dim",
    "validate",
]
