"""Monte Carlo coding-tree solvers for nonlinear parabolic PDEs."""

from ._core import (
    ParseError,
    Report,
    ReportRow,
    ResidualError,
    ResourceError,
    check_bounds,
    cole_hopf_oracle,
    fdb_terms,
    mechanism,
    preset_info,
    preset_names,
    run_preset,
    solve,
    solve_dd,
)

__all__ = [
    "ParseError",
    "Report",
    "ReportRow",
    "ResidualError",
    "ResourceError",
    "check_bounds",
    "cole_hopf_oracle",
    "fdb_terms",
    "mechanism",
    "preset_info",
    "preset_names",
    "run_preset",
    "solve",
    "solve_dd",
]
