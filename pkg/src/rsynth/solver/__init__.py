"""Satisfiability checking for quantifier-free linear arithmetic."""
from .core import (  # noqa: F401
    UNSAT,
    Sat,
    Solver,
    SolverConfig,
    SolverIncomplete,
    SolverTimeout,
    Unsat,
    check_sat,
    is_valid,
)


def clear_caches():
    """Reset process-wide memo tables so a run can be timed from a cold start."""
    from ..logic.ops import clear_caches as _clear_ops
    from .fm import _lit_constraint

    _clear_ops()
    _lit_constraint.cache_clear()
