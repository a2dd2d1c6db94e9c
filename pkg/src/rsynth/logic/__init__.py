"""Terms, literals and formulas over linear integer/real arithmetic."""
from .expr import (  # noqa: F401
    FALSE,
    TRUE,
    And,
    BoolVar,
    Const,
    Div,
    Formula,
    Ite,
    IteT,
    Lit,
    Not,
    Or,
    Sort,
    SortError,
    Term,
    Var,
    canonicalize,
    conj,
    disj,
    iff,
    implies,
    mk_div,
    mk_ite,
    mk_ite_term,
    mk_lit,
    neg,
)
from .ops import (  # noqa: F401
    DnfOverflow,
    Isolated,
    UnsupportedConstraint,
    from_dnf,
    isolate,
    lift_ite,
    literals,
    nnf,
    to_dnf,
    true_literals,
)
