"""Local Skolem extraction from per-variable constraint sets.

Constraints on one output ``y`` are sorted into six buckets (equalities,
disequalities, strict/non-strict lower and upper bounds).  The random
extractor turns them into a call to an uninterpreted random number generator
whose contract keeps every produced value inside the admissible set; the
deterministic extractor picks a single admissible value.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .logic.expr import (
    FALSE,
    TRUE,
    BoolVar,
    Formula,
    IteT,
    Lit,
    Not,
    Sort,
    Term,
    Var,
    conj,
    mk_ite_term,
    mk_lit,
    neg,
)
from .logic.ops import UnsupportedConstraint, isolate


# ---------------------------------------------------------------- data


@dataclass(frozen=True)
class Buckets:
    E: tuple = ()
    D: tuple = ()
    G: tuple = ()
    GE: tuple = ()
    L: tuple = ()
    LE: tuple = ()

    def is_empty(self):
        return not (self.E or self.D or self.G or self.GE or self.L or self.LE)


@dataclass(frozen=True)
class Assign:
    term: Term

    def __str__(self):
        return str(self.term)


@dataclass(frozen=True)
class Urng:
    """f_rng(H, lclosed, uclosed, lower, upper); None bounds stand for -inf/+inf."""

    H: tuple
    lclosed: Formula
    uclosed: Formula
    lower: Optional[Term]
    upper: Optional[Term]
    sort: Sort = Sort.INT

    def __str__(self):
        h = "{" + ", ".join(str(t) for t in self.H) + "}" if self.H else "{}"
        lo = "-inf" if self.lower is None else str(self.lower)
        hi = "+inf" if self.upper is None else str(self.upper)
        return f"f_rng({h}, {self.lclosed}, {self.uclosed}, {lo}, {hi})"

    def admits(self, v: Fraction, model) -> bool:
        """Postconditions of the generator, evaluated at a context."""
        for h in self.H:
            if v == h.evaluate(model):
                return False
        if self.lower is not None:
            lo = self.lower.evaluate(model)
            if v < lo or (v == lo and not self.lclosed.holds(model)):
                return False
        if self.upper is not None:
            hi = self.upper.evaluate(model)
            if v > hi or (v == hi and not self.uclosed.holds(model)):
                return False
        return True


@dataclass(frozen=True)
class GuardedPair:
    cond: Formula
    then: "LocalSkolem"
    other: "LocalSkolem"

    def __str__(self):
        return f"ite({self.cond}, {self.then}, {self.other})"


LocalSkolem = Union[Assign, Urng, GuardedPair]


# ---------------------------------------------------------------- helpers


def _dedup_terms(ts):
    out = []
    for t in ts:
        if t not in out:
            out.append(t)
    return out


def min_max_chain(S, kind: str, sort: Sort = None) -> Term:
    """Symbolic MIN/MAX as an ite chain: ite(s <= MIN(rest), s, MIN(rest))."""
    S = _dedup_terms(S)
    if not S:
        raise ValueError("MIN/MAX of an empty set")
    if sort is None:
        sort = next((t.sort for t in S if t.sort is not None), Sort.INT)
    acc = S[-1]
    for s in reversed(S[:-1]):
        op = "<=" if kind == "MIN" else ">="
        acc = mk_ite_term(mk_lit(s, op, acc), s, acc, sort)
    return acc


def classify(residual, y: Var) -> Buckets:
    """Sort the constraints on ``y``; integer bounds come out closed (GE/LE only)."""
    b = {k: [] for k in ("E", "D", "G", "GE", "L", "LE")}
    for lit in residual:
        if isinstance(lit, BoolVar) and lit.var == y:
            b["E"].append(Term.constant(1))
            continue
        if isinstance(lit, Not) and isinstance(lit.arg, BoolVar) and lit.arg.var == y:
            b["E"].append(Term.constant(0))
            continue
        if not isinstance(lit, Lit):
            raise UnsupportedConstraint(f"cannot classify {lit} for {y}")
        i = isolate(lit, y)
        if i is None:
            raise UnsupportedConstraint(f"{lit} does not constrain {y}")
        key = {"=": "E", "!=": "D", ">": "G", ">=": "GE", "<": "L", "<=": "LE"}[i.op]
        b[key].append(i.bound)
    return Buckets(**{k: tuple(_dedup_terms(v)) for k, v in b.items()})


def _bounds(y: Var, bk: Buckets):
    sort = Sort.INT if y.sort is not Sort.REAL else Sort.REAL
    lows = list(bk.G) + list(bk.GE)
    ups = list(bk.L) + list(bk.LE)
    lo = min_max_chain(lows, "MAX", sort) if lows else None
    hi = min_max_chain(ups, "MIN", sort) if ups else None
    if not bk.G:
        lc = TRUE
    elif not bk.GE:
        lc = FALSE
    else:
        lc = mk_lit(min_max_chain(bk.G, "MAX", sort), "<", min_max_chain(bk.GE, "MAX", sort))
    if not bk.L:
        uc = TRUE
    elif not bk.LE:
        uc = FALSE
    else:
        uc = mk_lit(min_max_chain(bk.L, "MIN", sort), ">", min_max_chain(bk.LE, "MIN", sort))
    if y.sort is Sort.BOOL:
        lo = min_max_chain(lows + [Term.constant(0)], "MAX", Sort.INT)
        hi = min_max_chain(ups + [Term.constant(1)], "MIN", Sort.INT)
    return lo, hi, lc, uc, sort


def extract_random(y: Var, bk: Buckets, context: Formula = TRUE, solver=None) -> LocalSkolem:
    if bk.E:
        return Assign(bk.E[0])
    lo, hi, lc, uc, sort = _bounds(y, bk)
    call = Urng(tuple(bk.D), lc, uc, lo, hi, sort)
    if lo is None or hi is None:
        return call
    if lo == hi:
        return Assign(lo)
    if solver is None:
        return call
    same = mk_lit(lo, "=", hi)
    if not solver.check_sat(conj(context, mk_lit(lo, "!=", hi))):
        return Assign(lo)
    if solver.check_sat(conj(context, same)):
        return GuardedPair(same, Assign(lo), call)
    return call


def extract_deterministic(y: Var, bk: Buckets, context: Formula = TRUE, solver=None) -> LocalSkolem:
    if bk.E:
        return Assign(bk.E[0])
    lo, hi, _, _, sort = _bounds(y, bk)
    n = len(bk.D)
    if sort is Sort.INT:
        if lo is not None:
            cands = [lo + k for k in range(n + 1)]
        elif hi is not None:
            cands = [hi - k for k in range(n + 1)]
        else:
            cands = [Term.constant(k) for k in range(n + 1)]
    else:
        if lo is not None and hi is not None:
            if n == 0:
                cands = [(lo + hi) / 2]
            else:
                cands = [lo + (hi - lo) * Fraction(k, n + 2) for k in range(1, n + 2)]
        elif lo is not None:
            cands = [lo + k for k in range(1, n + 2)]
        elif hi is not None:
            cands = [hi - k for k in range(1, n + 2)]
        else:
            cands = [Term.constant(k) for k in range(n + 1)]
    if not bk.D:
        return Assign(cands[0])
    acc: LocalSkolem = Assign(cands[-1])
    for c in reversed(cands[:-1]):
        cond = conj(*(mk_lit(c, "!=", h) for h in bk.D))
        if cond == TRUE:
            acc = Assign(c)
        elif cond != FALSE:
            acc = GuardedPair(cond, Assign(c), acc)
    return acc


def extract(y: Var, residual, mode: str, context: Formula = TRUE, solver=None) -> LocalSkolem:
    bk = classify(residual, y)
    if mode == "random":
        return extract_random(y, bk, context, solver)
    return extract_deterministic(y, bk, context, solver)


# ---------------------------------------------------------------- evaluation helpers


def skolem_vars(sk: LocalSkolem) -> set:
    if isinstance(sk, Assign):
        return sk.term.vars()
    if isinstance(sk, GuardedPair):
        return sk.cond.vars() | skolem_vars(sk.then) | skolem_vars(sk.other)
    out = set(sk.lclosed.vars()) | set(sk.uclosed.vars())
    for t in list(sk.H) + [sk.lower, sk.upper]:
        if t is not None:
            out |= t.vars()
    return out


def admissible(sk: LocalSkolem, model, v: Fraction) -> bool:
    """Whether ``v`` is a value the local Skolem may produce at ``model``."""
    if isinstance(sk, Assign):
        return sk.term.evaluate(model) == v
    if isinstance(sk, GuardedPair):
        return admissible(sk.then if sk.cond.holds(model) else sk.other, model, v)
    return sk.admits(v, model)


# ---------------------------------------------------------------- simplification


def _decide(cond: Formula, context: Formula, solver):
    """True/False when the context settles ``cond``, else None."""
    if cond == TRUE or cond == FALSE:
        return cond == TRUE
    if not solver.check_sat(conj(context, neg(cond))):
        return True
    if not solver.check_sat(conj(context, cond)):
        return False
    return None


def simplify_term(t: Term, context: Formula, solver) -> Term:
    """Resolve ite atoms whose condition the context decides."""
    out = Term((), t.const)
    for a, c in t.coeffs:
        if isinstance(a, IteT):
            d = _decide(a.cond, context, solver)
            if d is None:
                cond = simplify_formula(a.cond, context, solver)
                th = simplify_term(a.then, conj(context, cond), solver)
                ot = simplify_term(a.other, conj(context, neg(cond)), solver)
                out = out + mk_ite_term(cond, th, ot, a.sort) * c
            else:
                out = out + simplify_term(a.then if d else a.other, context, solver) * c
        else:
            out = out + Term({a: c})
    return out


def simplify_formula(f: Formula, context: Formula, solver) -> Formula:
    if f.vars():
        d = _decide(f, context, solver)
        if d is not None:
            return TRUE if d else FALSE
    if isinstance(f, Lit) and any(isinstance(a, IteT) for a in f.term.atoms()):
        return mk_lit(simplify_term(f.term, context, solver), f.op)
    return f


def simplify_skolem(sk: "LocalSkolem", context: Formula, solver) -> "LocalSkolem":
    """Specialise a local Skolem to the region where it is used."""
    if isinstance(sk, Assign):
        return Assign(simplify_term(sk.term, context, solver))
    if isinstance(sk, GuardedPair):
        d = _decide(sk.cond, context, solver)
        if d is not None:
            return simplify_skolem(sk.then if d else sk.other, context, solver)
        cond = simplify_formula(sk.cond, context, solver)
        return GuardedPair(
            cond,
            simplify_skolem(sk.then, conj(context, sk.cond), solver),
            simplify_skolem(sk.other, conj(context, neg(sk.cond)), solver),
        )
    lo = None if sk.lower is None else simplify_term(sk.lower, context, solver)
    hi = None if sk.upper is None else simplify_term(sk.upper, context, solver)
    lc = simplify_formula(sk.lclosed, context, solver)
    uc = simplify_formula(sk.uclosed, context, solver)
    H = tuple(_dedup_terms(simplify_term(h, context, solver) for h in sk.H))
    if lo is not None and lo == hi and lc == TRUE and uc == TRUE and not H:
        return Assign(lo)
    return Urng(H, lc, uc, lo, hi, sk.sort)
