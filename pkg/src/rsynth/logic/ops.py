"""Structural operations on formulas: NNF, DNF, literal harvesting, isolation."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from .expr import (
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
    Term,
    Var,
    canonicalize,
    conj,
    disj,
    mk_div,
    neg,
)


class UnsupportedConstraint(ValueError):
    pass


class DnfOverflow(RuntimeError):
    pass


DNF_CAP = 4096


# ---------------------------------------------------------------- NNF


_MEMO_CAP = 200000
_nnf_memo: dict = {}
_lift_memo: dict = {}


def _remember(memo, key, value):
    if len(memo) >= _MEMO_CAP:
        memo.clear()
    memo[key] = value
    return value


def clear_caches():
    """Drop memoized normal forms (used to time runs from a cold start)."""
    _nnf_memo.clear()
    _lift_memo.clear()


def nnf(f: Formula, positive: bool = True) -> Formula:
    """Negation normal form; negations survive only on boolean variables."""
    key = (f, positive)
    hit = _nnf_memo.get(key)
    if hit is not None:
        return hit
    return _remember(_nnf_memo, key, _nnf(f, positive))


def _nnf(f: Formula, positive: bool) -> Formula:
    if isinstance(f, Const):
        return f if positive else neg(f)
    if isinstance(f, Lit):
        return canonicalize(f) if positive else neg(canonicalize(f))
    if isinstance(f, BoolVar):
        return f if positive else Not(f)
    if isinstance(f, Not):
        return nnf(f.arg, not positive)
    if isinstance(f, And):
        parts = [nnf(a, positive) for a in f.args]
        return conj(*parts) if positive else disj(*parts)
    if isinstance(f, Or):
        parts = [nnf(a, positive) for a in f.args]
        return disj(*parts) if positive else conj(*parts)
    if isinstance(f, Ite):
        c = nnf(f.cond)
        nc = nnf(f.cond, False)
        return disj(conj(c, nnf(f.then, positive)), conj(nc, nnf(f.other, positive)))
    raise TypeError(f"not a formula: {f!r}")


def is_literal(f: Formula) -> bool:
    return isinstance(f, (Lit, BoolVar)) or (isinstance(f, Not) and isinstance(f.arg, BoolVar))


def literals(f: Formula) -> list:
    """All literals occurring in the NNF of ``f`` (first occurrence order)."""
    out = {}

    def walk(g):
        if is_literal(g):
            out.setdefault(g, None)
        elif isinstance(g, (And, Or)):
            for a in g.args:
                walk(a)

    walk(nnf(f))
    return list(out)


def true_literals(f: Formula, model) -> list:
    """Literals on the NNF path of ``f`` taken by ``model``.

    Conjunctions contribute every child; a disjunction contributes the first
    child the model satisfies.  The conjunction of the result holds in the
    model and implies ``f``.
    """
    out = {}

    def walk(g) -> bool:
        if isinstance(g, Const):
            return g.value
        if is_literal(g):
            if g.holds(model):
                out.setdefault(g, None)
                return True
            return False
        if isinstance(g, And):
            ok = True
            for a in g.args:
                ok = walk(a) and ok
            return ok
        if isinstance(g, Or):
            for a in g.args:
                if a.holds(model):
                    return walk(a)
            return False
        raise TypeError(g)

    walk(nnf(f))
    return list(out)


# ---------------------------------------------------------------- DNF


def to_dnf(f: Formula, cap: int = DNF_CAP) -> list:
    """List of disjuncts, each a list of literals; an empty list means FALSE."""

    def go(g):
        if g == TRUE:
            return [[]]
        if g == FALSE:
            return []
        if is_literal(g):
            return [[g]]
        if isinstance(g, Or):
            acc = []
            for a in g.args:
                acc.extend(go(a))
                if len(acc) > cap:
                    raise DnfOverflow(f"DNF exceeds {cap} disjuncts")
            return acc
        if isinstance(g, And):
            acc = [[]]
            for a in g.args:
                sub = go(a)
                if len(acc) * len(sub) > cap:
                    raise DnfOverflow(f"DNF exceeds {cap} disjuncts")
                acc = [x + y for x in acc for y in sub]
            return acc
        raise TypeError(g)

    result = []
    for d in go(nnf(f)):
        seen = {}
        for lit in d:
            seen.setdefault(lit, None)
        result.append(list(seen))
    return result


def from_dnf(disjuncts: Iterable) -> Formula:
    return disj(*(conj(*d) for d in disjuncts))


# ---------------------------------------------------------------- ite lifting


def replace_atom(t: Term, atom, repl: Term) -> Term:
    c = t.coeff(atom)
    if not c:
        return t
    rest = Term([(a, k) for a, k in t.coeffs if a != atom], t.const)
    return rest + repl * c


def _first_ite(t: Term):
    for a, _ in t.coeffs:
        if isinstance(a, IteT):
            return a
        if isinstance(a, Div):
            inner = _first_ite(a.arg)
            if inner is not None:
                return inner
    return None


def _replace_deep(t: Term, atom: IteT, repl: Term) -> Term:
    out = Term((), t.const)
    for a, c in t.coeffs:
        if a == atom:
            out = out + repl * c
        elif isinstance(a, Div):
            arg = _replace_deep(a.arg, atom, repl)
            out = out + mk_div(arg, a.k) * c
        else:
            out = out + Term({a: c})
    return out


def lift_ite(f: Formula) -> Formula:
    """Eliminate term-level ite by case-splitting the enclosing literals."""
    hit = _lift_memo.get(f)
    if hit is not None:
        return hit
    return _remember(_lift_memo, f, _lift_ite(f))


def _lift_ite(f: Formula) -> Formula:
    if isinstance(f, Lit):
        it = _first_ite(f.term)
        if it is None:
            return f
        then_lit = canonicalize(Lit(_replace_deep(f.term, it, it.then), f.op))
        else_lit = canonicalize(Lit(_replace_deep(f.term, it, it.other), f.op))
        c = lift_ite(it.cond)
        return disj(conj(c, lift_ite(then_lit)), conj(neg_nnf(c), lift_ite(else_lit)))
    if isinstance(f, (Const, BoolVar)):
        return f
    if isinstance(f, Not):
        return neg_nnf(lift_ite(f.arg))
    if isinstance(f, And):
        return conj(*(lift_ite(a) for a in f.args))
    if isinstance(f, Or):
        return disj(*(lift_ite(a) for a in f.args))
    if isinstance(f, Ite):
        c = lift_ite(f.cond)
        return disj(conj(c, lift_ite(f.then)), conj(neg_nnf(c), lift_ite(f.other)))
    raise TypeError(f)


def neg_nnf(f: Formula) -> Formula:
    return nnf(f, False)


# ---------------------------------------------------------------- isolation


@dataclass(frozen=True)
class Isolated:
    """``y op bound``, valid whenever ``side`` holds (side is TRUE for unit cases)."""

    op: str
    bound: Term
    side: Formula = TRUE


def split_var(t: Term, y: Var):
    """Return (coefficient of y, remainder) or raise if y sits inside a div/ite."""
    a = Fraction(0)
    rest = []
    for atom, c in t.coeffs:
        if atom == y:
            a = c
        else:
            if not isinstance(atom, Var) and y in atom.vars():
                raise UnsupportedConstraint(f"{y} occurs under {atom}")
            rest.append((atom, c))
    return a, Term(rest, t.const)


_FLIP = {"<": ">", "<=": ">=", "=": "=", "!=": "!=", ">=": "<=", ">": "<"}


def isolate(lit: Formula, y: Var) -> Optional[Isolated]:
    """Solve a literal for ``y``; None when y does not occur."""
    if not isinstance(lit, Lit):
        return None
    lit = canonicalize(lit) if isinstance(lit, Lit) else lit
    if not isinstance(lit, Lit):
        return None
    a, rest = split_var(lit.term, y)
    if not a:
        return None
    op = lit.op
    f = -rest
    if a < 0:
        a, f, op = -a, -f, _FLIP[op]
    if y.sort is not Sort.INT:
        return Isolated(op, f / a)
    # integer case: a is a positive integer after canonicalization
    if op == "<":
        f, op = f - 1, "<="
    elif op == ">":
        f, op = f + 1, ">="
    if a == 1:
        return Isolated(op, f)
    k = int(a)
    if op == "<=":
        return Isolated("<=", mk_div(f, k))
    if op == ">=":
        return Isolated(">=", mk_div(f + (k - 1), k))
    if op == "!=":
        # a*y != f excludes y = f/a, which is only an integer when a | f
        return Isolated("!=", f / k)
    q = mk_div(f, k)
    side = canonicalize(Lit(f - q * k, "="))
    return Isolated("=", q, side)
