"""SMT-LIB 2 printing and parsing for the formula language."""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Mapping

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
    conj,
    disj,
    mk_div,
    mk_ite,
    mk_ite_term,
    mk_lit,
    neg,
)


class SmtParseError(ValueError):
    pass


def var_symbol(v: Var) -> str:
    name = v.name + ("__next" if v.primed else "")
    if re.fullmatch(r"[A-Za-z_~!@$%^&*+=<>.?/\-][A-Za-z0-9_~!@$%^&*+=<>.?/\-]*", name):
        return name
    return "|" + name + "|"


def num(c: Fraction, sort: Sort) -> str:
    if sort is Sort.INT and c.denominator == 1:
        n = c.numerator
        return str(n) if n >= 0 else f"(- {-n})"
    n, d = c.numerator, c.denominator
    body = f"{abs(n)}.0" if d == 1 else f"(/ {abs(n)}.0 {d}.0)"
    return body if n >= 0 else f"(- {body})"


def term_to_smt(t: Term, sort: Sort = None) -> str:
    sort = sort or t.sort or Sort.INT
    parts = []
    for a, c in t.coeffs:
        body = atom_to_smt(a, sort)
        parts.append(body if c == 1 else f"(* {num(c, sort)} {body})")
    if t.const or not parts:
        parts.append(num(t.const, sort))
    if len(parts) == 1:
        return parts[0]
    return "(+ " + " ".join(parts) + ")"


def atom_to_smt(a, sort: Sort) -> str:
    if isinstance(a, Var):
        return var_symbol(a)
    if isinstance(a, Div):
        return f"(div {term_to_smt(a.arg, Sort.INT)} {a.k})"
    if isinstance(a, IteT):
        return f"(ite {to_smt(a.cond)} {term_to_smt(a.then, sort)} {term_to_smt(a.other, sort)})"
    raise TypeError(a)


_OPNAME = {"<": "<", "<=": "<=", "=": "=", ">=": ">=", ">": ">"}


def to_smt(f: Formula) -> str:
    if isinstance(f, Const):
        return "true" if f.value else "false"
    if isinstance(f, Lit):
        t = f.term
        sort = t.sort or Sort.INT
        lhs = term_to_smt(Term(t.coeffs, 0), sort) if t.coeffs else num(t.const, sort)
        rhs = num(-t.const, sort) if t.coeffs else num(Fraction(0), sort)
        if f.op == "!=":
            return f"(not (= {lhs} {rhs}))"
        return f"({_OPNAME[f.op]} {lhs} {rhs})"
    if isinstance(f, BoolVar):
        return var_symbol(f.var)
    if isinstance(f, Not):
        return f"(not {to_smt(f.arg)})"
    if isinstance(f, And):
        return "(and " + " ".join(to_smt(a) for a in f.args) + ")"
    if isinstance(f, Or):
        return "(or " + " ".join(to_smt(a) for a in f.args) + ")"
    if isinstance(f, Ite):
        return f"(ite {to_smt(f.cond)} {to_smt(f.then)} {to_smt(f.other)})"
    raise TypeError(f)


def declare(v: Var) -> str:
    return f"(declare-fun {var_symbol(v)} () {v.sort.value})"


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(r"\s*(?:(;[^\n]*)|(\()|(\))|(\|[^|]*\|)|([^\s()|;]+))")


def sexprs(text: str) -> list:
    """Parse a string into a list of nested python lists of atoms."""
    stack = [[]]
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip() == "":
                break
            raise SmtParseError(f"bad token at offset {pos}")
        pos = m.end()
        comment, lp, rp, quoted, atom = m.groups()
        if comment:
            continue
        if lp:
            stack.append([])
        elif rp:
            if len(stack) == 1:
                raise SmtParseError("unbalanced ')'")
            done = stack.pop()
            stack[-1].append(done)
        elif quoted:
            stack[-1].append(quoted[1:-1])
        elif atom:
            stack[-1].append(atom)
    if len(stack) != 1:
        raise SmtParseError("unbalanced '('")
    return stack[0]


_NUM = re.compile(r"^-?\d+(\.\d+)?$")


class _Reader:
    def __init__(self, env: Mapping[str, Var]):
        self.env = dict(env)

    def value(self, e):
        """Return a Term or a Formula."""
        if isinstance(e, str):
            if e == "true":
                return TRUE
            if e == "false":
                return FALSE
            if _NUM.match(e):
                return Term.constant(Fraction(e))
            if e not in self.env:
                raise SmtParseError(f"unknown symbol {e!r}")
            v = self.env[e]
            return BoolVar(v) if v.sort is Sort.BOOL else v.term()
        if not e:
            raise SmtParseError("empty application")
        head, args = e[0], e[1:]
        if head == "let":
            raise SmtParseError("let is not supported")
        if head in ("and", "or"):
            fs = [self.formula(a) for a in args]
            return conj(*fs) if head == "and" else disj(*fs)
        if head == "not":
            return neg(self.formula(args[0]))
        if head == "=>":
            return disj(neg(self.formula(args[0])), self.formula(args[1]))
        if head == "ite":
            c = self.formula(args[0])
            t, o = self.value(args[1]), self.value(args[2])
            if isinstance(t, Formula):
                return mk_ite(c, t, self.formula(args[2]))
            sort = t.sort or (o.sort if isinstance(o, Term) else None) or Sort.INT
            return mk_ite_term(c, t, o, sort)
        if head in ("<", "<=", ">=", ">"):
            ts = [self.term(a) for a in args]
            return conj(*(mk_lit(ts[i], head, ts[i + 1]) for i in range(len(ts) - 1)))
        if head == "=":
            vals = [self.value(a) for a in args]
            if isinstance(vals[0], Formula):
                out = []
                for a, b in zip(vals, vals[1:]):
                    out.append(disj(conj(a, b), conj(neg(a), neg(b))))
                return conj(*out)
            return conj(*(mk_lit(vals[i], "=", vals[i + 1]) for i in range(len(vals) - 1)))
        if head == "distinct":
            ts = [self.term(a) for a in args]
            return conj(
                *(mk_lit(ts[i], "!=", ts[j]) for i in range(len(ts)) for j in range(i + 1, len(ts)))
            )
        if head == "+":
            acc = Term.constant(0)
            for a in args:
                acc = acc + self.term(a)
            return acc
        if head == "-":
            ts = [self.term(a) for a in args]
            if len(ts) == 1:
                return -ts[0]
            acc = ts[0]
            for t in ts[1:]:
                acc = acc - t
            return acc
        if head == "*":
            acc = Term.constant(1)
            for a in args:
                acc = acc * self.term(a)
            return acc
        if head == "/":
            n, d = self.term(args[0]), self.term(args[1])
            if not d.is_constant() or d.const == 0:
                raise SmtParseError("division by non-constant")
            return n / d.const
        if head in ("div", "mod"):
            t, k = self.term(args[0]), self.term(args[1])
            if not k.is_constant() or k.const.denominator != 1 or k.const <= 0:
                raise SmtParseError(f"{head} needs a positive integer constant divisor")
            q = mk_div(t, int(k.const))
            return q if head == "div" else t - q * int(k.const)
        if head == "to_real":
            return self.term(args[0])
        raise SmtParseError(f"unsupported operator {head!r}")

    def term(self, e) -> Term:
        v = self.value(e)
        if not isinstance(v, Term):
            raise SmtParseError(f"expected a term, got {v}")
        return v

    def formula(self, e) -> Formula:
        v = self.value(e)
        if not isinstance(v, Formula):
            raise SmtParseError(f"expected a formula, got {v}")
        return v


def symbol_table(vars_) -> dict:
    return {var_symbol(v).strip("|"): v for v in vars_}


def parse_formula(text: str, vars_) -> Formula:
    es = sexprs(text)
    if len(es) != 1:
        raise SmtParseError("expected a single expression")
    return _Reader(symbol_table(vars_)).formula(es[0])


def parse_term(text: str, vars_) -> Term:
    es = sexprs(text)
    if len(es) != 1:
        raise SmtParseError("expected a single expression")
    return _Reader(symbol_table(vars_)).term(es[0])


def parse_script(text: str) -> tuple:
    """Parse declare-fun/declare-const/assert commands; returns (vars, conjunction)."""
    env = {}
    asserts = []
    for cmd in sexprs(text):
        if not isinstance(cmd, list) or not cmd:
            continue
        head = cmd[0]
        if head == "declare-fun":
            name, _, sort = cmd[1], cmd[2], cmd[3]
            env[name] = _mk_var(name, sort)
        elif head == "declare-const":
            env[cmd[1]] = _mk_var(cmd[1], cmd[2])
        elif head == "assert":
            asserts.append(_Reader(env).formula(cmd[1]))
    return list(env.values()), conj(*asserts)


def _mk_var(name: str, sort: str) -> Var:
    primed = name.endswith("__next")
    base = name[: -len("__next")] if primed else name
    return Var(base, Sort(sort), primed)
