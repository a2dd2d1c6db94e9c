"""C and SMT-LIB emitters for synthesized witnesses.

The C witness keeps inputs and outputs in globals, sets the initial outputs in
``init()`` and computes one step in ``skolem()``: the decision tree becomes an
if/else-if chain whose arms assign ``<output>_next`` temporaries in
declaration order before committing them.  Generator calls become
``RandVal(lflag, uflag, lower, upper)`` (``RandValReal`` for reals).  Reals are
emitted as ``double``; the synthesized terms are exact but the compiled code
inherits floating-point rounding.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .logic.expr import (
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
    mk_ite,
    mk_lit,
    neg,
)
from .logic.smtlib import declare, term_to_smt, to_smt
from .skolem import Assign, GuardedPair, Urng

AVOID_TRIES = 10000
REAL_WINDOW = 1 << 20  # width used for a real draw with an infinite side

C_KEYWORDS = {
    "auto", "break", "case", "char", "const", "continue", "default", "do", "double", "else",
    "enum", "extern", "float", "for", "goto", "if", "inline", "int", "long", "register",
    "restrict", "return", "short", "signed", "sizeof", "static", "struct", "switch", "typedef",
    "union", "unsigned", "void", "volatile", "while", "bool", "true", "false", "init", "skolem",
    "main", "RandVal", "RandValReal", "rs_floordiv",
}


class CodegenError(ValueError):
    pass


@dataclass(frozen=True)
class EmitConfig:
    target: str = "c"  # "c" or "smtlib"
    emit_randval: bool = False
    int_min: str = "INT_MIN"
    int_max: str = "INT_MAX"
    real_min: str = "-DBL_MAX"
    real_max: str = "DBL_MAX"


def _c_name(v: Var, taken=()) -> str:
    base = v.name if v.name not in C_KEYWORDS else v.name + "_v"
    if v.primed:
        name = base + "_next"
        return name if name not in taken else base + "__next"
    return base


def _ctype(sort: Sort) -> str:
    return {Sort.INT: "int", Sort.REAL: "double", Sort.BOOL: "bool"}[sort]


class _CWriter:
    def __init__(self, contract, cfg: EmitConfig):
        self.c = contract
        self.cfg = cfg
        plain = {_c_name(v) for v in contract.inputs + contract.outputs}
        self.names = {}
        for v in contract.inputs + contract.outputs:
            self.names[v] = _c_name(v)
        for v in contract.outputs:
            self.names[v.prime()] = _c_name(v.prime(), plain)
        self.lines = []

    # -- expressions
    def var(self, v: Var) -> str:
        if v not in self.names:
            raise CodegenError(f"variable {v} is not part of the contract")
        return self.names[v]

    def const(self, c: Fraction, sort: Sort) -> str:
        if sort is Sort.REAL:
            if c.denominator == 1:
                s = f"{c.numerator}.0"
            else:
                s = f"({abs(c.numerator)}.0 / {c.denominator}.0)"
                s = s if c >= 0 else "-" + s
            return s
        if c.denominator != 1:
            raise CodegenError(f"non-integral constant {c} in integer code")
        return str(c.numerator)

    def atom(self, a, sort: Sort) -> str:
        if isinstance(a, Var):
            return self.var(a)
        if isinstance(a, Div):
            return f"rs_floordiv({self.term(a.arg, Sort.INT)}, {a.k})"
        if isinstance(a, IteT):
            return f"({self.formula(a.cond)} ? {self.term(a.then, sort)} : {self.term(a.other, sort)})"
        raise CodegenError(f"unsupported atom {a!r}")

    def _sum(self, coeffs, const, sort) -> str:
        out = ""
        for a, c in coeffs:
            body = self.atom(a, sort)
            mag = abs(c)
            piece = body if mag == 1 else f"{self.const(mag, sort)} * {body}"
            if not out:
                out = piece if c > 0 else "-" + piece
            else:
                out += (" + " if c > 0 else " - ") + piece
        if const or not out:
            if not out:
                return self.const(const, sort) if const >= 0 else "-" + self.const(-const, sort)
            out += (" + " if const > 0 else " - ") + self.const(abs(const), sort)
        return out

    def term(self, t: Term, sort: Sort = Sort.INT, prec: bool = False) -> str:
        if sort is not Sort.REAL:
            d = lcm(*(c.denominator for _, c in t.coeffs), t.const.denominator)
            if d != 1:
                scaled = t * d
                return f"rs_floordiv({self._sum(scaled.coeffs, scaled.const, sort)}, {d})"
        s = self._sum(t.coeffs, t.const, sort)
        if prec and (len(t.coeffs) + (1 if t.const else 0) > 1 or s.startswith("-")):
            return f"({s})"
        return s

    def lit(self, l: Lit) -> str:
        t = l.term
        sort = t.sort or Sort.INT
        op = {"=": "==", "!=": "!="}.get(l.op, l.op)
        if not t.coeffs:
            return "1" if l.holds({}) else "0"
        lhs = self._sum(t.coeffs, 0, sort)
        return f"{lhs} {op} {self.const_signed(-t.const, sort)}"

    def const_signed(self, c: Fraction, sort) -> str:
        return self.const(c, sort) if c >= 0 else "-" + self.const(-c, sort)

    def formula(self, f: Formula, top: bool = False) -> str:
        if isinstance(f, Const):
            return "1" if f.value else "0"
        if isinstance(f, Lit):
            s = self.lit(f)
            return s if top else f"({s})"
        if isinstance(f, BoolVar):
            return self.var(f.var)
        if isinstance(f, Not):
            return f"!{self.formula(f.arg)}"
        if isinstance(f, (And, Or)):
            op = " && " if isinstance(f, And) else " || "
            parts = [self.formula(a, top=isinstance(a, Lit)) for a in f.args]
            s = op.join(parts)
            return s if top else f"({s})"
        if isinstance(f, Ite):
            return f"({self.formula(f.cond)} ? {self.formula(f.then)} : {self.formula(f.other)})"
        raise CodegenError(f"unsupported formula {f!r}")

    def flag(self, f: Formula) -> str:
        return self.formula(f, top=True)

    # -- statements
    def emit(self, depth, text):
        self.lines.append("  " * depth + text)

    def skolem(self, y: Var, sk, depth: int):
        target = self.var(y)
        sort = Sort.INT if y.sort is Sort.BOOL else y.sort
        if isinstance(sk, Assign):
            self.emit(depth, f"{target} = {self.term(sk.term, sort)};")
        elif isinstance(sk, GuardedPair):
            self.emit(depth, f"if ({self.flag(sk.cond)}) {{")
            self.skolem(y, sk.then, depth + 1)
            self.emit(depth, "} else {")
            self.skolem(y, sk.other, depth + 1)
            self.emit(depth, "}")
        elif isinstance(sk, Urng):
            self.urng(target, sk, depth)
        else:
            raise CodegenError(f"unsupported local Skolem {sk!r}")

    def urng(self, target: str, u: Urng, depth: int):
        real = u.sort is Sort.REAL
        lo = self.cfg.real_min if real else self.cfg.int_min
        hi = self.cfg.real_max if real else self.cfg.int_max
        if u.lower is not None:
            lo = self.term(u.lower, u.sort)
        if u.upper is not None:
            hi = self.term(u.upper, u.sort)
        fn = "RandValReal" if real else "RandVal"
        call = f"{fn}({self.flag(u.lclosed)}, {self.flag(u.uclosed)}, {lo}, {hi})"
        if not u.H:
            self.emit(depth, f"{target} = {call};")
            return
        avoid = " || ".join(self.avoid_test(target, h, u.sort) for h in u.H)
        if real:
            self.emit(depth, "do {")
            self.emit(depth + 1, f"{target} = {call};")
            self.emit(depth, f"}} while ({avoid});")
            return
        self.emit(depth, "{")
        self.emit(depth + 1, "int tries = 0;")
        self.emit(depth + 1, "do {")
        self.emit(depth + 2, f"{target} = {call};")
        self.emit(depth + 1, f"}} while (({avoid}) && ++tries < {AVOID_TRIES});")
        self.emit(depth + 1, f"if ({avoid}) {{")
        self.emit(depth + 2, f"{target} = ({self.flag(u.lclosed)}) ? {lo} : {lo} + 1;")
        self.emit(depth + 2, f"while ({avoid}) {{")
        self.emit(depth + 3, f"{target}++;")
        self.emit(depth + 2, "}")
        self.emit(depth + 1, "}")
        self.emit(depth, "}")

    def avoid_test(self, target: str, h: Term, sort: Sort) -> str:
        if sort is Sort.REAL:
            return f"{target} == {self.term(h, sort, prec=True)}"
        d = lcm(*(c.denominator for _, c in h.coeffs), h.const.denominator)
        if d == 1:
            return f"{target} == {self.term(h, sort, prec=True)}"
        scaled = h * d
        return f"{d} * {target} == {self._paren(self._sum(scaled.coeffs, scaled.const, sort), scaled)}"

    @staticmethod
    def _paren(s, t):
        return f"({s})" if len(t.coeffs) + (1 if t.const else 0) > 1 else s


def _header(needs_div: bool, with_randval_h: bool = False) -> list:
    out = ["#include <limits.h>", "#include <float.h>", "#include <stdbool.h>"]
    if with_randval_h:
        # the generator prototypes come from the bundled randval.h
        out += ['#include "randval.h"', ""]
    else:
        out += [
            "",
            "int RandVal(bool lflag, bool uflag, int lbound, int ubound);",
            "double RandValReal(bool lflag, bool uflag, double lbound, double ubound);",
            "",
        ]
    if needs_div:
        out += [
            "static int rs_floordiv(int a, int k)",
            "{",
            "  int q = a / k;",
            "  return (a % k != 0 && ((a < 0) != (k < 0))) ? q - 1 : q;",
            "}",
            "",
        ]
    return out


def emit_c(tree, contract, y_init=None, cfg: EmitConfig = EmitConfig()) -> str:
    """C source for one witness; ``y_init`` maps outputs to their initial values."""
    w = _CWriter(contract, cfg)
    w.lines = []
    if contract.inputs:
        w.lines.append("/* inputs */")
        for v in contract.inputs:
            w.lines.append(f"{_ctype(v.sort)} {w.var(v)};")
    if contract.outputs:
        w.lines.append("/* outputs */")
        for v in contract.outputs:
            w.lines.append(f"{_ctype(v.sort)} {w.var(v)};")
    w.lines.append("")
    w.lines.append("void init(void) {")
    for v in contract.outputs:
        val = (y_init or {}).get(v, Fraction(0))
        w.emit(1, f"{w.var(v)} = {w.const_signed(Fraction(val), Sort.REAL if v.sort is Sort.REAL else Sort.INT)};")
    w.lines.append("}")
    w.lines.append("")
    w.lines.append("void skolem(void) {")
    for v in contract.outputs:
        w.emit(1, f"{_ctype(v.sort)} {w.var(v.prime())};")
    branches = tree.branches
    if len(branches) == 1:
        for y, sk in branches[0].leaf:
            w.skolem(y, sk, 1)
    else:
        for i, b in enumerate(branches):
            if i == 0:
                w.emit(1, f"if ({w.flag(b.guard)}) {{")
            elif i < len(branches) - 1:
                w.emit(1, f"}} else if ({w.flag(b.guard)}) {{")
            else:
                w.emit(1, "} else {")
            for y, sk in b.leaf:
                w.skolem(y, sk, 2)
        w.emit(1, "}")
    for v in contract.outputs:
        w.emit(1, f"{w.var(v)} = {w.var(v.prime())};")
    w.lines.append("}")
    body = w.lines
    needs_div = any("rs_floordiv(" in line for line in body)
    head = [f"/* witness for contract {contract.name} ({tree.mode} mode) */"] + _header(needs_div, cfg.emit_randval)
    return "\n".join(head + body) + "\n"


RANDVAL_H = """\
#ifndef RANDVAL_H
#define RANDVAL_H
#include <stdbool.h>

int RandVal(bool lflag, bool uflag, int lbound, int ubound);
double RandValReal(bool lflag, bool uflag, double lbound, double ubound);

#endif
"""

RANDVAL_C = """\
/* Default uniform generators for synthesized witnesses. */
#include <float.h>
#include <limits.h>
#include <stdlib.h>
#include "randval.h"

static unsigned long long rv_bits(void)
{
  unsigned long long r = 0;
  int i;
  for (i = 0; i < 5; i++)
    r = (r << 15) ^ (unsigned long long)(rand() & 0x7FFF);
  return r;
}

/* uniform integer in [lo, hi] by rejection, hi - lo < 2^63 */
static long long rv_range(long long lo, long long hi)
{
  unsigned long long range = (unsigned long long)(hi - lo) + 1ULL;
  unsigned long long limit = ULLONG_MAX - ULLONG_MAX % range;
  unsigned long long r;
  do {
    r = rv_bits();
  } while (r >= limit);
  return lo + (long long)(r % range);
}

int RandVal(bool lflag, bool uflag, int lbound, int ubound)
{
  long long min = lflag ? (long long)lbound : (long long)lbound + 1;
  long long max = uflag ? (long long)ubound : (long long)ubound - 1;
  if (max < min)
    return (int)min;
  return (int)rv_range(min, max);
}

/* grid point lbound + (ubound - lbound) * k / 2^32; open sides exclude k = 0 or 2^32 */
double RandValReal(bool lflag, bool uflag, double lbound, double ubound)
{
  const long long steps = 1LL << 32;
  long long kmin = lflag ? 0 : 1;
  long long kmax = uflag ? steps : steps - 1;
  if (lbound <= -DBL_MAX && ubound >= DBL_MAX) {
    lbound = -(double)WINDOW;
    ubound = (double)WINDOW;
  } else if (lbound <= -DBL_MAX) {
    lbound = ubound - (double)WINDOW;
    kmin = 0;
  } else if (ubound >= DBL_MAX) {
    ubound = lbound + (double)WINDOW;
    kmax = steps;
  }
  return lbound + (ubound - lbound) * ((double)rv_range(kmin, kmax) / (double)steps);
}
""".replace("WINDOW", str(REAL_WINDOW))


def emit_randval_default() -> tuple:
    """Header and source of the default generators."""
    return RANDVAL_H, RANDVAL_C


# ---------------------------------------------------------------- SMT-LIB


def _paths(tree):
    """(path condition, branch) pairs under first-match guard selection."""
    out = []
    earlier = []
    for i, b in enumerate(tree.branches):
        last = i == len(tree.branches) - 1
        cond = conj(*(neg(g) for g in earlier)) if last else conj(b.guard, *(neg(g) for g in earlier))
        out.append((cond, b))
        earlier.append(b.guard)
    return out


def emit_smtlib(tree, contract, F=None) -> str:
    """Witness as ``define-fun`` terms over declared generator constants.

    Each generator call site gets a constant whose postconditions
    are asserted under the path that reaches it.  The closing query is unsat
    exactly when the witness satisfies the guarantees from every viable state.
    """
    outs = contract.outputs
    sk_var = {y.prime(): Var("skolem_" + y.name, y.sort) for y in outs}
    sigma = dict(sk_var)
    lines = [f"; witness for contract {contract.name} ({tree.mode} mode)", "(set-logic ALL)"]
    lines += [declare(v) for v in contract.inputs + outs]
    posts, rngs = [], []

    def sk_smt(y, sk, path, sort):
        if isinstance(sk, Assign):
            return term_to_smt(sk.term.substitute(sigma), sort)
        if isinstance(sk, GuardedPair):
            c = sk.cond.substitute(sigma)
            return (f"(ite {to_smt(c)} {sk_smt(y, sk.then, conj(path, c), sort)} "
                    f"{sk_smt(y, sk.other, conj(path, neg(c)), sort)})")
        name = f"rng_{len(rngs)}"
        r = Var(name, sk.sort)
        rngs.append(r)
        facts = []
        for h in sk.H:
            facts.append(mk_lit(r.term(), "!=", h.substitute(sigma)))
        if sk.lower is not None:
            lo = sk.lower.substitute(sigma)
            lc = sk.lclosed.substitute(sigma)
            facts.append(mk_ite(lc, mk_lit(r.term(), ">=", lo), mk_lit(r.term(), ">", lo)))
        if sk.upper is not None:
            hi = sk.upper.substitute(sigma)
            uc = sk.uclosed.substitute(sigma)
            facts.append(mk_ite(uc, mk_lit(r.term(), "<=", hi), mk_lit(r.term(), "<", hi)))
        if y.sort is Sort.BOOL:
            facts.append(mk_lit(r.term(), ">=", 0))
            facts.append(mk_lit(r.term(), "<=", 1))
        if facts:
            posts.append(f"(assert (=> {to_smt(path)} {to_smt(conj(*facts))}))")
        return name

    defs = []
    for y in outs:
        yp = y.prime()
        sort = Sort.INT if y.sort is Sort.BOOL else y.sort
        body = None
        for path, b in reversed(_paths(tree)):
            sk = dict(b.leaf)[yp]
            e = sk_smt(y, sk, path, sort)
            body = e if body is None else f"(ite {to_smt(b.guard)} {e} {body})"
        if y.sort is Sort.BOOL:
            body = f"(= {body} 1)"
        defs.append((sk_var[yp], body))
    for r in rngs:
        lines.append(declare(r))
    for v, body in defs:
        lines.append(f"(define-fun {v.name} () {v.sort.value} {body})")
    lines += posts
    premise = conj(contract.A, F) if F is not None else contract.A
    goal = contract.G_T
    if F is not None:
        goal = conj(goal, contract.primed(F))
    lines.append("; the witness is sound iff the following is unsat")
    lines.append(f"(assert {to_smt(premise)})")
    lines.append(f"(assert (not {to_smt(goal.substitute(sigma))}))")
    lines.append("(check-sat)")
    return "\n".join(lines) + "\n"

