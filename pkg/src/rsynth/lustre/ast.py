"""Syntax tree for the contract subset of Lustre, with a pretty-printer."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional


@dataclass(frozen=True)
class Pos:
    line: int
    col: int

    def __str__(self):
        return f"{self.line}:{self.col}"


def _pos():
    return field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Num:
    value: Fraction
    is_real: bool = False
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class BoolLit:
    value: bool
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class Ident:
    name: str
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class Unary:
    op: str  # "-", "not", "pre"
    arg: object
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class Binary:
    op: str
    left: object
    right: object
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class IfThenElse:
    cond: object
    then: object
    other: object
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class Decl:
    name: str
    type: str  # int | real | bool
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class Equation:
    lhs: str
    rhs: object
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class Node:
    name: str
    params: tuple
    returns: tuple
    locals: tuple
    equations: tuple
    asserts: tuple
    properties: tuple
    realizable: tuple
    main: bool = False
    pos: Optional[Pos] = _pos()

    def decl(self, name) -> Optional[Decl]:
        for d in self.params + self.returns + self.locals:
            if d.name == name:
                return d
        return None


@dataclass(frozen=True)
class Program:
    nodes: tuple

    def main(self) -> Node:
        mains = [n for n in self.nodes if n.main]
        if len(mains) == 1:
            return mains[0]
        if len(self.nodes) == 1 and not mains:
            return self.nodes[0]
        raise ValueError("exactly one node must be marked --%MAIN when several nodes are present")


# ---------------------------------------------------------------- printing

def _num(n: Num) -> str:
    v = n.value
    if not n.is_real:
        return str(v.numerator)
    if v.denominator == 1:
        return f"{v.numerator}.0"
    # exact decimal when the denominator allows it, else a quotient
    d = v.denominator
    k = 0
    while d % 2 == 0 or d % 5 == 0:
        d //= 2 if d % 2 == 0 else 5
        k += 1
    if d == 1:
        s = str(int(v * 10 ** k))
        neg = s.startswith("-")
        s = s.lstrip("-").rjust(k + 1, "0")
        out = s[:-k] + "." + s[-k:]
        return ("-" if neg else "") + out
    return f"({v.numerator}.0 / {v.denominator}.0)"


def pretty_expr(e) -> str:
    if isinstance(e, Num):
        s = _num(e)
        return f"({s})" if s.startswith("-") else s
    if isinstance(e, BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, Ident):
        return e.name
    if isinstance(e, Unary):
        if e.op == "pre":
            return f"pre({pretty_expr(e.arg)})"
        if e.op == "not":
            return f"(not {pretty_expr(e.arg)})"
        return f"(-{pretty_expr(e.arg)})"
    if isinstance(e, Binary):
        return f"({pretty_expr(e.left)} {e.op} {pretty_expr(e.right)})"
    if isinstance(e, IfThenElse):
        return f"(if {pretty_expr(e.cond)} then {pretty_expr(e.then)} else {pretty_expr(e.other)})"
    raise TypeError(e)


def _decls(ds, sep) -> str:
    return sep.join(f"{d.name} : {d.type}" for d in ds)


def pretty_node(n: Node) -> str:
    lines = [f"node {n.name}({_decls(n.params, '; ')}) returns ({_decls(n.returns, '; ')});"]
    if n.locals:
        lines.append("var")
        lines.extend(f"  {d.name} : {d.type};" for d in n.locals)
    lines.append("let")
    if n.main:
        lines.append("  --%MAIN;")
    for a in n.asserts:
        lines.append(f"  assert {pretty_expr(a)};")
    for eq in n.equations:
        lines.append(f"  {eq.lhs} = {pretty_expr(eq.rhs)};")
    for p in n.properties:
        lines.append(f"  --%PROPERTY {p};")
    if n.realizable:
        lines.append(f"  --%REALIZABLE {', '.join(n.realizable)};")
    lines.append("tel")
    return "\n".join(lines) + "\n"


def pretty(p: Program) -> str:
    return "\n".join(pretty_node(n) for n in p.nodes)
