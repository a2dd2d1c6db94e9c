"""Lexer and recursive-descent parser for contract nodes.

Grammar (informal)::

    node ID ( params ) returns ( params ) ; [var decls] let stmts tel [;]

Statements are equations ``ID = expr;``, ``assert expr;`` and pragma comments
``--%PROPERTY id;``, ``--%REALIZABLE id, ...;`` and ``--%MAIN;``.
"""
from __future__ import annotations

import re
import warnings
from fractions import Fraction

from .ast import (
    Binary,
    BoolLit,
    Decl,
    Equation,
    Ident,
    IfThenElse,
    Node,
    Num,
    Pos,
    Program,
    Unary,
)


class LustreSyntaxError(SyntaxError):
    def __init__(self, msg, pos: Pos = None):
        where = f"{pos.line}:{pos.col}: " if pos else ""
        super().__init__(where + msg)
        self.pos = pos


KEYWORDS = {
    "node", "returns", "var", "let", "tel", "assert", "pre", "if", "then", "else",
    "and", "or", "xor", "not", "true", "false", "div", "mod", "int", "real", "bool", "ite",
}
KNOWN_PRAGMAS = {"PROPERTY", "REALIZABLE", "MAIN"}

_TOKENS = [
    ("PRAGMA", r"--%[A-Za-z_]+[^\n]*"),
    ("COMMENT", r"--[^\n]*|\(\*.*?\*\)|/\*.*?\*/"),
    ("WS", r"[ \t\r\n]+"),
    ("REAL", r"\d+\.\d*(?:[eE][-+]?\d+)?|\d+[eE][-+]?\d+"),
    ("INT", r"\d+"),
    ("ID", r"[A-Za-z_][A-Za-z0-9_]*"),
    ("OP", r"->|=>|<>|<=|>=|[-+*/=<>(),;:]"),
]
_LEX = re.compile("|".join(f"(?P<{n}>{p})" for n, p in _TOKENS), re.S)


class Tok:
    __slots__ = ("kind", "text", "pos")

    def __init__(self, kind, text, pos):
        self.kind, self.text, self.pos = kind, text, pos

    def __repr__(self):
        return f"{self.kind}:{self.text!r}@{self.pos}"


def tokenize(text: str):
    toks = []
    i, line, col = 0, 1, 1
    while i < len(text):
        m = _LEX.match(text, i)
        if not m:
            raise LustreSyntaxError(f"unexpected character {text[i]!r}", Pos(line, col))
        kind = m.lastgroup
        s = m.group()
        pos = Pos(line, col)
        if kind == "ID" and s in KEYWORDS:
            kind = "KW"
        if kind not in ("WS", "COMMENT"):
            toks.append(Tok(kind, s, pos))
        nl = s.count("\n")
        if nl:
            line += nl
            col = len(s) - s.rfind("\n")
        else:
            col += len(s)
        i = m.end()
    toks.append(Tok("EOF", "", Pos(line, col)))
    return toks


def _pragma(tok: Tok):
    m = re.match(r"--%([A-Za-z_]+)\s*(.*)", tok.text)
    key, rest = m.group(1), m.group(2).strip()
    if not rest.endswith(";"):
        raise LustreSyntaxError(f"pragma --%{key} must end with ';'", tok.pos)
    args = [a for a in re.split(r"[\s,]+", rest[:-1].strip()) if a]
    return key.upper(), args


class Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    # -- token helpers
    @property
    def cur(self) -> Tok:
        return self.toks[self.i]

    def at(self, text) -> bool:
        return self.cur.text == text and self.cur.kind in ("KW", "OP")

    def eat(self, text) -> Tok:
        if not self.at(text):
            raise LustreSyntaxError(f"expected {text!r}, found {self.cur.text or 'end of input'!r}", self.cur.pos)
        t = self.cur
        self.i += 1
        return t

    def ident(self) -> Tok:
        if self.cur.kind != "ID":
            raise LustreSyntaxError(f"expected identifier, found {self.cur.text or 'end of input'!r}", self.cur.pos)
        t = self.cur
        self.i += 1
        return t

    # -- declarations
    def program(self) -> Program:
        nodes = []
        pending_main = False
        while self.cur.kind != "EOF":
            if self.cur.kind == "PRAGMA":
                key, _ = _pragma(self.cur)
                if key == "MAIN":
                    pending_main = True
                else:
                    warnings.warn(f"{self.cur.pos}: pragma --%{key} outside a node ignored")
                self.i += 1
                continue
            nodes.append(self.node(pending_main))
            pending_main = False
        if not nodes:
            raise LustreSyntaxError("no node found", self.cur.pos)
        return Program(tuple(nodes))

    def params(self, closing=")"):
        out = []
        if self.at(closing):
            return out
        while True:
            names = [self.ident()]
            while self.at(","):
                self.eat(",")
                names.append(self.ident())
            self.eat(":")
            ty = self.type_()
            out.extend(Decl(n.text, ty, n.pos) for n in names)
            if self.at(";"):
                self.eat(";")
                if self.at(closing):
                    break
                continue
            break
        return out

    def type_(self) -> str:
        t = self.cur
        if t.kind == "KW" and t.text in ("int", "real", "bool"):
            self.i += 1
            return t.text
        raise LustreSyntaxError(f"unknown type {t.text!r}", t.pos)

    def node(self, main=False) -> Node:
        start = self.eat("node")
        name = self.ident().text
        self.eat("(")
        params = self.params()
        self.eat(")")
        self.eat("returns")
        self.eat("(")
        returns = self.params()
        self.eat(")")
        if self.at(";"):
            self.eat(";")
        locals_ = []
        if self.at("var"):
            self.eat("var")
            while self.cur.kind == "ID":
                names = [self.ident()]
                while self.at(","):
                    self.eat(",")
                    names.append(self.ident())
                self.eat(":")
                ty = self.type_()
                self.eat(";")
                locals_.extend(Decl(n.text, ty, n.pos) for n in names)
        self.eat("let")
        eqs, asserts, props, real = [], [], [], []
        while not self.at("tel"):
            t = self.cur
            if t.kind == "EOF":
                raise LustreSyntaxError("missing 'tel'", t.pos)
            if t.kind == "PRAGMA":
                key, args = _pragma(t)
                self.i += 1
                if key == "PROPERTY":
                    if len(args) != 1:
                        raise LustreSyntaxError("--%PROPERTY takes one identifier", t.pos)
                    props.append(args[0])
                elif key == "REALIZABLE":
                    real.extend(args)
                elif key == "MAIN":
                    main = True
                else:
                    warnings.warn(f"{t.pos}: unknown pragma --%{key} ignored")
                continue
            if self.at("assert"):
                self.eat("assert")
                asserts.append(self.expr())
                self.eat(";")
                continue
            lhs = self.ident()
            self.eat("=")
            rhs = self.expr()
            self.eat(";")
            eqs.append(Equation(lhs.text, rhs, lhs.pos))
        self.eat("tel")
        if self.at(";"):
            self.eat(";")
        if not props:
            raise LustreSyntaxError(f"node {name} declares no --%PROPERTY", start.pos)
        return Node(name, tuple(params), tuple(returns), tuple(locals_), tuple(eqs), tuple(asserts),
                    tuple(props), tuple(real), main, start.pos)

    # -- expressions, lowest precedence first
    def expr(self):
        if self.at("if"):
            t = self.eat("if")
            c = self.expr()
            self.eat("then")
            a = self.expr()
            self.eat("else")
            b = self.expr()
            return IfThenElse(c, a, b, t.pos)
        return self.arrow()

    def arrow(self):
        left = self.implies()
        if self.at("->"):
            t = self.eat("->")
            return Binary("->", left, self.expr(), t.pos)
        return left

    def implies(self):
        left = self.disj()
        if self.at("=>"):
            t = self.eat("=>")
            return Binary("=>", left, self.implies(), t.pos)
        return left

    def disj(self):
        left = self.conj()
        while self.at("or") or self.at("xor"):
            t = self.cur
            self.i += 1
            left = Binary(t.text, left, self.conj(), t.pos)
        return left

    def conj(self):
        left = self.negation()
        while self.at("and"):
            t = self.eat("and")
            left = Binary("and", left, self.negation(), t.pos)
        return left

    def negation(self):
        if self.at("not"):
            t = self.eat("not")
            return Unary("not", self.negation(), t.pos)
        return self.comparison()

    def comparison(self):
        left = self.additive()
        for op in ("=", "<>", "<=", ">=", "<", ">"):
            if self.at(op):
                t = self.eat(op)
                return Binary(op, left, self.additive(), t.pos)
        return left

    def additive(self):
        left = self.multiplicative()
        while self.at("+") or self.at("-"):
            t = self.cur
            self.i += 1
            left = Binary(t.text, left, self.multiplicative(), t.pos)
        return left

    def multiplicative(self):
        left = self.unary()
        while self.at("*") or self.at("/") or self.at("div") or self.at("mod"):
            t = self.cur
            self.i += 1
            left = Binary(t.text, left, self.unary(), t.pos)
        return left

    def unary(self):
        if self.at("-"):
            t = self.eat("-")
            return Unary("-", self.unary(), t.pos)
        if self.at("pre"):
            t = self.eat("pre")
            return Unary("pre", self.unary(), t.pos)
        if self.at("not"):
            return self.negation()
        return self.primary()

    def primary(self):
        t = self.cur
        if t.kind == "INT":
            self.i += 1
            return Num(Fraction(int(t.text)), False, t.pos)
        if t.kind == "REAL":
            self.i += 1
            return Num(Fraction(t.text), True, t.pos)
        if t.kind == "ID":
            self.i += 1
            return Ident(t.text, t.pos)
        if self.at("true") or self.at("false"):
            self.i += 1
            return BoolLit(t.text == "true", t.pos)
        if self.at("("):
            self.eat("(")
            e = self.expr()
            self.eat(")")
            return e
        if self.at("if"):
            return self.expr()
        if self.at("ite"):
            self.eat("ite")
            self.eat("(")
            c = self.expr()
            self.eat(",")
            a = self.expr()
            self.eat(",")
            b = self.expr()
            self.eat(")")
            return IfThenElse(c, a, b, t.pos)
        raise LustreSyntaxError(f"unexpected {t.text or 'end of input'!r}", t.pos)


def parse(text: str) -> Program:
    return Parser(text).program()


def parse_file(path) -> Program:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())
