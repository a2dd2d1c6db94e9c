"""Exact linear-arithmetic terms and quantifier-free formulas.

Terms are linear combinations of *atoms* with rational coefficients.  An atom
is a variable, a floor division ``div(t, k)`` by a positive integer constant,
or a term-level ``ite``.  Formulas are trees over relational literals
``term op 0``, boolean variables and the usual connectives.

Every object is immutable and hashable; hashes are cached because formulas
are used heavily as dictionary keys and set members by the synthesis loop.
"""
from __future__ import annotations

import enum
import math
from fractions import Fraction
from typing import Iterable, Mapping, Union

Number = Union[int, Fraction]
Model = Mapping["Var", Fraction]


class SortError(TypeError):
    pass


class Sort(enum.Enum):
    INT = "Int"
    REAL = "Real"
    BOOL = "Bool"

    def __str__(self):
        return self.value


# ---------------------------------------------------------------- atoms


class Var:
    __slots__ = ("name", "sort", "primed", "_hash")

    def __init__(self, name: str, sort: Sort, primed: bool = False):
        self.name = name
        self.sort = sort
        self.primed = primed
        self._hash = hash(("var", name, primed, sort))

    def __eq__(self, other):
        return (
            isinstance(other, Var)
            and self.name == other.name
            and self.primed == other.primed
            and self.sort == other.sort
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Var({self.name!r}, {self.sort.name}{', primed' if self.primed else ''})"

    def __str__(self):
        return self.name + ("'" if self.primed else "")

    @property
    def key(self):
        return (0, self.name, self.primed)

    def prime(self) -> "Var":
        return Var(self.name, self.sort, True)

    def unprime(self) -> "Var":
        return Var(self.name, self.sort, False)

    def term(self) -> "Term":
        return Term({self: Fraction(1)})

    # arithmetic sugar, always producing Terms
    def __add__(self, o):
        return self.term() + o

    __radd__ = __add__

    def __sub__(self, o):
        return self.term() - o

    def __rsub__(self, o):
        return Term.of(o) - self.term()

    def __mul__(self, k):
        return self.term() * k

    __rmul__ = __mul__

    def __neg__(self):
        return -self.term()

    def atoms(self):
        return {self}

    def vars(self):
        return {self}


class Div:
    """Floor division ``div(arg, k)`` of an integer term by a positive constant."""

    __slots__ = ("arg", "k", "_hash", "_key")

    def __init__(self, arg: "Term", k: int):
        if k <= 0:
            raise ValueError("divisor must be a positive integer")
        self.arg = arg
        self.k = int(k)
        self._hash = hash(("div", arg, self.k))
        self._key = None

    sort = Sort.INT

    def __eq__(self, other):
        return isinstance(other, Div) and self.k == other.k and self.arg == other.arg

    def __hash__(self):
        return self._hash

    def __str__(self):
        return f"div({self.arg}, {self.k})"

    __repr__ = __str__

    @property
    def key(self):
        if self._key is None:
            self._key = (1, str(self))
        return self._key

    def vars(self):
        return self.arg.vars()

    def evaluate(self, model: Model) -> Fraction:
        v = self.arg.evaluate(model)
        if v.denominator != 1:
            raise ValueError(f"div applied to non-integer value {v}")
        return Fraction(v.numerator // self.k)


class IteT:
    """Term-level if-then-else; used for symbolic MIN/MAX chains."""

    __slots__ = ("cond", "then", "other", "sort", "_hash", "_key")

    def __init__(self, cond: "Formula", then: "Term", other: "Term", sort: Sort):
        self.cond = cond
        self.then = then
        self.other = other
        self.sort = sort
        self._hash = hash(("ite", cond, then, other))
        self._key = None

    def __eq__(self, other):
        return (
            isinstance(other, IteT)
            and self.cond == other.cond
            and self.then == other.then
            and self.other == other.other
        )

    def __hash__(self):
        return self._hash

    def __str__(self):
        return f"ite({self.cond}, {self.then}, {self.other})"

    __repr__ = __str__

    @property
    def key(self):
        if self._key is None:
            self._key = (2, str(self))
        return self._key

    def vars(self):
        return self.cond.vars() | self.then.vars() | self.other.vars()

    def evaluate(self, model: Model) -> Fraction:
        return (self.then if self.cond.holds(model) else self.other).evaluate(model)


Atom = Union[Var, Div, IteT]


# ---------------------------------------------------------------- terms


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class Term:
    """Linear combination ``sum(c_i * atom_i) + const`` with exact coefficients."""

    __slots__ = ("coeffs", "const", "_hash", "_str")

    def __init__(self, coeffs: Union[Mapping, Iterable] = (), const: Number = 0):
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        merged: dict = {}
        for atom, c in items:
            c = _frac(c)
            if c:
                merged[atom] = merged.get(atom, 0) + c
        self.coeffs = tuple(
            sorted(((a, c) for a, c in merged.items() if c), key=lambda ac: ac[0].key)
        )
        self.const = _frac(const)
        self._hash = hash((self.coeffs, self.const))
        self._str = None

    # -- construction helpers
    @staticmethod
    def constant(c: Number) -> "Term":
        return Term((), c)

    @staticmethod
    def of(x: Union["Term", Var, Number]) -> "Term":
        if isinstance(x, Term):
            return x
        if isinstance(x, Var):
            return x.term()
        if isinstance(x, (Div, IteT)):
            return Term({x: 1})
        return Term((), x)

    # -- structure
    def __eq__(self, other):
        return (
            isinstance(other, Term)
            and self._hash == other._hash
            and self.const == other.const
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return self._hash

    def is_constant(self) -> bool:
        return not self.coeffs

    def coeff(self, atom) -> Fraction:
        for a, c in self.coeffs:
            if a == atom:
                return c
        return Fraction(0)

    def atoms(self):
        return [a for a, _ in self.coeffs]

    def vars(self) -> set:
        out = set()
        for a, _ in self.coeffs:
            out |= a.vars()
        return out

    def mentions(self, v: Var) -> bool:
        for a, _ in self.coeffs:
            if a == v or (not isinstance(a, Var) and v in a.vars()):
                return True
        return False

    @property
    def sort(self):
        """Arithmetic sort of the term, or None for a constant."""
        sorts = set()
        for a, _ in self.coeffs:
            s = a.sort
            if s is Sort.BOOL:
                raise SortError(f"boolean atom {a} used in arithmetic")
            sorts.add(s)
        if len(sorts) > 1:
            raise SortError(f"mixed Int/Real atoms in {self}")
        return sorts.pop() if sorts else None

    # -- arithmetic
    def __add__(self, other):
        other = Term.of(other)
        d = dict(self.coeffs)
        for a, c in other.coeffs:
            d[a] = d.get(a, 0) + c
        return Term(d, self.const + other.const)

    __radd__ = __add__

    def __neg__(self):
        return Term(((a, -c) for a, c in self.coeffs), -self.const)

    def __sub__(self, other):
        return self + (-Term.of(other))

    def __rsub__(self, other):
        return Term.of(other) - self

    def __mul__(self, k):
        if isinstance(k, (Term, Var)):
            k = Term.of(k)
            if not k.is_constant():
                if self.is_constant():
                    return k * self.const
                raise ValueError("non-linear product")
            k = k.const
        k = _frac(k)
        return Term(((a, c * k) for a, c in self.coeffs), self.const * k)

    __rmul__ = __mul__

    def __truediv__(self, k):
        return self * (1 / _frac(k))

    # -- semantics
    def evaluate(self, model: Model) -> Fraction:
        total = self.const
        for a, c in self.coeffs:
            if isinstance(a, Var):
                total += c * model[a]
            else:
                total += c * a.evaluate(model)
        return total

    def substitute(self, sigma: Mapping) -> "Term":
        """Replace variables by terms (or variables); capture-free by construction."""
        if not sigma:
            return self
        acc = Term((), self.const)
        changed = False
        parts = []
        for a, c in self.coeffs:
            if isinstance(a, Var):
                if a in sigma:
                    parts.append(Term.of(sigma[a]) * c)
                    changed = True
                    continue
                parts.append(Term({a: c}))
            elif isinstance(a, Div):
                inner = a.arg.substitute(sigma)
                if inner is not a.arg and inner != a.arg:
                    changed = True
                    parts.append(mk_div(inner, a.k) * c)
                else:
                    parts.append(Term({a: c}))
            else:
                cond = a.cond.substitute(sigma)
                t = a.then.substitute(sigma)
                e = a.other.substitute(sigma)
                if cond != a.cond or t != a.then or e != a.other:
                    changed = True
                    parts.append(mk_ite_term(cond, t, e, a.sort) * c)
                else:
                    parts.append(Term({a: c}))
        if not changed:
            return self
        for p in parts:
            acc = acc + p
        return acc

    # -- printing
    def __str__(self):
        if self._str is None:
            self._str = _format_sum(self.coeffs, self.const)
        return self._str

    def __repr__(self):
        return f"Term({self})"


def _fmt_num(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def _format_sum(coeffs, const) -> str:
    parts = []
    for a, c in coeffs:
        mag = abs(c)
        body = str(a) if mag == 1 else f"{_fmt_num(mag)}*{a}"
        if not parts:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append(("- " if c < 0 else "+ ") + body)
    if const or not parts:
        if not parts:
            parts.append(_fmt_num(const))
        else:
            parts.append(("- " if const < 0 else "+ ") + _fmt_num(abs(const)))
    return " ".join(parts)


def mk_div(arg: Term, k: int) -> Term:
    """``div(arg, k)`` with constant folding."""
    arg = Term.of(arg)
    if k == 1:
        return arg
    if arg.is_constant():
        c = arg.const
        if c.denominator != 1:
            raise ValueError("div of non-integer constant")
        return Term.constant(c.numerator // k)
    return Term({Div(arg, k): 1})


def mk_ite_term(cond: "Formula", then: Term, other: Term, sort: Sort) -> Term:
    if cond is TRUE:
        return then
    if cond is FALSE or then == other:
        return other
    return Term({IteT(cond, then, other, sort): 1})


# ---------------------------------------------------------------- formulas


class Formula:
    __slots__ = ()

    def __and__(self, other):
        return conj(self, other)

    def __or__(self, other):
        return disj(self, other)

    def __invert__(self):
        return neg(self)

    def vars(self) -> set:
        return _formula_vars(self)

    def holds(self, model: Model) -> bool:
        raise NotImplementedError

    def substitute(self, sigma: Mapping) -> "Formula":
        raise NotImplementedError

    def __repr__(self):
        return f"<{type(self).__name__} {self}>"


class Const(Formula):
    __slots__ = ("value",)

    def __init__(self, value: bool):
        self.value = bool(value)

    def __eq__(self, other):
        return isinstance(other, Const) and other.value == self.value

    def __hash__(self):
        return hash(("const", self.value))

    def __str__(self):
        return "true" if self.value else "false"

    def holds(self, model):
        return self.value

    def substitute(self, sigma):
        return self


TRUE = Const(True)
FALSE = Const(False)

OPS = ("<", "<=", "=", "!=", ">=", ">")
NEGATE_OP = {"<": ">=", "<=": ">", "=": "!=", "!=": "=", ">=": "<", ">": "<="}
FLIP_OP = {"<": ">", "<=": ">=", "=": "=", "!=": "!=", ">=": "<=", ">": "<"}


def compare(lhs: Fraction, op: str, rhs: Fraction = 0) -> bool:
    if op == "<":
        return lhs < rhs
    if op == "<=":
        return lhs <= rhs
    if op == "=":
        return lhs == rhs
    if op == "!=":
        return lhs != rhs
    if op == ">=":
        return lhs >= rhs
    if op == ">":
        return lhs > rhs
    raise ValueError(op)


class Lit(Formula):
    """Relational atom ``term op 0``."""

    __slots__ = ("term", "op", "_hash")

    def __init__(self, term: Term, op: str):
        if op not in NEGATE_OP:
            raise ValueError(f"unknown relation {op!r}")
        self.term = term
        self.op = op
        self._hash = hash(("lit", term, op))

    def __eq__(self, other):
        return (
            isinstance(other, Lit)
            and self._hash == other._hash
            and self.op == other.op
            and self.term == other.term
        )

    def __hash__(self):
        return self._hash

    def holds(self, model):
        return compare(self.term.evaluate(model), self.op)

    def substitute(self, sigma):
        t = self.term.substitute(sigma)
        if t is self.term:
            return self
        return canonicalize(Lit(t, self.op))

    def mentions(self, v: Var) -> bool:
        return self.term.mentions(v)

    def __str__(self):
        t = self.term
        lhs = Term(t.coeffs, 0)
        if not t.coeffs:
            return f"{_fmt_num(t.const)} {self.op} 0"
        return f"{lhs} {self.op} {_fmt_num(-t.const)}"


class BoolVar(Formula):
    __slots__ = ("var", "_hash")

    def __init__(self, var: Var):
        if var.sort is not Sort.BOOL:
            raise SortError(f"{var} is not boolean")
        self.var = var
        self._hash = hash(("bvar", var))

    def __eq__(self, other):
        return isinstance(other, BoolVar) and other.var == self.var

    def __hash__(self):
        return self._hash

    def __str__(self):
        return str(self.var)

    def holds(self, model):
        return bool(model[self.var])

    def substitute(self, sigma):
        if self.var in sigma:
            r = sigma[self.var]
            if isinstance(r, Var):
                return BoolVar(r)
            if isinstance(r, Formula):
                return r
            raise SortError(f"cannot substitute {r} for boolean {self.var}")
        return self


class Not(Formula):
    __slots__ = ("arg", "_hash")

    def __init__(self, arg: Formula):
        self.arg = arg
        self._hash = hash(("not", arg))

    def __eq__(self, other):
        return isinstance(other, Not) and other.arg == self.arg

    def __hash__(self):
        return self._hash

    def __str__(self):
        return f"!{_paren(self.arg)}"

    def holds(self, model):
        return not self.arg.holds(model)

    def substitute(self, sigma):
        return neg(self.arg.substitute(sigma))


class _NAry(Formula):
    __slots__ = ("args", "_hash")
    _tag = ""

    def __init__(self, args):
        self.args = tuple(args)
        self._hash = hash((self._tag, self.args))

    def __eq__(self, other):
        return type(other) is type(self) and self._hash == other._hash and other.args == self.args

    def __hash__(self):
        return self._hash


class And(_NAry):
    __slots__ = ()
    _tag = "and"

    def __str__(self):
        return " & ".join(_paren(a) for a in self.args)

    def holds(self, model):
        return all(a.holds(model) for a in self.args)

    def substitute(self, sigma):
        return conj(*(a.substitute(sigma) for a in self.args))


class Or(_NAry):
    __slots__ = ()
    _tag = "or"

    def __str__(self):
        return " | ".join(_paren(a) for a in self.args)

    def holds(self, model):
        return any(a.holds(model) for a in self.args)

    def substitute(self, sigma):
        return disj(*(a.substitute(sigma) for a in self.args))


class Ite(Formula):
    __slots__ = ("cond", "then", "other", "_hash")

    def __init__(self, cond, then, other):
        self.cond, self.then, self.other = cond, then, other
        self._hash = hash(("itef", cond, then, other))

    def __eq__(self, other):
        return (
            isinstance(other, Ite)
            and other.cond == self.cond
            and other.then == self.then
            and other.other == self.other
        )

    def __hash__(self):
        return self._hash

    def __str__(self):
        return f"ite({self.cond}, {self.then}, {self.other})"

    def holds(self, model):
        return (self.then if self.cond.holds(model) else self.other).holds(model)

    def substitute(self, sigma):
        return mk_ite(
            self.cond.substitute(sigma), self.then.substitute(sigma), self.other.substitute(sigma)
        )


def _paren(f: Formula) -> str:
    return f"({f})" if isinstance(f, (And, Or)) else str(f)


_VARS_CACHE: dict = {}


def _formula_vars(f: Formula) -> set:
    hit = _VARS_CACHE.get(f)
    if hit is not None:
        return hit
    if isinstance(f, Lit):
        out = f.term.vars()
    elif isinstance(f, BoolVar):
        out = {f.var}
    elif isinstance(f, Not):
        out = _formula_vars(f.arg)
    elif isinstance(f, _NAry):
        out = set()
        for a in f.args:
            out |= _formula_vars(a)
    elif isinstance(f, Ite):
        out = _formula_vars(f.cond) | _formula_vars(f.then) | _formula_vars(f.other)
    else:
        out = set()
    out = frozenset(out)
    if len(_VARS_CACHE) > 200_000:
        _VARS_CACHE.clear()
    _VARS_CACHE[f] = out
    return out


# ---------------------------------------------------------------- smart constructors


def conj(*args: Formula) -> Formula:
    out = []
    seen = set()
    stack = list(reversed(args))
    while stack:
        a = stack.pop()
        if isinstance(a, And):
            stack.extend(reversed(a.args))
            continue
        if a == TRUE:
            continue
        if a == FALSE:
            return FALSE
        if a not in seen:
            seen.add(a)
            out.append(a)
    if not out:
        return TRUE
    if len(out) == 1:
        return out[0]
    return And(out)


def disj(*args: Formula) -> Formula:
    out = []
    seen = set()
    stack = list(reversed(args))
    while stack:
        a = stack.pop()
        if isinstance(a, Or):
            stack.extend(reversed(a.args))
            continue
        if a == FALSE:
            continue
        if a == TRUE:
            return TRUE
        if a not in seen:
            seen.add(a)
            out.append(a)
    if not out:
        return FALSE
    if len(out) == 1:
        return out[0]
    return Or(out)


def neg(f: Formula) -> Formula:
    if isinstance(f, Const):
        return FALSE if f.value else TRUE
    if isinstance(f, Not):
        return f.arg
    if isinstance(f, Lit):
        return canonicalize(Lit(f.term, NEGATE_OP[f.op]))
    return Not(f)


def implies(a: Formula, b: Formula) -> Formula:
    return disj(neg(a), b)


def iff(a: Formula, b: Formula) -> Formula:
    return disj(conj(a, b), conj(neg(a), neg(b)))


def mk_ite(c: Formula, t: Formula, e: Formula) -> Formula:
    if c == TRUE:
        return t
    if c == FALSE:
        return e
    if t == e:
        return t
    return Ite(c, t, e)


def mk_lit(lhs, op: str, rhs=0) -> Formula:
    """Canonical literal for ``lhs op rhs``."""
    return canonicalize(Lit(Term.of(lhs) - Term.of(rhs), op))


# ---------------------------------------------------------------- canonical form


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


def canonicalize(lit: Lit) -> Formula:
    """Move everything left, normalize scale and sign.

    Integer literals get integral coefficients with gcd 1 and are tightened to
    non-strict form (``t < 0`` becomes ``t + 1 <= 0``); real literals get a
    leading coefficient of 1.  Ground literals fold to TRUE/FALSE.
    """
    t, op = lit.term, lit.op
    if not t.coeffs:
        return TRUE if compare(t.const, op) else FALSE
    sort = t.sort
    atoms = [a for a, _ in t.coeffs]
    cs = [c for _, c in t.coeffs]
    const = t.const
    if sort is Sort.INT:
        den = 1
        for c in cs:
            den = _lcm(den, c.denominator)
        den = _lcm(den, const.denominator)
        ics = [int(c * den) for c in cs]
        ic = const * den
        # const may stay fractional only if den already absorbed it; it is integral here
        ic = int(ic)
        if op == "<":
            ic += 1
            op = "<="
        elif op == ">":
            ic -= 1
            op = ">="
        g = 0
        for c in ics:
            g = math.gcd(g, c)
        if op == "<=":
            ic = -((-ic) // g)  # ceil
        elif op == ">=":
            ic = ic // g  # floor
        else:
            if ic % g:
                return FALSE if op == "=" else TRUE
            ic //= g
        ics = [c // g for c in ics]
        if ics[0] < 0:
            ics = [-c for c in ics]
            ic = -ic
            op = FLIP_OP[op]
        return Lit(Term(zip(atoms, ics), ic), op)
    lead = cs[0]
    if lead != 1:
        cs = [c / lead for c in cs]
        const = const / lead
        if lead < 0:
            op = FLIP_OP[op]
    return Lit(Term(zip(atoms, cs), const), op)
