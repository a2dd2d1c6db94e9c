"""Model-based projection of existential variables from conjunctions of literals.

Reals use a model-guided virtual substitution (the greatest lower bound under
the model, or an infinitesimal above it, or minus infinity).  Integers use a
Cooper-style projection with all bounds in closed form, so substituting the
model-greatest lower bound itself is exact and no divisibility residue is
left behind.  When the variable sits under a ``div`` the atoms are first
linearized at the model's residues and the projection keeps the resulting
divisibility constraints (written as ``s - k*div(s, k) = 0``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .logic.expr import TRUE, FALSE, Div, Lit, Sort, Term, Var, canonicalize, mk_div, mk_lit
from .logic.ops import isolate


class MbpPreconditionError(ValueError):
    """The model does not satisfy the constraints handed to projection."""


@dataclass(frozen=True)
class Projection:
    eliminated: tuple
    precondition: tuple  # y-free literals
    source: tuple
    residuals: dict = field(default_factory=dict, compare=False)
    stages: tuple = field(default=(), compare=False)
    # closed-form witnesses for variables eliminated through divisibility
    witnesses: dict = field(default_factory=dict, compare=False)


def _mentions(lit, y: Var) -> bool:
    return y in lit.vars()


def _add(out: list, seen: set, lit):
    if lit == TRUE:
        return
    if lit == FALSE:
        raise AssertionError("projection produced a literal falsified by construction")
    if lit not in seen:
        seen.add(lit)
        out.append(lit)


def _check(lits, m):
    for l in lits:
        if not l.holds(m):
            raise MbpPreconditionError(f"model does not satisfy {l}")


def project_one(y: Var, lits, m, witnesses=None):
    """Eliminate one variable; returns (residual literals, projected literals).

    If ``witnesses`` is a dict and the elimination had to go through
    divisibility reasoning, the closed-form value used for ``y`` is stored there.
    """
    with_y = [l for l in lits if _mentions(l, y)]
    out, seen = [], set()
    for l in lits:
        if not _mentions(l, y):
            _add(out, seen, l)
    if not with_y:
        return [], out
    if y.sort is Sort.BOOL:
        return with_y, out
    if y.sort is Sort.REAL:
        derived = _project_real(y, with_y, m)
    elif any(_under_div(l.term, y) for l in with_y):
        derived, w = _project_int_dvd(y, with_y, m)
        if witnesses is not None:
            witnesses[y] = w
    else:
        derived = _project_int(y, with_y, m)
    for l in derived:
        _add(out, seen, l)
    return with_y, out


def _pick_eq(cands):
    return min(cands, key=lambda c: str(c[1].bound))


def _project_real(y, with_y, m):
    iso = [(l, isolate(l, y)) for l in with_y]
    eqs = [c for c in iso if c[1].op == "="]
    if eqs:
        lit, e = _pick_eq(eqs)
        return [l.substitute({y: e.bound}) for l, _ in iso if l is not lit]
    lowers = [c for c in iso if c[1].op in (">", ">=")]
    if not lowers:
        # y -> -infinity satisfies every upper bound and disequality
        return []
    vy = m[y]

    def rank(c):
        val = c[1].bound.evaluate(m)
        return (-val, 0 if c[1].op == ">" else 1, str(c[1].bound))

    _, g = min(lowers, key=rank)
    glb = g.bound
    eps = vy > glb.evaluate(m)
    out = []
    for _, i in iso:
        b = i.bound
        if i.op in ("<", "<="):
            out.append(mk_lit(glb, "<" if (eps or i.op == "<") else "<=", b))
        elif i.op in (">", ">="):
            out.append(mk_lit(glb, ">=" if (eps or i.op == ">=") else ">", b))
        elif i.op == "!=":
            if not eps:
                out.append(mk_lit(glb, "!=", b))
    return out


def _project_int(y, with_y, m):
    iso = []
    for l in with_y:
        i = isolate(l, y)
        if i.op == "!=":
            # resolve the disequality by the side the model lies on
            below = Lit(l.term, "<")
            l = canonicalize(below if below.holds(m) else Lit(l.term, ">"))
            i = isolate(l, y)
        iso.append((l, i))
    eqs = [c for c in iso if c[1].op == "="]
    if eqs:
        lit, e = _pick_eq(eqs)
        out = [e.side]
        out += [l.substitute({y: e.bound}) for l, _ in iso if l is not lit]
        return out
    lowers = [c for c in iso if c[1].op == ">="]
    if not lowers:
        return []

    def rank(c):
        return (-c[1].bound.evaluate(m), str(c[1].bound))

    _, g = min(lowers, key=rank)
    glb = g.bound
    out = []
    for _, i in iso:
        if i.op == "<=":
            out.append(mk_lit(glb, "<=", i.bound))
        else:
            out.append(mk_lit(glb, ">=", i.bound))
    return out


# ---------------------------------------------------------------- divisibility


def _under_div(t: Term, y: Var) -> bool:
    return any(isinstance(a, Div) and y in a.vars() for a in t.atoms())


def _lcm(a, b):
    return a * b // math.gcd(a, b)


def _int_scale(t: Term) -> int:
    den = t.const.denominator
    for _, c in t.coeffs:
        den = _lcm(den, c.denominator)
    return den


def _purify(t: Term, y: Var, m, dvds: list) -> Term:
    """Replace every ``div`` containing ``y`` by its linearization at ``m``.

    ``div(e, k)`` equals ``(e - r) / k`` whenever ``k | e - r``; r is the
    residue of e under the model and the divisibility is recorded in ``dvds``
    as a pair ``(k, s)`` meaning ``k | s``.
    """
    if not _under_div(t, y):
        return t
    out = Term.constant(t.const)
    for a, c in t.coeffs:
        if isinstance(a, Div) and y in a.vars():
            e = _purify(a.arg, y, m, dvds)
            r = e.evaluate(m) % a.k
            side = e - r
            sc = _int_scale(side)
            dvds.append((a.k * sc, side * sc))
            out = out + (side / a.k) * c
        else:
            out = out + Term({a: c})
    return out


def _dvd_lit(k: int, s: Term):
    """``k | s`` as a literal over div."""
    if k == 1:
        return TRUE
    if s.is_constant():
        return TRUE if s.const % k == 0 else FALSE
    return mk_lit(s - mk_div(s, k) * k, "=", 0)


def _project_int_dvd(y, with_y, m):
    """Model-guided Cooper elimination with divisibility constraints.

    Returns the projected literals and the value substituted for ``y``.
    """
    dvds, rows = [], []
    for l in with_y:
        t = _purify(l.term, y, m, dvds)
        lit = canonicalize(Lit(t, l.op))
        if lit in (TRUE, FALSE) or y not in lit.vars():
            rows.append((None, lit))
            continue
        if lit.op == "!=":
            lit = canonicalize(Lit(lit.term, "<" if lit.term.evaluate(m) < 0 else ">"))
        a = lit.term.coeff(y)
        rest = lit.term - Term({y: a})
        rows.append((a, (lit.op, rest)))
    # every row now reads a*y + rest op 0 with integral a
    L = 1
    for a, row in rows:
        if a is not None:
            L = _lcm(L, abs(int(a)))
    dv = []
    for k, s in dvds:
        b = s.coeff(y)
        if not b:
            dv.append((k, s, None))
            continue
        g = s - Term({y: b})
        if b < 0:
            b, g = -b, -g
        L = _lcm(L, int(b))
        dv.append((k, g, int(b)))
    # scale to Y = L*y: bounds become Y op f
    lower, upper, eqs, out = [], [], [], []
    for a, row in rows:
        if a is None:
            if row is not TRUE:
                out.append(row)
            continue
        op, rest = row
        f = -rest * (Fraction(L) / a)
        if a < 0:
            op = {"<=": ">=", ">=": "<=", "=": "="}[op]
        if op == "=":
            eqs.append(f)
        elif op == ">=":
            lower.append(f)
        else:
            upper.append(f)
    cong = [(L, Term.constant(0))] if L > 1 else []  # L | Y
    for k, g, b in dv:
        if b is None:
            out.append(_dvd_lit(k, g))
        else:
            # k | b*y + g  <=>  k*(L/b) | Y + (L/b)*g
            q = L // b
            cong.append((k * q, g * q))
    D = 1
    for k, _ in cong:
        D = _lcm(D, k)
    Ym = m[y] * L
    if eqs:
        sub = min(eqs, key=str)
    elif lower:
        glb = min(lower, key=lambda f: (-f.evaluate(m), str(f)))
        sub = glb + (Ym - glb.evaluate(m)) % D
    elif upper:
        lub = min(upper, key=lambda f: (f.evaluate(m), str(f)))
        sub = lub - (lub.evaluate(m) - Ym) % D
    else:
        sub = Term.constant(Ym % D)
    out += [mk_lit(f, "<=", sub) for f in lower]
    out += [mk_lit(sub, "<=", f) for f in upper]
    out += [mk_lit(sub, "=", f) for f in eqs]
    out += [_dvd_lit(k, sub + g) for k, g in cong]
    witness = sub if L == 1 else mk_div(sub, L)
    return [l for l in out if l is not TRUE], witness


def mbp(y: Var, pi, m) -> Projection:
    """Project ``y`` out of the conjunction ``pi`` guided by model ``m``."""
    pi = list(pi)
    _check(pi, m)
    w = {}
    residual, pre = project_one(y, pi, m, w)
    _check(pre, m)
    return Projection((y,), tuple(pre), tuple(pi), {y: tuple(residual)}, witnesses=w)


def project_vector(ys, pi, m) -> Projection:
    """Eliminate ``ys`` right to left.

    ``stages`` lists ``(y, residual, remaining)`` in elimination order, where
    ``remaining`` is the literal set left after eliminating ``y``; it is the
    context under which y's local Skolem is evaluated.
    """
    pi = list(pi)
    _check(pi, m)
    cur = pi
    residuals, witnesses = {}, {}
    stages = []
    for y in reversed(list(ys)):
        residual, cur = project_one(y, cur, m, witnesses)
        residuals[y] = tuple(residual)
        stages.append((y, tuple(residual), tuple(cur)))
    _check(cur, m)
    return Projection(tuple(ys), tuple(cur), tuple(pi), residuals, tuple(stages), witnesses)
