"""Conjunctive theory solver: Fourier-Motzkin with model reconstruction.

Constraints are triples ``(coeffs, const, op)`` meaning
``sum(coeffs[v] * v) + const  op  0`` with ``op`` in ``<=``, ``<``, ``=``.
Integer variables are handled by gcd tightening, exact elimination of
integer equalities (coefficients are shrunk with the omega test's symmetric
modulo until one becomes a unit) plus branch and bound over the rational
relaxation.
"""
from __future__ import annotations

import math
import time
from functools import lru_cache
from fractions import Fraction

from ..logic.expr import Lit, Var


class SolverTimeout(RuntimeError):
    pass


class SolverIncomplete(RuntimeError):
    """Branch-and-bound gave up (depth or node cap)."""


# each level is one Python frame; stay well inside the default recursion limit
BB_DEPTH = 400
BB_NODES = 20000


@lru_cache(maxsize=65536)
def _lit_constraint(lit: Lit):
    return _translate(lit)


def lit_constraints(lit: Lit):
    """Cached translation; callers get a fresh coefficient dict."""
    coeffs, k, op = _lit_constraint(lit)
    return dict(coeffs), k, op


def _translate(lit: Lit):
    """Translate a canonical literal into a constraint with integer coefficients.

    Disequalities come back with op ``!=``.  Scaling by the (positive) lcm of
    the coefficient denominators keeps the meaning of every operator.
    """
    coeffs = {}
    den = 1
    for a, c in lit.term.coeffs:
        if not isinstance(a, Var):
            raise TypeError(f"theory literal with non-variable atom {a}")
        den = den * c.denominator // math.gcd(den, c.denominator)
    for a, c in lit.term.coeffs:
        coeffs[a] = int(c * den)
    k = lit.term.const * den
    op = lit.op
    if op in ("<=", "<", "=", "!="):
        return coeffs, k, op
    return {v: -c for v, c in coeffs.items()}, -k, "<=" if op == ">=" else "<"


def _holds(val: Fraction, op: str) -> bool:
    if op == "<=":
        return val <= 0
    if op == "<":
        return val < 0
    if op == "=":
        return val == 0
    return val != 0


def _normalize(con, ints):
    """Make coefficients primitive and tighten integer constraints.

    Returns None for a trivially true constraint and False for a trivially
    false one.
    """
    coeffs, const, op = con
    if not coeffs:
        return None if _holds(const, op) else False
    g = 0
    for c in coeffs.values():
        g = math.gcd(g, c)
    if g != 1:
        coeffs = {v: c // g for v, c in coeffs.items()}
        const = const / g
    if all(v in ints for v in coeffs):
        if op == "=":
            if const.denominator != 1:
                return False
        elif op == "<":
            # sum + k < 0 over integers  <=>  sum + floor(k) + 1 <= 0
            const = Fraction(math.floor(const) + 1)
            op = "<="
        elif const.denominator != 1:
            const = Fraction(math.ceil(const))
    if op == "=":
        first = min(coeffs, key=lambda v: v.key)
        if coeffs[first] < 0:
            coeffs = {v: -c for v, c in coeffs.items()}
            const = -const
    return coeffs, const, op


class _Deadline:
    __slots__ = ("t",)

    def __init__(self, t):
        self.t = t

    def check(self):
        if self.t is not None and time.monotonic() > self.t:
            raise SolverTimeout("solver time budget exhausted")


def _dedup(cons, ints):
    """Normalize, drop trivial constraints, keep the tightest of parallel ones."""
    best = {}
    eqs = {}
    for con in cons:
        n = _normalize(con, ints)
        if n is None:
            continue
        if n is False:
            return False
        coeffs, k, op = n
        sig = frozenset(coeffs.items())
        if op == "=":
            prev = eqs.get(sig)
            if prev is not None and prev[1] != k:
                return False
            eqs[sig] = n
            continue
        prev = best.get(sig)
        if prev is None or k > prev[1] or (k == prev[1] and op == "<"):
            best[sig] = n
    # c.v + k <= 0 together with -c.v - k' <= 0 pins c.v between -k and k'
    for sig, n in list(best.items()):
        if sig not in best:
            continue
        nsig = frozenset((v, -c) for v, c in sig)
        m = best.get(nsig)
        if m is None:
            continue
        total = n[1] + m[1]
        if total > 0 or (total == 0 and "<" in (n[2], m[2])):
            return False
        if total == 0 and sig not in eqs and nsig not in eqs:
            del best[sig], best[nsig]
            e = _normalize((n[0], n[1], "="), ints)
            if e is False:
                return False
            eqs[frozenset(e[0].items())] = e
    out = list(eqs.values())
    for sig, n in best.items():
        e = eqs.get(sig)
        if e is not None:
            # equality sum + ke = 0 fixes sum = -ke; check the inequality
            if not _holds(n[1] - e[1], n[2]):
                return False
            continue
        out.append(n)
    return out


def _combine(c1, m1, c2, m2, v):
    """m1*c1 + m2*c2 with the v-terms cancelled (m1, m2 > 0)."""
    nc = {}
    for w, c in c1[0].items():
        if w != v:
            nc[w] = m1 * c
    for w, c in c2[0].items():
        if w != v:
            t = nc.get(w, 0) + m2 * c
            if t:
                nc[w] = t
            else:
                nc.pop(w, None)
    return nc, m1 * c1[1] + m2 * c2[1]


_sigma_count = 0


def _mod_hat(a, m):
    return a - m * math.floor(Fraction(a, m) + Fraction(1, 2))


def _omega_split(eq, ints):
    """Equality with a fresh integer sigma and a unit coefficient on the
    smallest variable of ``eq``; substituting it shrinks ``eq``'s coefficients."""
    global _sigma_count
    coeffs, k, _ = eq
    v = min(coeffs, key=lambda w: (abs(coeffs[w]), w.key))
    m = abs(coeffs[v]) + 1
    _sigma_count += 1
    sigma = Var(f"__sigma{_sigma_count}", v.sort)
    ints.add(sigma)
    nc = {w: _mod_hat(c, m) for w, c in coeffs.items()}
    nc = {w: c for w, c in nc.items() if c}
    nc[sigma] = -m
    return nc, Fraction(_mod_hat(int(k), m)), "="


def eliminate(cons, ints, deadline: _Deadline):
    """Run FM to completion; returns the elimination record or None when infeasible."""
    record = []
    cur = _dedup(cons, ints)
    while True:
        deadline.check()
        if cur is False:
            return None
        if not cur:
            return record
        eqs = [con for con in cur if con[2] == "="]
        eq = next((e for e in eqs if any(v not in ints or abs(c) == 1 for v, c in e[0].items())), None)
        if eq is None and eqs:
            # every equality is purely integral with non-unit coefficients
            cur = cur + [_omega_split(eqs[0], ints)]
            continue
        if eq is not None:
            coeffs = eq[0]
            cand = [v for v in coeffs if v not in ints or abs(coeffs[v]) == 1]
            v = min(cand, key=lambda w: (abs(coeffs[w]), w.key))
            a = coeffs[v]
            record.append(("eq", v, eq))
            rest = []
            for con in cur:
                if con is eq:
                    continue
                b = con[0].get(v)
                if not b:
                    rest.append(con)
                    continue
                # |a|*con - sign(a)*b*eq cancels v
                sa = 1 if a > 0 else -1
                nc, nk = _combine(con, abs(a), eq, -sa * b, v)
                rest.append((nc, nk, con[2]))
            cur = _dedup(rest, ints)
            continue
        occ = {}
        for con in cur:
            for w, c in con[0].items():
                p, n = occ.get(w, (0, 0))
                occ[w] = (p + 1, n) if c > 0 else (p, n + 1)
        v = min(occ, key=lambda w: (occ[w][0] * occ[w][1] - occ[w][0] - occ[w][1], w.key))
        lowers, uppers, keep = [], [], []
        for con in cur:
            a = con[0].get(v)
            if not a:
                keep.append(con)
            elif a > 0:
                uppers.append(con)
            else:
                lowers.append(con)
        record.append(("ineq", v, lowers, uppers))
        new = keep
        for lo in lowers:
            al = -lo[0][v]
            for up in uppers:
                au = up[0][v]
                nc, nk = _combine(lo, au, up, al, v)
                op = "<" if (lo[2] == "<" or up[2] == "<") else "<="
                new.append((nc, nk, op))
        cur = _dedup(new, ints)


def _eval_rest(coeffs, const, v, model):
    total = const
    for w, c in coeffs.items():
        if w == v:
            continue
        val = model.get(w)
        if val is None:
            val = Fraction(0)
            model[w] = val
        total += c * val
    return total


def _pick(lo, lo_strict, hi, hi_strict, is_int, rng):
    """Choose a value in the interval, preferring 0 and small integers."""
    if is_int:
        ilo = None if lo is None else (math.floor(lo) + 1 if lo_strict else math.ceil(lo))
        ihi = None if hi is None else (math.ceil(hi) - 1 if hi_strict else math.floor(hi))
        if ilo is None or ihi is None or ilo <= ihi:
            if rng is not None:
                a = ilo if ilo is not None else (ihi - 8 if ihi is not None else -8)
                b = ihi if ihi is not None else a + 16
                return Fraction(rng.randint(a, max(a, b)))
            if ilo is not None and ilo > 0:
                return Fraction(ilo)
            if ihi is not None and ihi < 0:
                return Fraction(ihi)
            return Fraction(0)
        # no integer inside: hand back a fractional witness for branching
        if lo is not None and hi is not None:
            return (lo + hi) / 2
        return lo if lo is not None else hi

    def inside(x):
        if lo is not None and (x < lo or (lo_strict and x == lo)):
            return False
        if hi is not None and (x > hi or (hi_strict and x == hi)):
            return False
        return True

    if rng is not None and lo is not None and hi is not None:
        span = hi - lo
        x = lo + span * Fraction(rng.randint(1, 1023), 1024)
        if inside(x):
            return x
    if inside(Fraction(0)):
        return Fraction(0)
    if lo is not None and hi is not None:
        c = math.ceil(lo) if not lo_strict else math.floor(lo) + 1
        if inside(Fraction(c)):
            return Fraction(c)
        c = math.floor(hi) if not hi_strict else math.ceil(hi) - 1
        if inside(Fraction(c)):
            return Fraction(c)
        return (lo + hi) / 2
    if lo is not None:
        c = Fraction(math.floor(lo) + 1)
        return c
    c = Fraction(math.ceil(hi) - 1)
    return c


def reconstruct(record, ints, rng=None):
    model = {}
    for entry in reversed(record):
        if entry[0] == "eq":
            _, v, (coeffs, k, _) = entry
            model[v] = -_eval_rest(coeffs, k, v, model) / coeffs[v]
            continue
        _, v, lowers, uppers = entry
        lo = hi = None
        lo_s = hi_s = False
        for coeffs, k, op in lowers:
            a = coeffs[v]
            b = _eval_rest(coeffs, k, v, model) / -a
            if lo is None or b > lo or (b == lo and op == "<"):
                lo, lo_s = b, op == "<"
        for coeffs, k, op in uppers:
            a = coeffs[v]
            b = -_eval_rest(coeffs, k, v, model) / a
            if hi is None or b < hi or (b == hi and op == "<"):
                hi, hi_s = b, op == "<"
        model[v] = _pick(lo, lo_s, hi, hi_s, v in ints, rng)
    return model


def check_constraints(cons, model) -> bool:
    for coeffs, k, op in cons:
        total = k
        for v, c in coeffs.items():
            total += c * model.get(v, 0)
        if not _holds(total, op):
            return False
    return True


def solve(cons, ints, deadline: _Deadline = None, rng=None):
    """Find a model of a conjunction of constraints (disequalities allowed) or None."""
    deadline = deadline or _Deadline(None)
    ints = set(ints)  # the omega step adds its sigma variables here
    state = {"nodes": 0}
    ineqs = [c for c in cons if c[2] != "!="]
    diseqs = [c for c in cons if c[2] == "!="]
    model = _solve(ineqs, diseqs, ints, deadline, rng, 0, state)
    if model is not None:
        model = {v: c for v, c in model.items() if not v.name.startswith("__sigma")}
    return model


def _solve(ineqs, diseqs, ints, deadline, rng, depth, state):
    state["nodes"] += 1
    if depth > BB_DEPTH or state["nodes"] > BB_NODES:
        raise SolverIncomplete("branch-and-bound limit reached")
    deadline.check()
    record = eliminate(ineqs, ints, deadline)
    if record is None:
        return None
    model = reconstruct(record, ints, rng)
    for v in ints:
        val = model.get(v)
        if val is not None and val.denominator != 1:
            fl = math.floor(val)
            left = ineqs + [({v: 1}, Fraction(-fl), "<=")]
            r = _solve(left, diseqs, ints, deadline, rng, depth + 1, state)
            if r is not None:
                return r
            right = ineqs + [({v: -1}, Fraction(fl + 1), "<=")]
            return _solve(right, diseqs, ints, deadline, rng, depth + 1, state)
    for i, (coeffs, k, _) in enumerate(diseqs):
        total = k
        for v, c in coeffs.items():
            total += c * model.get(v, 0)
        if total == 0:
            rest = diseqs[:i] + diseqs[i + 1:]
            neg = {v: -c for v, c in coeffs.items()}
            for con in ((coeffs, k, "<"), (neg, -k, "<")):
                r = _solve(ineqs + [con], rest, ints, deadline, rng, depth + 1, state)
                if r is not None:
                    return r
            return None
    return model
