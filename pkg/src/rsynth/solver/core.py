"""Satisfiability for quantifier-free LIA/LRA formulas.

The internal procedure lazily case-splits disjunctions: it solves the
mandatory conjunction of literals, and only when the resulting model falsifies
a pending disjunction does it branch on that disjunction's children.
"""
from __future__ import annotations

import logging
import os
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from ..logic.expr import (
    FALSE,
    And,
    BoolVar,
    Const,
    Div,
    Formula,
    Lit,
    Not,
    Or,
    Sort,
    Term,
    Var,
    canonicalize,
    conj,
    disj,
    neg,
)
from ..logic.ops import lift_ite, nnf
from . import fm
from .fm import SolverIncomplete, SolverTimeout

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Sat:
    model: dict

    def __bool__(self):
        return True


@dataclass(frozen=True)
class Unsat:
    def __bool__(self):
        return False


UNSAT = Unsat()


@dataclass
class SolverConfig:
    backend: str = "internal"  # or an external command line
    timeout_ms: int = 20000
    seed: Optional[int] = None

    def __post_init__(self):
        if self.timeout_ms <= 0:
            raise ValueError("time budget must be positive")

    @classmethod
    def from_env(cls, solver: str = None, timeout_ms: int = None, seed=None):
        backend = solver or os.environ.get("RSYNTH_SOLVER") or "internal"
        return cls(backend=backend, timeout_ms=timeout_ms or 20000, seed=seed)


# ---------------------------------------------------------------- preprocessing


class _Purifier:
    """Replace div atoms by fresh integer variables plus defining bounds."""

    def __init__(self):
        self.fresh = {}
        self.side = []

    def term(self, t: Term) -> Term:
        if not any(isinstance(a, Div) for a, _ in t.coeffs):
            return t
        out = Term((), t.const)
        for a, c in t.coeffs:
            if isinstance(a, Div):
                out = out + self.div(a) * c
            else:
                out = out + Term({a: c})
        return out

    def div(self, d: Div) -> Term:
        q = self.fresh.get(d)
        if q is None:
            q = Var(f"__q{len(self.fresh)}", Sort.INT)
            self.fresh[d] = q
            arg = self.term(d.arg)
            qt = q.term()
            # k*q <= arg <= k*q + k - 1
            self.side.append(canonicalize(Lit(qt * d.k - arg, "<=")))
            self.side.append(canonicalize(Lit(arg - qt * d.k - (d.k - 1), "<=")))
        return q.term()

    def formula(self, f: Formula) -> Formula:
        if isinstance(f, Lit):
            t = self.term(f.term)
            return f if t is f.term else canonicalize(Lit(t, f.op))
        if isinstance(f, And):
            return conj(*(self.formula(a) for a in f.args))
        if isinstance(f, Or):
            return disj(*(self.formula(a) for a in f.args))
        return f


def prepare(f: Formula):
    """Return (nnf formula without div/ite terms, fresh vars)."""
    g = nnf(lift_ite(f))
    p = _Purifier()
    g = p.formula(g)
    if p.side:
        g = conj(g, *p.side)
    return g, set(p.fresh.values())


def default_value(v: Var) -> Fraction:
    return Fraction(0)


# ---------------------------------------------------------------- search


class _Search:
    def __init__(self, ints, deadline, rng):
        self.ints = ints
        self.deadline = deadline
        self.rng = rng
        self.cache = {}

    def theory(self, lits):
        key = frozenset(lits)
        if key in self.cache:
            return self.cache[key]
        cons = [fm.lit_constraints(l) for l in lits]
        m = fm.solve(cons, self.ints, self.deadline, self.rng)
        self.cache[key] = m
        return m

    def run(self, f: Formula, all_vars):
        mand, ors, bools = [], [], {}
        if not _flatten(f, mand, ors, bools):
            return None
        return self._search(mand, ors, bools, all_vars)

    def _search(self, mand, ors, bools, all_vars):
        self.deadline.check()
        m = self.theory(mand)
        if m is None:
            return None
        full = {}
        for v in all_vars:
            if v.sort is Sort.BOOL:
                full[v] = Fraction(1) if bools.get(v, False) else Fraction(0)
            else:
                full[v] = m.get(v, Fraction(0))
        for v, val in m.items():
            full[v] = val
        pick = None
        for o in ors:
            if not o.holds(full):
                if pick is None or len(o.args) < len(pick.args):
                    pick = o
        if pick is None:
            return full
        rest = [o for o in ors if o is not pick]
        for d in pick.args:
            nm, no, nb = list(mand), list(rest), dict(bools)
            if not _flatten(d, nm, no, nb):
                continue
            r = self._search(nm, no, nb, all_vars)
            if r is not None:
                return r
        return None


def _flatten(f, mand, ors, bools) -> bool:
    """Split an NNF formula into theory literals, disjunctions and boolean facts."""
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Lit):
        mand.append(f)
        return True
    if isinstance(f, BoolVar):
        if bools.get(f.var) is False:
            return False
        bools[f.var] = True
        return True
    if isinstance(f, Not) and isinstance(f.arg, BoolVar):
        if bools.get(f.arg.var) is True:
            return False
        bools[f.arg.var] = False
        return True
    if isinstance(f, And):
        for a in f.args:
            if not _flatten(a, mand, ors, bools):
                return False
        return True
    if isinstance(f, Or):
        ors.append(f)
        return True
    raise TypeError(f"unexpected formula node {f!r}")


# ---------------------------------------------------------------- public API


CACHE_SIZE = 4096


class Solver:
    """Decides LIA/LRA satisfiability; one instance per owner."""

    def __init__(self, config: SolverConfig = None):
        self.config = config or SolverConfig()
        self.rng = random.Random(self.config.seed) if self.config.seed is not None else None
        self.degraded = False
        self.queries = 0
        self._cache = {}
        self._external = None
        if self.config.backend not in ("internal", "", None):
            from .external import ExternalSolver

            self._external = ExternalSolver(self.config.backend, self.config.timeout_ms)

    def close(self):
        if self._external is not None:
            self._external.close()

    def check_sat(self, f: Formula, timeout_ms: int = None):
        self.queries += 1
        if f == FALSE:
            return UNSAT
        hit = self._cache.get(f)
        if hit is not None:
            return hit
        res = self._check(f, timeout_ms)
        if len(self._cache) >= CACHE_SIZE:
            self._cache.pop(next(iter(self._cache)))
        self._cache[f] = res
        return res

    def _check(self, f: Formula, timeout_ms):
        vs = f.vars()
        if self._external is not None and not self.degraded:
            try:
                res = self._external.check_sat(f, vs)
                if res is not None:
                    if isinstance(res, Sat):
                        model = _complete(res.model, vs)
                        _assert_model(f, model)
                        return Sat(model)
                    return res
            except SolverTimeout:
                raise
            except Exception as exc:  # external failure -> degraded mode
                log.warning("external solver failed (%s); falling back to internal", exc)
                self.degraded = True
        budget = timeout_ms if timeout_ms is not None else self.config.timeout_ms
        deadline = fm._Deadline(time.monotonic() + budget / 1000.0)
        g, fresh = prepare(f)
        if g == FALSE:
            return UNSAT
        ints = {v for v in g.vars() | vs if v.sort is Sort.INT}
        search = _Search(ints, deadline, self.rng)
        full = search.run(g, set(g.vars()) | vs)
        if full is None:
            return UNSAT
        model = {v: full.get(v, default_value(v)) for v in vs}
        _assert_model(f, model)
        return Sat(model)

    def is_valid(self, f: Formula, timeout_ms: int = None) -> bool:
        return not self.check_sat(neg(f), timeout_ms)

    def equivalent(self, a: Formula, b: Formula) -> bool:
        return self.is_valid(conj(_imp(a, b), _imp(b, a)))

    def implies(self, a: Formula, b: Formula) -> bool:
        return not self.check_sat(conj(a, nnf(b, False)))


def _imp(a, b):
    return disj(nnf(a, False), b)


def _complete(model, vs):
    return {v: Fraction(model.get(v, 0)) for v in vs}


def _assert_model(f, model):
    if not f.holds(model):
        raise AssertionError(f"solver produced a model that falsifies the query: {model}")


def check_sat(f: Formula, config: SolverConfig = None):
    return Solver(config).check_sat(f)


def is_valid(f: Formula, config: SolverConfig = None) -> bool:
    return Solver(config).is_valid(f)


__all__ = [
    "Sat",
    "Unsat",
    "UNSAT",
    "Solver",
    "SolverConfig",
    "SolverTimeout",
    "SolverIncomplete",
    "check_sat",
    "is_valid",
]
