"""Validity of forall-exists formulas with decision-tree Skolem witnesses.

Models of the universal variables are enumerated one region at a time: each
extending model yields a set of literals, a projected precondition over the
universals and a local Skolem per existential.  The loop stops when the
preconditions cover the premise (valid) or when no uncovered universal model
extends to a model of the matrix (invalid, with the region of validity).
"""
from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .logic.expr import TRUE, Formula, Var, conj, disj, neg
from .logic.ops import to_dnf, true_literals
from .mbp import project_vector
from .skolem import Assign, LocalSkolem, extract, simplify_skolem
from .solver import Solver, SolverIncomplete, SolverTimeout

log = logging.getLogger(__name__)

VALID, INVALID, INDETERMINATE = "valid", "invalid", "indeterminate"


class IterationCapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Branch:
    guard: Formula
    leaf: tuple  # ((Var, LocalSkolem), ...) in declaration order
    constraints: tuple = ()

    def skolem_for(self, y: Var) -> LocalSkolem:
        for v, sk in self.leaf:
            if v == y:
                return sk
        raise KeyError(y)


@dataclass(frozen=True)
class SkolemTree:
    """Guarded branches; the final branch acts as the else-leaf."""

    outputs: tuple
    branches: tuple
    mode: str = "random"

    def applicable(self, model) -> list:
        """Indices of branches whose guard holds (the else-leaf as a fallback)."""
        hits = [i for i, b in enumerate(self.branches) if b.guard.holds(model)]
        return hits or [len(self.branches) - 1]

    def select(self, model, rng: Optional[random.Random] = None, uniform: bool = None) -> Branch:
        hits = self.applicable(model)
        if uniform is None:
            uniform = self.mode == "random"
        if uniform and rng is not None and len(hits) > 1:
            return self.branches[rng.choice(hits)]
        return self.branches[hits[0]]


def assemble_tree(outputs, branches, mode="random") -> SkolemTree:
    if not branches:
        raise ValueError("a decision tree needs at least one branch")
    branches = list(branches)
    if len(branches) == 1:
        branches[0] = Branch(TRUE, branches[0].leaf, branches[0].constraints)
    return SkolemTree(tuple(outputs), tuple(branches), mode)


@dataclass(frozen=True)
class AevalResult:
    verdict: str
    valid_region: Formula
    skolem: Optional[SkolemTree]
    iterations: int
    preconditions: tuple
    constraints: tuple
    reason: str = ""

    @property
    def valid(self):
        return self.verdict == VALID


def _full_model(model, vs):
    return {v: model.get(v, Fraction(0)) for v in vs}


def _leaf(existentials, proj, mode, premise, solver):
    stage_ctx = {y: conj(premise, *rest) for y, _, rest in proj.stages}
    out = []
    for y in existentials:
        if y in proj.witnesses:
            # y was constrained through div: use the value the projection chose
            out.append((y, Assign(proj.witnesses[y])))
            continue
        res = proj.residuals.get(y, ())
        out.append((y, extract(y, res, mode, stage_ctx.get(y, premise), solver)))
    return tuple(out)


def ae_val(
    universals,
    existentials,
    psi: Formula,
    mode: str = "random",
    *,
    premise: Formula = TRUE,
    solver: Solver = None,
    iter_cap: int = 10000,
    exhaustive_dnf: bool = False,
) -> AevalResult:
    """Decide forall universals (premise => exists existentials. psi)."""
    solver = solver or Solver()
    existentials = list(existentials)
    if set(universals) & set(existentials):
        raise ValueError("universal and existential variables overlap")
    all_vars = set(universals) | set(existentials) | psi.vars() | premise.vars()
    pres, pis, branches = [], [], []
    try:
        if exhaustive_dnf:
            _exhaustive(existentials, psi, mode, premise, solver, iter_cap, all_vars, pres, pis, branches)
        while True:
            if len(pres) >= iter_cap:
                raise IterationCapExceeded(f"more than {iter_cap} AE-VAL iterations")
            blocked = conj(premise, *(neg(p) for p in pres))
            if not solver.check_sat(blocked):
                tree = assemble_tree(existentials, branches, mode)
                return AevalResult(VALID, TRUE, tree, len(pres) + 1, tuple(pres), tuple(pis))
            r = solver.check_sat(conj(blocked, psi))
            if not r:
                return AevalResult(INVALID, disj(*pres), None, len(pres) + 1, tuple(pres), tuple(pis))
            m = _full_model(r.model, all_vars)
            pi = true_literals(psi, m)
            _branch(existentials, pi, m, mode, premise, solver, pres, pis, branches)
    except (SolverTimeout, SolverIncomplete) as exc:
        return AevalResult(INDETERMINATE, disj(*pres), None, len(pres), tuple(pres), tuple(pis), str(exc))


def _branch(existentials, pi, m, mode, premise, solver, pres, pis, branches):
    proj = project_vector(existentials, pi, m)
    pre = conj(*proj.precondition)
    leaf = _leaf(existentials, proj, mode, premise, solver)
    region = conj(premise, pre)
    leaf = tuple((y, simplify_skolem(sk, region, solver)) for y, sk in leaf)
    pres.append(pre)
    pis.append(tuple(pi))
    branches.append(Branch(pre, leaf, tuple(pi)))


def _exhaustive(existentials, psi, mode, premise, solver, iter_cap, all_vars, pres, pis, branches):
    """One or more branches per satisfiable DNF disjunct (partial Skolems)."""
    for d in to_dnf(psi):
        dform = conj(*d)
        local = []
        while True:
            if len(pres) >= iter_cap:
                raise IterationCapExceeded(f"more than {iter_cap} AE-VAL iterations")
            r = solver.check_sat(conj(premise, dform, *(neg(p) for p in local)))
            if not r:
                break
            m = _full_model(r.model, all_vars)
            _branch(existentials, list(d), m, mode, premise, solver, pres, pis, branches)
            local.append(pres[-1])
