"""In-process execution of synthesized witnesses.

``step`` evaluates one reaction of a Skolem decision tree: it checks the
assumption on the given input, picks a branch whose guard holds, computes the
next outputs leaf by leaf and monitors the guarantees on the result.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from ..aeval import SkolemTree
from ..fixpoint import Contract
from ..logic.expr import And, Formula, Lit, Sort, Term, Var
from ..skolem import Assign, GuardedPair, Urng
from ..solver import Solver
from .rng import UniformRng, ValidatingRng


class AssumptionViolation(ValueError):
    """The caller supplied inputs that break the contract's assumptions."""


class GuaranteeViolation(AssertionError):
    """A synthesized step broke the guarantees or left the viable set."""


@dataclass(frozen=True)
class StepResult:
    state: dict  # next outputs, keyed by unprimed output variables
    branch: int
    ok: bool


def eval_skolem(sk, model, rng) -> Fraction:
    if isinstance(sk, Assign):
        return sk.term.evaluate(model)
    if isinstance(sk, GuardedPair):
        return eval_skolem(sk.then if sk.cond.holds(model) else sk.other, model, rng)
    if isinstance(sk, Urng):
        H = [h.evaluate(model) for h in sk.H]
        lo = None if sk.lower is None else sk.lower.evaluate(model)
        hi = None if sk.upper is None else sk.upper.evaluate(model)
        return rng.draw(H, sk.lclosed.holds(model), sk.uclosed.holds(model), lo, hi, sk.sort)
    raise TypeError(f"not a local Skolem: {sk!r}")


def step(tree: SkolemTree, contract: Contract, state, inputs, rng=None, F: Formula = None,
         strict: bool = True) -> StepResult:
    """One reaction.  ``state`` and ``inputs`` map variables to values."""
    rng = rng or ValidatingRng(UniformRng())
    model = dict(state)
    model.update(inputs)
    if not contract.A.holds(model):
        raise AssumptionViolation(f"inputs {_show(inputs)} violate the assumptions at {_show(state)}")
    if F is not None and not F.holds(model):
        raise AssumptionViolation(f"state {_show(state)} is outside the viable set")
    hits = tree.applicable(model)
    idx = rng.random.choice(hits) if tree.mode == "random" and len(hits) > 1 else hits[0]
    for y, sk in tree.branches[idx].leaf:
        model[y] = eval_skolem(sk, model, rng)
    nxt = {y: model[y.prime()] for y in contract.outputs}
    ok = contract.G_T.holds(model) and (F is None or F.holds(nxt))
    if strict and not ok:
        raise GuaranteeViolation(
            f"branch {idx} produced {_show(nxt)} from {_show(state)} under {_show(inputs)}")
    return StepResult(nxt, idx, ok)


def _show(m) -> str:
    return "{" + ", ".join(f"{v.name}={m[v]}" for v in sorted(m, key=lambda v: v.name)) + "}"


# ---------------------------------------------------------------- input sampling

DEFAULT_BOX = 10


def _single_var_bounds(f: Formula, inputs):
    """Constant bounds on individual inputs read off top-level literals."""
    lo, hi = {}, {}
    parts = f.args if isinstance(f, And) else (f,)
    for p in parts:
        if not isinstance(p, Lit) or len(p.term.coeffs) != 1:
            continue
        (a, c), = p.term.coeffs
        if a not in inputs or p.op in ("!=",):
            continue
        bound = -p.term.const / c
        op = p.op if c > 0 else {"<": ">", "<=": ">=", ">": "<", ">=": "<=", "=": "="}[p.op]
        if op in (">", ">=", "="):
            lo[a] = max(lo.get(a, bound), bound)
        if op in ("<", "<=", "="):
            hi[a] = min(hi.get(a, bound), bound)
    return lo, hi


class InputSampler:
    """Draws inputs satisfying the assumptions at a given state.

    Candidates come from the box implied by single-variable bounds, mixed with
    values copied from the current state to exercise near-collisions.  When
    rejection sampling fails the solver supplies a model.
    """

    def __init__(self, contract: Contract, seed=None, solver: Solver = None, tries: int = 200):
        self.c = contract
        self.random = random.Random(seed)
        self.solver = solver
        self.tries = tries

    def _value(self, x: Var, lo, hi, state):
        r = self.random
        if x.sort is Sort.BOOL:
            return Fraction(r.randint(0, 1))
        nearby = [v for v in state.values()]
        if nearby and r.random() < 0.3:
            v = r.choice(nearby)
            if x.sort is Sort.INT:
                v = Fraction(math.floor(v) + r.choice((-1, 0, 0, 1)))
            return v
        a = lo if lo is not None else (hi - DEFAULT_BOX if hi is not None else Fraction(-DEFAULT_BOX))
        b = hi if hi is not None else a + 2 * DEFAULT_BOX
        if x.sort is Sort.INT:
            return Fraction(r.randint(math.ceil(a), math.floor(b)))
        if r.random() < 0.1:
            return r.choice((a, b))
        den = r.choice((1, 10, 1000))
        return Fraction(r.randint(math.ceil(a * den), math.floor(b * den)), den)

    def sample(self, state) -> dict:
        A = self.c.A
        sub = {y: Term.constant(v) for y, v in state.items() if y.sort is not Sort.BOOL}
        A_here = A.substitute(sub)
        lo, hi = _single_var_bounds(A_here, set(self.c.inputs))
        for _ in range(self.tries):
            m = {x: self._value(x, lo.get(x), hi.get(x), state) for x in self.c.inputs}
            full = dict(state)
            full.update(m)
            if A.holds(full):
                return m
        solver = self.solver or Solver()
        res = solver.check_sat(A_here)
        if not res:
            raise AssumptionViolation(f"no admissible input at {_show(state)}")
        return {x: res.model.get(x, Fraction(0)) for x in self.c.inputs}


def run(tree, contract, y_init, steps: int, rng=None, F=None, sampler: InputSampler = None, seed=None):
    """Run ``steps`` reactions on sampled inputs; returns the list of states visited."""
    rng = rng or ValidatingRng(UniformRng(seed))
    sampler = sampler or InputSampler(contract, seed)
    state = dict(y_init)
    states = [state]
    for _ in range(steps):
        x = sampler.sample(state)
        state = step(tree, contract, state, x, rng, F).state
        states.append(state)
    return states
