"""Greatest-fixpoint realizability for assume-guarantee contracts.

Starting from F = true, each round asks whether every viable state and
admissible input has a guarantee-satisfying successor that is again viable.
If not, the states from which some input escapes the region of validity are
removed from F and the round repeats.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from fractions import Fraction

from .aeval import INDETERMINATE, VALID, SkolemTree, ae_val
from .logic.expr import FALSE, TRUE, And, Formula, Or, Sort, conj, disj, implies, neg
from .logic.ops import nnf, true_literals
from .mbp import project_vector
from .solver import Solver, SolverIncomplete, SolverTimeout

log = logging.getLogger(__name__)


class FixpointError(RuntimeError):
    pass


@dataclass(frozen=True)
class Contract:
    name: str
    inputs: tuple
    outputs: tuple
    A: Formula
    G_I: Formula
    G_T: Formula

    def primed(self, f: Formula) -> Formula:
        return f.substitute({y: y.prime() for y in self.outputs})

    @property
    def next_outputs(self):
        return tuple(y.prime() for y in self.outputs)

    @property
    def sort(self):
        sorts = {v.sort for v in self.inputs + self.outputs} - {Sort.BOOL}
        return Sort.REAL if Sort.REAL in sorts else Sort.INT


@dataclass(frozen=True)
class Realizable:
    F: Formula
    y_init: dict
    tree: SkolemTree
    iterations: int
    trace: tuple = ()
    verdict: str = "realizable"


@dataclass(frozen=True)
class Unrealizable:
    iterations: int
    trace: tuple = ()
    reason: str = ""
    verdict: str = "unrealizable"


@dataclass(frozen=True)
class Indeterminate:
    iterations: int
    trace: tuple = ()
    reason: str = ""
    verdict: str = "indeterminate"


def extract_unsafe(valid_region: Formula, F: Formula, A: Formula, inputs, solver: Solver, cap: int = 1000) -> Formula:
    """States (over outputs) from which some admissible input leaves the valid region."""
    target = conj(F, A, neg(valid_region))
    all_vars = target.vars()
    U = FALSE
    for _ in range(cap):
        r = solver.check_sat(conj(target, neg(U)))
        if not r:
            return U
        m = {v: r.model.get(v, Fraction(0)) for v in all_vars}
        pi = true_literals(target, m)
        proj = project_vector(list(inputs), pi, m)
        U = disj(U, conj(*proj.precondition))
    raise FixpointError(f"unsafe-state projection did not converge in {cap} rounds")


def simplify_viable(F: Formula, solver: Solver) -> Formula:
    """Drop disjuncts subsumed by their siblings, inside each top-level conjunct."""
    parts = F.args if isinstance(F, And) else (F,)
    out = []
    for p in parts:
        if isinstance(p, Or):
            ds = list(p.args)
            i = 0
            while i < len(ds) and len(ds) > 1:
                rest = disj(*(ds[:i] + ds[i + 1:]))
                if solver.is_valid(implies(ds[i], rest)):
                    del ds[i]
                else:
                    i += 1
            p = disj(*ds)
        out.append(p)
    return conj(*out)


def synthesize(
    c: Contract,
    mode: str = "random",
    solver: Solver = None,
    iter_cap: int = 128,
    aeval_iter_cap: int = 10000,
    exhaustive_dnf: bool = False,
):
    solver = solver or Solver()
    F = TRUE
    trace = []
    universals = list(c.inputs) + list(c.outputs)
    existentials = list(c.next_outputs)
    try:
        for k in range(1, iter_cap + 1):
            t0 = time.monotonic()
            premise = conj(F, c.A)
            psi = conj(c.G_T, c.primed(F))
            res = ae_val(
                universals,
                existentials,
                psi,
                mode,
                premise=premise,
                solver=solver,
                iter_cap=aeval_iter_cap,
                exhaustive_dnf=exhaustive_dnf,
            )
            trace.append({"round": k, "verdict": res.verdict, "branches": res.iterations - 1,
                          "seconds": round(time.monotonic() - t0, 3), "F": F})
            if res.verdict == INDETERMINATE:
                return Indeterminate(k, tuple(trace), res.reason)
            if res.verdict == VALID:
                init = solver.check_sat(conj(c.G_I, F))
                if not init:
                    return Unrealizable(k, tuple(trace), "no initial state satisfies G_I within the fixpoint")
                y_init = {y: init.model.get(y, Fraction(0)) for y in c.outputs}
                return Realizable(simplify_viable(F, solver), y_init, res.skolem, k, tuple(trace))
            U = extract_unsafe(res.valid_region, F, c.A, c.inputs, solver)
            if not solver.check_sat(conj(F, U)):
                raise FixpointError("fixpoint stagnated: nothing unsafe to remove from an invalid round")
            F = conj(F, nnf(neg(U)))
            if not solver.check_sat(F):
                return Unrealizable(k, tuple(trace), "fixpoint became empty")
            # F only shrinks, so losing every initial state is already conclusive
            if not solver.check_sat(conj(c.G_I, F)):
                return Unrealizable(k, tuple(trace), "no initial state survives in the viable set")
    except (SolverTimeout, SolverIncomplete) as exc:
        return Indeterminate(len(trace), tuple(trace), str(exc))
    raise FixpointError(f"fixpoint did not converge within {iter_cap} rounds")
