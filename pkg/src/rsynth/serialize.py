"""JSON witness dumps.

A dump holds the contract, the viable set F, the initial outputs and the
Skolem decision tree.  Formulas and terms are stored as SMT-LIB strings so
the file stays readable and reloads to structurally equal objects.
"""
from __future__ import annotations

import json
from fractions import Fraction

from .aeval import Branch, SkolemTree
from .fixpoint import Contract, Realizable
from .logic.expr import Sort, Var
from .logic.smtlib import parse_formula, parse_term, term_to_smt, to_smt
from .skolem import Assign, GuardedPair, Urng

FORMAT = "rsynth-witness/1"


class DumpError(ValueError):
    pass


def _var(v: Var) -> dict:
    return {"name": v.name, "sort": v.sort.value}


def _num(c: Fraction) -> str:
    return str(c)


def _sk(sk, sort) -> dict:
    if isinstance(sk, Assign):
        return {"assign": term_to_smt(sk.term, sort)}
    if isinstance(sk, GuardedPair):
        return {"ite": [to_smt(sk.cond), _sk(sk.then, sort), _sk(sk.other, sort)]}
    return {
        "urng": {
            "H": [term_to_smt(h, sk.sort) for h in sk.H],
            "lclosed": to_smt(sk.lclosed),
            "uclosed": to_smt(sk.uclosed),
            "lower": None if sk.lower is None else term_to_smt(sk.lower, sk.sort),
            "upper": None if sk.upper is None else term_to_smt(sk.upper, sk.sort),
            "sort": sk.sort.value,
        }
    }


def _arith(sort: Sort) -> Sort:
    return Sort.INT if sort is Sort.BOOL else sort


def dump_witness(c: Contract, res: Realizable, mode: str) -> dict:
    tree = res.tree
    return {
        "format": FORMAT,
        "contract": c.name,
        "mode": mode,
        "inputs": [_var(v) for v in c.inputs],
        "outputs": [_var(v) for v in c.outputs],
        "A": to_smt(c.A),
        "G_I": to_smt(c.G_I),
        "G_T": to_smt(c.G_T),
        "F": to_smt(res.F),
        "y_init": {v.name: _num(res.y_init[v]) for v in c.outputs},
        "iterations": res.iterations,
        "tree": [
            {
                "guard": to_smt(b.guard),
                "leaf": [{"var": y.name, "skolem": _sk(sk, _arith(y.sort))} for y, sk in b.leaf],
                "constraints": [to_smt(l) for l in b.constraints],
            }
            for b in tree.branches
        ],
    }


def dumps(c: Contract, res: Realizable, mode: str) -> str:
    return json.dumps(dump_witness(c, res, mode), indent=2) + "\n"


class Witness:
    """A reloaded dump: contract, viable set, initial outputs and tree."""

    def __init__(self, contract, F, y_init, tree, mode, iterations=0):
        self.contract = contract
        self.F = F
        self.y_init = y_init
        self.tree = tree
        self.mode = mode
        self.iterations = iterations

    @classmethod
    def from_result(cls, c: Contract, res: Realizable, mode: str):
        return cls(c, res.F, dict(res.y_init), res.tree, mode, res.iterations)


def load_witness(data) -> Witness:
    if isinstance(data, str):
        data = json.loads(data)
    if data.get("format") != FORMAT:
        raise DumpError(f"unsupported dump format {data.get('format')!r}")
    try:
        inputs = tuple(Var(d["name"], Sort(d["sort"])) for d in data["inputs"])
        outputs = tuple(Var(d["name"], Sort(d["sort"])) for d in data["outputs"])
        env = list(inputs) + list(outputs) + [y.prime() for y in outputs]
        F = lambda s: parse_formula(s, env)
        T = lambda s: parse_term(s, env)

        def sk(d):
            if "assign" in d:
                return Assign(T(d["assign"]))
            if "ite" in d:
                cond, a, b = d["ite"]
                return GuardedPair(F(cond), sk(a), sk(b))
            u = d["urng"]
            return Urng(
                tuple(T(h) for h in u["H"]),
                F(u["lclosed"]),
                F(u["uclosed"]),
                None if u["lower"] is None else T(u["lower"]),
                None if u["upper"] is None else T(u["upper"]),
                Sort(u["sort"]),
            )

        by_name = {y.name: y.prime() for y in outputs}
        branches = tuple(
            Branch(
                F(b["guard"]),
                tuple((by_name[e["var"]], sk(e["skolem"])) for e in b["leaf"]),
                tuple(F(l) for l in b.get("constraints", ())),
            )
            for b in data["tree"]
        )
        c = Contract(data["contract"], inputs, outputs, F(data["A"]), F(data["G_I"]), F(data["G_T"]))
        y_init = {y: Fraction(data["y_init"][y.name]) for y in outputs}
        tree = SkolemTree(tuple(y.prime() for y in outputs), branches, data["mode"])
        return Witness(c, F(data["F"]), y_init, tree, data["mode"], data.get("iterations", 0))
    except (KeyError, TypeError, ValueError) as exc:
        raise DumpError(f"malformed witness dump: {exc}") from exc


def load_witness_file(path) -> Witness:
    with open(path, encoding="utf-8") as fh:
        return load_witness(fh.read())
