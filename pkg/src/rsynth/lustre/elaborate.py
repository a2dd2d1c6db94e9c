"""Turn a parsed contract node into assumptions and guarantees.

Each expression is read in one of three views:

* ``init``  -- the first step: ``a -> b`` means ``a``; ``pre`` is not allowed;
* ``trans`` -- a later step: outputs are primed, ``a -> b`` means ``b`` and
  ``pre(e)`` reads ``e`` over the unprimed (previous) outputs;
* ``assume`` -- like ``trans`` but current outputs may only appear under
  ``pre`` (assumptions range over inputs and the current state).
"""
from __future__ import annotations

import logging

from ..fixpoint import Contract
from ..logic.expr import (
    FALSE,
    TRUE,
    And,
    BoolVar,
    Formula,
    Sort,
    Term,
    Var,
    conj,
    disj,
    iff,
    implies,
    mk_div,
    mk_ite,
    mk_ite_term,
    mk_lit,
    neg,
)
from .ast import Binary, BoolLit, Ident, IfThenElse, Node, Num, Program, Unary

log = logging.getLogger(__name__)


class ElaborationError(ValueError):
    def __init__(self, msg, pos=None):
        super().__init__((f"{pos}: " if pos else "") + msg)
        self.pos = pos


_SORTS = {"int": Sort.INT, "real": Sort.REAL, "bool": Sort.BOOL}


def _has_temporal(e) -> bool:
    if isinstance(e, Unary):
        return e.op == "pre" or _has_temporal(e.arg)
    if isinstance(e, Binary):
        return e.op == "->" or _has_temporal(e.left) or _has_temporal(e.right)
    if isinstance(e, IfThenElse):
        return _has_temporal(e.cond) or _has_temporal(e.then) or _has_temporal(e.other)
    return False


def _idents(e, out):
    if isinstance(e, Ident):
        out.add(e.name)
    elif isinstance(e, Unary):
        if e.op != "pre":
            _idents(e.arg, out)
    elif isinstance(e, Binary):
        _idents(e.left, out)
        _idents(e.right, out)
    elif isinstance(e, IfThenElse):
        _idents(e.cond, out)
        _idents(e.then, out)
        _idents(e.other, out)
    return out


class _Elab:
    def __init__(self, node: Node):
        self.node = node
        decls = node.params + node.returns + node.locals
        names = [d.name for d in decls]
        dup = {n for n in names if names.count(n) > 1}
        if dup:
            raise ElaborationError(f"duplicate declarations: {sorted(dup)}", node.pos)
        self.vars = {d.name: Var(d.name, _SORTS[d.type]) for d in decls}
        param_names = [d.name for d in node.params]
        real = list(node.realizable) or list(param_names)
        for r in real:
            if r not in param_names:
                raise ElaborationError(f"--%REALIZABLE names {r!r}, which is not a parameter", node.pos)
        self.inputs = [self.vars[n] for n in param_names if n in real]
        self.defs = {}
        for eq in node.equations:
            if eq.lhs not in self.vars:
                raise ElaborationError(f"equation for undeclared variable {eq.lhs!r}", eq.pos)
            if eq.lhs in real:
                raise ElaborationError(f"input {eq.lhs!r} cannot be defined by an equation", eq.pos)
            if eq.lhs in self.defs:
                raise ElaborationError(f"{eq.lhs!r} defined twice", eq.pos)
            self.defs[eq.lhs] = eq
        for p in node.properties:
            d = node.decl(p)
            if d is None or d.type != "bool":
                raise ElaborationError(f"property {p!r} must be a declared boolean", node.pos)
        # boolean locals with stateless definitions are inlined as macros
        local_names = {d.name for d in node.locals}
        self.inline = {
            n: eq.rhs
            for n, eq in self.defs.items()
            if n in local_names and self.vars[n].sort is Sort.BOOL and not _has_temporal(eq.rhs)
        }
        self._check_cycles()
        self.outputs = [
            self.vars[d.name]
            for d in node.params + node.returns + node.locals
            if self.vars[d.name] not in self.inputs and d.name not in self.inline
        ]
        self.input_set = set(self.inputs)

    def _check_cycles(self):
        """Reject circular combinational (pre-free) definitions."""
        graph = {n: _idents(eq.rhs, set()) & set(self.defs) for n, eq in self.defs.items()}
        # only the pre-free part of each right-hand side matters: _idents skips pre
        state = {}

        def visit(n, stack):
            if state.get(n) == 1:
                cyc = stack[stack.index(n):] + [n]
                raise ElaborationError("circular definition: " + " -> ".join(cyc), self.defs[n].pos)
            if state.get(n) == 2:
                return
            state[n] = 1
            for m in sorted(graph[n]):
                visit(m, stack + [n])
            state[n] = 2

        for n in sorted(graph):
            visit(n, [])

    # -- expression translation
    def tr(self, e, view: str, under_pre: bool = False):
        if isinstance(e, Num):
            return Term.constant(e.value)
        if isinstance(e, BoolLit):
            return TRUE if e.value else FALSE
        if isinstance(e, Ident):
            return self._ident(e, view, under_pre)
        if isinstance(e, Unary):
            if e.op == "pre":
                if view == "init":
                    raise ElaborationError("pre used outside the right-hand side of '->'", e.pos)
                if under_pre:
                    raise ElaborationError("nested pre is not supported", e.pos)
                return self.tr(e.arg, view, True)
            a = self.tr(e.arg, view, under_pre)
            if e.op == "not":
                return neg(self._f(a, e))
            return -self._t(a, e)
        if isinstance(e, IfThenElse):
            c = self._f(self.tr(e.cond, view, under_pre), e)
            a = self.tr(e.then, view, under_pre)
            b = self.tr(e.other, view, under_pre)
            if isinstance(a, Formula):
                return mk_ite(c, a, self._f(b, e))
            a, b = self._t(a, e), self._t(b, e)
            sort = a.sort or b.sort or Sort.INT
            return mk_ite_term(c, a, b, sort)
        if isinstance(e, Binary):
            op = e.op
            if op == "->":
                if under_pre:
                    raise ElaborationError("'->' under pre is not supported", e.pos)
                return self.tr(e.left if view == "init" else e.right, view, under_pre)
            l = self.tr(e.left, view, under_pre)
            r = self.tr(e.right, view, under_pre)
            if op in ("and", "or", "=>", "xor"):
                l, r = self._f(l, e), self._f(r, e)
                if op == "and":
                    return conj(l, r)
                if op == "or":
                    return disj(l, r)
                if op == "=>":
                    return implies(l, r)
                return neg(iff(l, r))
            if op in ("=", "<>") and isinstance(l, Formula):
                eq = iff(l, self._f(r, e))
                return eq if op == "=" else neg(eq)
            l, r = self._t(l, e), self._t(r, e)
            if op in ("=", "<>", "<", "<=", ">", ">="):
                return mk_lit(l, {"<>": "!="}.get(op, op), r)
            if op == "+":
                return l + r
            if op == "-":
                return l - r
            if op == "*":
                if l.is_constant():
                    return r * l.const
                if r.is_constant():
                    return l * r.const
                raise ElaborationError("non-linear multiplication", e.pos)
            if op in ("/", "div", "mod"):
                if not r.is_constant() or r.const == 0:
                    raise ElaborationError(f"'{op}' needs a non-zero constant divisor", e.pos)
                k = r.const
                if op == "/" and (l.sort is Sort.REAL or (l.sort is None and k.denominator != 1)):
                    return l / k
                if k.denominator != 1 or k < 0:
                    raise ElaborationError(f"integer '{op}' needs a positive integer divisor", e.pos)
                q = mk_div(l, int(k))
                return q if op != "mod" else l - q * int(k)
        raise ElaborationError(f"unsupported expression {e!r}", getattr(e, "pos", None))

    def _ident(self, e: Ident, view, under_pre):
        if e.name not in self.vars:
            raise ElaborationError(f"undeclared identifier {e.name!r}", e.pos)
        if e.name in self.inline:
            return self.tr(self.inline[e.name], view, under_pre)
        v = self.vars[e.name]
        if v in self.input_set:
            if under_pre:
                raise ElaborationError(f"pre of input {e.name!r} is not supported", e.pos)
            out = v
        elif view == "init" or under_pre:
            out = v
        elif view == "assume":
            raise ElaborationError(
                f"assertion mentions current output {e.name!r}; use pre({e.name})", e.pos)
        else:
            out = v.prime()
        return BoolVar(out) if out.sort is Sort.BOOL else out.term()

    @staticmethod
    def _f(x, e) -> Formula:
        if not isinstance(x, Formula):
            raise ElaborationError("expected a boolean expression", getattr(e, "pos", None))
        return x

    @staticmethod
    def _t(x, e) -> Term:
        if not isinstance(x, Term):
            raise ElaborationError("expected an arithmetic expression", getattr(e, "pos", None))
        return x

    # -- contract assembly
    def contract(self) -> Contract:
        A = conj(*(self._f(self.tr(a, "assume"), a) for a in self.node.asserts))
        gi, gt = [], []
        for name, eq in self.defs.items():
            if name in self.inline:
                continue
            for view, acc in (("init", gi), ("trans", gt)):
                lhs = self._ident(Ident(name), view, False)
                rhs = self.tr(eq.rhs, view)
                if isinstance(lhs, Formula):
                    acc.append(iff(lhs, self._f(rhs, eq)))
                else:
                    acc.append(mk_lit(lhs, "=", self._t(rhs, eq)))
        for p in self.node.properties:
            gi.append(self._f(self._ident(Ident(p), "init", False), None))
            gt.append(self._f(self._ident(Ident(p), "trans", False), None))
        # the initial guarantee is over outputs only; input-dependent conjuncts are dropped
        kept = []
        for f in gi:
            parts = f.args if isinstance(f, And) else (f,)
            for part in parts:
                if part.vars() & self.input_set:
                    log.info("dropping input-dependent initial conjunct %s", part)
                    continue
                kept.append(part)
        return Contract(self.node.name, tuple(self.inputs), tuple(self.outputs), A, conj(*kept), conj(*gt))


def elaborate(program_or_node) -> Contract:
    node = program_or_node.main() if isinstance(program_or_node, Program) else program_or_node
    return _Elab(node).contract()


def load_contract(path) -> Contract:
    from .parser import parse_file

    return elaborate(parse_file(path))
