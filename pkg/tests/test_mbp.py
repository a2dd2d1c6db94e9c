import random
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from rsynth.logic import Lit, Sort, Term, Var, conj, mk_div, mk_lit
from rsynth.mbp import MbpPreconditionError, mbp, project_vector
from rsynth.solver import check_sat

I, R = Sort.INT, Sort.REAL
X = [Var("x1", I), Var("x2", I), Var("x3", I)]
Y = Var("y", I)
Y2 = Var("z", I)
XR = [Var("r1", R), Var("r2", R)]
YR = Var("s", R)
DOM = range(-5, 6)
OPS = ["<", "<=", "=", "!=", ">=", ">"]
# 500 + 500 random (pi, m) pairs for the two integer soundness properties
PAIRS = settings(max_examples=500)


def lits_over(vs, coeffs, const, n=4):
    lit = st.builds(
        lambda cs, k, op: mk_lit(Term(zip(vs, cs), k), op),
        st.tuples(*coeffs),
        const,
        st.sampled_from(OPS),
    )
    return st.lists(lit, min_size=1, max_size=n).map(lambda ls: [l for l in ls if isinstance(l, Lit)])


def _holds(pi, m):
    return all(l.holds(m) for l in pi)


_CMP = {
    "<": lambda v: v < 0, "<=": lambda v: v <= 0, "=": lambda v: v == 0,
    "!=": lambda v: v != 0, ">=": lambda v: v >= 0, ">": lambda v: v > 0,
}


def _exists(pi, xm, ys, window):
    """Enumerate the existentials over ``window`` with integer arithmetic."""
    lits = []
    for l in pi:
        cs = dict(l.term.coeffs)
        base = int(l.term.const) + sum(int(c) * int(xm[v]) for v, c in cs.items() if v not in ys)
        lits.append((base, [int(cs.get(y, 0)) for y in ys], _CMP[l.op]))

    def go(i, partial):
        for v in window:
            vals = partial + [v]
            ok = True
            for base, ks, cmp in lits:
                if any(ks[i + 1:]):
                    continue  # decided once the later existentials are fixed
                if not cmp(base + sum(k * w for k, w in zip(ks, vals))):
                    ok = False
                    break
            if ok and (i + 1 == len(ys) or go(i + 1, vals)):
                return True
        return False

    return go(0, [])


def _check_projection(pi, ys, rnd, window):
    """Brute-force MBP conditions (a) and (b) for a random model of pi."""
    models = []
    for _ in range(300):
        m = {x: Fraction(rnd.choice(DOM)) for x in X}
        m.update({y: Fraction(rnd.choice(window)) for y in ys})
        if _holds(pi, m):
            models.append(m)
    assume(models)
    m = rnd.choice(models)
    proj = project_vector(ys, pi, m)
    pre = conj(*proj.precondition)
    assert pre.holds(m)  # (a)
    assert not (pre.vars() & set(ys))
    for _ in range(40):  # (b) on sampled universal contexts
        xm = {x: Fraction(rnd.choice(DOM)) for x in X}
        if pre.holds(xm):
            assert _exists(pi, xm, ys, window)
    return proj


@PAIRS
@given(lits_over([Y] + X, [st.integers(-3, 3)] + [st.integers(-2, 2)] * 3, st.integers(-5, 5)),
       st.integers(0, 2 ** 32))
def test_int_mbp_soundness(pi, seed):
    assume(pi and any(Y in l.vars() for l in pi))
    _check_projection(pi, [Y], random.Random(seed), range(-40, 41))


@PAIRS
@given(lits_over([Y, Y2] + X, [st.integers(-3, 3)] * 2 + [st.integers(-2, 2)] * 3, st.integers(-5, 5)),
       st.integers(0, 2 ** 32))
def test_int_vector_projection(pi, seed):
    # coupled non-unit coefficients go through the divisibility path
    assume(pi)
    proj = _check_projection(pi, [Y, Y2], random.Random(seed), range(-80, 81))
    # residual of the later output may mention the earlier one, never the reverse
    assert all(Y2 not in l.vars() for l in proj.residuals[Y])


def test_vector_example_branch():
    x = Var("x", R)
    y1, y2 = Var("y1", R), Var("y2", R)
    pi = [mk_lit(x, "<=", 2), mk_lit(y1, ">", -3 * x), mk_lit(y2, "<", x)]
    m = {x: Fraction(0), y1: Fraction(1), y2: Fraction(-1)}
    proj = project_vector([y1, y2], pi, m)
    assert set(proj.precondition) == {mk_lit(x, "<=", 2)}
    assert proj.residuals[y1] == (mk_lit(y1, ">", -3 * x),)
    assert proj.residuals[y2] == (mk_lit(y2, "<", x),)


def test_unit_disequality_example():
    x = X[0]
    pi = [mk_lit(Y, ">=", x), mk_lit(Y, "<=", x + 2), mk_lit(Y, "!=", x + 1)]
    proj = mbp(Y, pi, {x: Fraction(0), Y: Fraction(0)})
    pre = conj(*proj.precondition)
    for xv in range(-10, 11):
        xm = {x: Fraction(xv)}
        assert pre.holds(xm)
        assert _exists(pi, xm, [Y], range(-15, 16))


def test_equality_leaves_no_residue():
    x = X[0]
    proj = mbp(Y, [mk_lit(Y, "=", x)], {x: Fraction(3), Y: Fraction(3)})
    assert proj.precondition == ()


def test_empty_vector():
    pi = [mk_lit(X[0], ">=", 0)]
    proj = project_vector([], pi, {X[0]: Fraction(1)})
    assert proj.precondition == tuple(pi)


fr = st.fractions(min_value=-3, max_value=3, max_denominator=4)


@given(lits_over([YR] + XR, [fr] * 3, fr), st.lists(fr, min_size=3, max_size=3))
def test_real_mbp_soundness(pi, point):
    assume(pi and any(YR in l.vars() for l in pi))
    seed = check_sat(conj(*pi))
    assume(seed)
    m = {v: seed.model.get(v, Fraction(0)) for v in XR + [YR]}
    proj = mbp(YR, pi, m)
    pre = conj(*proj.precondition)
    assert pre.holds(m)
    # any other model of the projection extends to a model of pi
    xm = dict(zip(XR, point[:2]))
    if pre.holds(xm):
        sub = {x: Term.constant(c) for x, c in xm.items()}
        assert check_sat(conj(*(l.substitute(sub) for l in pi)))


def test_precondition_error_on_bad_model():
    with pytest.raises(MbpPreconditionError):
        mbp(Y, [mk_lit(Y, ">", X[0])], {Y: Fraction(0), X[0]: Fraction(0)})


def test_divisibility_under_div_is_projected():
    # y sits under div: 3*div(y, 2) = x1 with y >= x2
    pi = [mk_lit(3 * mk_div(Y.term(), 2), "=", X[0]), mk_lit(Y, ">=", X[1])]
    m = {Y: Fraction(7), X[0]: Fraction(9), X[1]: Fraction(0)}
    proj = mbp(Y, pi, m)
    pre = conj(*proj.precondition)
    assert pre.holds(m) and Y not in pre.vars()
    w = proj.witnesses[Y]
    for a in range(-9, 10):
        for b in range(-6, 7):
            xm = {X[0]: Fraction(a), X[1]: Fraction(b)}
            if pre.holds(xm):
                assert _holds(pi, {**xm, Y: w.evaluate(xm)})


def test_int_projection_respects_parity():
    # 2y = x has a solution only for even x
    pi = [mk_lit(2 * Y, "=", X[0])]
    proj = mbp(Y, pi, {Y: Fraction(1), X[0]: Fraction(2)})
    pre = conj(*proj.precondition)
    assert pre.holds({X[0]: Fraction(2)})
    for xv in range(-6, 7):
        if pre.holds({X[0]: Fraction(xv)}):
            assert xv % 2 == 0
