from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rsynth.logic import (
    FALSE,
    TRUE,
    BoolVar,
    Lit,
    Sort,
    SortError,
    Var,
    canonicalize,
    conj,
    disj,
    from_dnf,
    isolate,
    lift_ite,
    mk_div,
    mk_lit,
    neg,
    nnf,
    to_dnf,
)
from rsynth.logic.ops import DnfOverflow, is_literal
from rsynth.logic.smtlib import parse_formula, parse_term, term_to_smt, to_smt

from strategies import IVARS, BVARS, formulas, int_lits, int_models, int_terms, ite_lits, real_lits, real_models

I, R = Sort.INT, Sort.REAL
x, y = Var("x", I), Var("y", I)
u = Var("u", R)


def test_term_arithmetic_is_exact():
    t = (x + 2 * y - 3) * Fraction(1, 3)
    assert t.coeff(x) == Fraction(1, 3)
    assert t.const == -1
    assert (t - t).is_constant() and (t - t).const == 0
    assert t.evaluate({x: Fraction(3), y: Fraction(0)}) == 0


def test_mixed_sorts_rejected():
    with pytest.raises(SortError):
        (x + u).sort


def test_nonlinear_product_rejected():
    with pytest.raises(ValueError):
        x.term() * y.term()


def test_div_floor_semantics():
    d = mk_div(x.term(), 3)
    assert d.evaluate({x: Fraction(-1)}) == -1
    assert d.evaluate({x: Fraction(5)}) == 1


def test_canonical_int_literal_is_tightened():
    assert mk_lit(2 * x, "<", 4) == mk_lit(x, "<=", 1)
    assert mk_lit(2 * x, "=", 3) == FALSE
    assert mk_lit(2 * x, "!=", 3) == TRUE
    assert mk_lit(x - x, "<", 1) == TRUE


def test_canonical_real_literal_has_unit_lead():
    lit = mk_lit(2 * u, "<", 1)
    assert isinstance(lit, Lit) and lit.term.coeff(u) == 1


def test_ground_and_connective_folding():
    assert conj(TRUE, mk_lit(x, ">=", 0)) == mk_lit(x, ">=", 0)
    assert disj(TRUE, mk_lit(x, ">=", 0)) == TRUE
    assert neg(neg(BoolVar(BVARS[0]))) == BoolVar(BVARS[0])


def test_isolate_integer_coefficient():
    iso = isolate(mk_lit(3 * y, ">=", x), y)
    assert iso.op == ">="
    for xv in range(-7, 8):
        m = {x: Fraction(xv)}
        b = iso.bound.evaluate(m)
        assert 3 * b >= xv and 3 * (b - 1) < xv


def test_dnf_overflow_is_reported():
    big = conj(*(disj(mk_lit(x, "=", i), mk_lit(y, "=", i)) for i in range(14)))
    with pytest.raises(DnfOverflow):
        to_dnf(big, cap=1000)


# ---------------------------------------------------------------- properties


@given(int_lits(int_terms()), int_models())
def test_canonicalization_preserves_int_semantics(lit, m):
    c = canonicalize(lit)
    assert c.holds(m) == lit.holds(m)


@given(real_lits(), real_models())
def test_canonicalization_preserves_real_semantics(lit, m):
    assert canonicalize(lit).holds(m) == lit.holds(m)


@given(int_lits(int_terms()))
def test_canonicalization_is_idempotent(lit):
    c = canonicalize(lit)
    if isinstance(c, Lit):
        assert canonicalize(c) == c


@given(formulas(int_lits()), int_models())
def test_nnf_equivalent(f, m):
    g = nnf(f)
    assert g.holds(m) == f.holds(m)


@given(formulas(int_lits()), int_models())
def test_dnf_equivalent(f, m):
    ds = to_dnf(f)
    assert all(is_literal(l) for d in ds for l in d)
    assert from_dnf(ds).holds(m) == f.holds(m)


@given(formulas(real_lits()), real_models())
def test_dnf_equivalent_reals(f, m):
    assert from_dnf(to_dnf(f)).holds(m) == f.holds(m)


@given(ite_lits(), int_models())
def test_lift_ite_equivalent(lit, m):
    assert lift_ite(lit).holds(m) == lit.holds(m)


@given(formulas(int_lits(int_terms())), int_models())
def test_smtlib_round_trip(f, m):
    env = IVARS + BVARS
    g = parse_formula(to_smt(f), env)
    assert g.holds(m) == f.holds(m)


@given(int_terms())
def test_smtlib_term_round_trip(t):
    assert parse_term(term_to_smt(t, I), IVARS) == t


@given(st.lists(int_lits(), min_size=1, max_size=4), int_models())
def test_substitution_commutes_with_evaluation(lits, m):
    f = conj(*lits)
    sigma = {IVARS[0]: IVARS[1] + 1}
    m2 = dict(m)
    m2[IVARS[0]] = m[IVARS[1]] + 1
    assert f.substitute(sigma).holds(m) == f.holds(m2)
