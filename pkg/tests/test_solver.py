import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings

from rsynth.logic import Sort, Var, conj, disj, mk_div, mk_lit
from rsynth.solver import Solver, SolverConfig, check_sat, is_valid
from rsynth.solver import fm

from conftest import needs_z3
from strategies import BVARS, IVARS, RVARS, formulas, int_lits, int_terms, real_lits

I, R = Sort.INT, Sort.REAL
x, y = Var("x", I), Var("y", I)
u, v = Var("u", R), Var("v", R)


def test_simple_sat_and_model():
    f = conj(mk_lit(x, ">=", 3), mk_lit(x + y, "=", 10), mk_lit(y, "!=", 7))
    r = check_sat(f)
    assert r and f.holds(r.model)


def test_integer_gap_is_unsat():
    assert not check_sat(conj(mk_lit(2 * x, ">=", 1), mk_lit(2 * x, "<=", 1)))
    assert not check_sat(conj(mk_lit(3 * x - 3 * y, ">=", 1), mk_lit(3 * x - 3 * y, "<=", 2)))


def test_real_strict_bounds():
    assert check_sat(conj(mk_lit(u, ">", 0), mk_lit(u, "<", Fraction(1, 10 ** 9))))
    assert not check_sat(conj(mk_lit(u, ">", v), mk_lit(v, ">", u)))


def test_disequality_splitting():
    f = conj(mk_lit(x, ">=", 0), mk_lit(x, "<=", 2), mk_lit(x, "!=", 0), mk_lit(x, "!=", 1), mk_lit(x, "!=", 2))
    assert not check_sat(f)


def test_div_atoms():
    f = conj(mk_lit(mk_div(x.term(), 3), "=", 2), mk_lit(x, ">", 7))
    r = check_sat(f)
    assert r and r.model[x] == 8


def test_validity():
    assert is_valid(disj(mk_lit(x, ">=", 0), mk_lit(x, "<", 0)))
    assert not is_valid(mk_lit(x, ">=", 0))


def test_fm_integer_coefficients():
    coeffs, k, op = fm.lit_constraints(mk_lit(Fraction(1, 2) * u + Fraction(1, 3) * v, "<=", 1))
    assert coeffs == {u: 3, v: 2} and k == -6 and op == "<="
    # the cached translation hands out independent dictionaries
    coeffs[u] = 99
    assert fm.lit_constraints(mk_lit(Fraction(1, 2) * u + Fraction(1, 3) * v, "<=", 1))[0][u] != 99


def test_bad_timeout_rejected():
    with pytest.raises(ValueError):
        SolverConfig(timeout_ms=0)


BOX = conj(*(conj(mk_lit(a, ">=", -4), mk_lit(a, "<=", 4)) for a in IVARS))


def _brute(f):
    for vals in itertools.product(range(-4, 5), repeat=len(IVARS)):
        for pb in (0, 1):
            m = dict(zip(IVARS, map(Fraction, vals)))
            m[BVARS[0]] = Fraction(pb)
            if f.holds(m):
                return True
    return False


@settings(max_examples=60)
@given(formulas(int_lits(int_terms())))
def test_int_solver_agrees_with_enumeration(f):
    g = conj(f, BOX)
    r = Solver().check_sat(g)
    assert bool(r) == _brute(g)
    if r:
        full = {a: r.model.get(a, Fraction(0)) for a in IVARS + BVARS}
        assert g.holds(full)


@given(formulas(real_lits()))
def test_real_models_are_models(f):
    r = Solver().check_sat(f)
    if r:
        full = {a: r.model.get(a, Fraction(0)) for a in RVARS + BVARS}
        assert f.holds(full)


@needs_z3
@settings(max_examples=40)
@given(formulas(real_lits()))
def test_real_verdicts_match_z3(f):
    ext = Solver(SolverConfig(backend="z3 -in"))
    try:
        assert bool(Solver().check_sat(f)) == bool(ext.check_sat(f))
    finally:
        ext.close()


def test_query_cache_hits():
    s = Solver()
    f = conj(mk_lit(x, ">=", 1), mk_lit(x, "<=", 1))
    a = s.check_sat(f)
    b = s.check_sat(f)
    assert a is b
