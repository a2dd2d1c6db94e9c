import random
from fractions import Fraction

from hypothesis import assume, given, settings
from hypothesis import strategies as st

from rsynth.logic import FALSE, TRUE, Lit, Sort, Term, Var, conj, mk_lit
from rsynth.runtime.interp import eval_skolem
from rsynth.runtime.rng import make_rng
from rsynth.skolem import (
    Assign,
    GuardedPair,
    Urng,
    admissible,
    classify,
    extract,
    min_max_chain,
    simplify_skolem,
)
from rsynth.solver import Solver

I, R = Sort.INT, Sort.REAL
x, z = Var("x", I), Var("z", I)
y = Var("y", I)
xr, yr = Var("xr", R), Var("yr", R)
OPS = ["<", "<=", "=", "!=", ">=", ">"]
WINDOW = range(-60, 61)


def test_classify_buckets():
    bk = classify([mk_lit(y, ">", x), mk_lit(y, "<=", 5), mk_lit(y, "!=", z)], y)
    assert bk.GE == (x + 1,) and bk.LE == (Term.constant(5),) and bk.D == (z.term(),)
    assert not bk.G and not bk.L and not bk.E


def test_equality_gives_assignment():
    sk = extract(y, [mk_lit(y, "=", x + 1), mk_lit(y, ">", 0)], "random")
    assert sk == Assign(x + 1)


def test_unbounded_with_disequalities():
    sk = extract(y, [mk_lit(y, "!=", x), mk_lit(y, "!=", z)], "random")
    assert isinstance(sk, Urng) and sk.lower is None and sk.upper is None
    assert set(sk.H) == {x.term(), z.term()}


def test_real_open_interval_flags():
    sk = extract(yr, [mk_lit(yr, ">", xr), mk_lit(yr, "<=", 1)], "random")
    assert sk.lclosed == FALSE and sk.uclosed == TRUE
    assert sk.lower == xr.term() and sk.upper == Term.constant(1)


def test_mixed_strictness_flag_is_symbolic():
    # y > x and y >= z: the lower bound is closed exactly when z wins
    sk = extract(yr, [mk_lit(yr, ">", xr), mk_lit(yr, ">=", Var("w", R))], "random")
    m = {xr: Fraction(0), Var("w", R): Fraction(1)}
    assert sk.lclosed.holds(m)
    m = {xr: Fraction(1), Var("w", R): Fraction(0)}
    assert not sk.lclosed.holds(m)


def test_min_max_chain():
    t = min_max_chain([x.term(), z.term(), Term.constant(3)], "MAX")
    for xv, zv in [(0, 0), (5, 1), (-2, 7)]:
        assert t.evaluate({x: Fraction(xv), z: Fraction(zv)}) == max(xv, zv, 3)


def test_deterministic_avoids_disequalities():
    pi = [mk_lit(y, ">=", 0), mk_lit(y, "!=", x), mk_lit(y, "!=", 0)]
    sk = extract(y, pi, "det")
    for xv in range(-3, 4):
        m = {x: Fraction(xv)}
        v = eval_skolem(sk, m, None)
        assert all(l.holds({**m, y: v}) for l in pi)


def test_simplify_resolves_decided_structure():
    s = Solver()
    sk = extract(y, [mk_lit(y, ">=", x), mk_lit(y, ">=", 0), mk_lit(y, "<=", 3)], "random", TRUE, s)
    # under 1 <= x <= 2 the MAX collapses to x and the point case is unreachable
    simp = simplify_skolem(sk, conj(mk_lit(x, ">=", 1), mk_lit(x, "<=", 2)), s)
    assert isinstance(simp, Urng) and simp.lower == x.term() and simp.upper == Term.constant(3)
    for xv in (1, 2):
        m = {x: Fraction(xv)}
        assert {v for v in range(-5, 6) if admissible(simp, m, Fraction(v))} == set(range(xv, 4))


# ---------------------------------------------------------------- properties


def _random_pi(rnd, ys_coeffs=(1, -1, 2, -2, 3)):
    lits = []
    for _ in range(rnd.randint(1, 4)):
        op = rnd.choice(OPS)
        a = rnd.choice((1, -1)) if op == "=" else rnd.choice(ys_coeffs)
        t = a * y.term() + rnd.randint(-2, 2) * x.term() + rnd.randint(-2, 2) * z.term() + rnd.randint(-5, 5)
        l = mk_lit(t, op, 0)
        if isinstance(l, Lit):
            lits.append(l)
    return lits


def _brute(pi, m):
    return {v for v in WINDOW if all(l.holds({**m, y: Fraction(v)}) for l in pi)}


@settings(max_examples=200)
@given(st.integers(0, 2 ** 32))
def test_random_extraction_is_exact(seed):
    """Admissible values of the generated call coincide with the solutions of pi."""
    rnd = random.Random(seed)
    pi = _random_pi(rnd)
    assume(any(y in l.vars() for l in pi))
    sk = extract(y, pi, "random")
    for _ in range(20):
        m = {x: Fraction(rnd.randint(-5, 5)), z: Fraction(rnd.randint(-5, 5))}
        sols = _brute(pi, m)
        if not sols:
            continue
        got = {v for v in WINDOW if admissible(sk, m, Fraction(v))}
        assert got == sols


@settings(max_examples=200)
@given(st.integers(0, 2 ** 32))
def test_deterministic_extraction_is_sound(seed):
    rnd = random.Random(seed)
    pi = _random_pi(rnd)
    assume(any(y in l.vars() for l in pi))
    sk = extract(y, pi, "det")
    for _ in range(20):
        m = {x: Fraction(rnd.randint(-5, 5)), z: Fraction(rnd.randint(-5, 5))}
        if _brute(pi, m):
            v = eval_skolem(sk, m, None)
            assert all(l.holds({**m, y: v}) for l in pi)


fr = st.fractions(min_value=-3, max_value=3, max_denominator=4)


@settings(max_examples=150)
@given(st.lists(st.tuples(fr, fr, st.sampled_from(OPS)), min_size=1, max_size=4), fr, st.integers(0, 99))
def test_real_draws_satisfy_constraints(spec, xv, seed):
    pi = [l for c, k, op in spec if isinstance(l := mk_lit(yr - c * xr, op, k), Lit)]
    assume(pi)
    m = {xr: xv}
    s = Solver()
    sub = {xr: Term.constant(xv)}
    assume(s.check_sat(conj(*(l.substitute(sub) for l in pi))))
    rng = make_rng("uniform", seed)
    for mode in ("random", "det"):
        sk = extract(yr, pi, mode)
        for _ in range(5):
            v = eval_skolem(sk, m, rng)
            assert all(l.holds({**m, yr: v}) for l in pi)


def test_guarded_pair_semantics():
    sk = GuardedPair(mk_lit(x, ">=", 0), Assign(x.term()), Assign(-x.term()))
    assert eval_skolem(sk, {x: Fraction(-4)}, None) == 4
    assert admissible(sk, {x: Fraction(2)}, Fraction(2))
