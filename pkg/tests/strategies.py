"""Hypothesis strategies for small linear-arithmetic formulas."""
from fractions import Fraction

from hypothesis import strategies as st

from rsynth.logic import BoolVar, Lit, Sort, Term, Var, conj, disj, mk_div, mk_ite, mk_ite_term, neg

I, R = Sort.INT, Sort.REAL
IVARS = [Var("a", I), Var("b", I), Var("c", I)]
RVARS = [Var("u", R), Var("v", R)]
BVARS = [Var("p", Sort.BOOL)]
OPS = ["<", "<=", "=", "!=", ">=", ">"]

small = st.integers(-4, 4)
fracs = st.fractions(min_value=-4, max_value=4, max_denominator=6)


def linear(vs, coeff=small, const=small):
    return st.builds(
        lambda cs, k: Term(zip(vs, cs), k),
        st.lists(coeff, min_size=len(vs), max_size=len(vs)),
        const,
    )


def int_terms():
    base = linear(IVARS)
    return st.one_of(
        base,
        st.builds(lambda t, k, r: r + mk_div(t, k) * 1, base, st.integers(1, 3), base),
    )


def int_lits(terms=None):
    return st.builds(lambda t, op: Lit(t, op), terms if terms is not None else linear(IVARS), st.sampled_from(OPS))


def real_lits():
    return st.builds(lambda t, op: Lit(t, op), linear(RVARS, fracs, fracs), st.sampled_from(OPS))


def formulas(lits, depth=3):
    atoms = st.one_of(lits, st.sampled_from([BoolVar(b) for b in BVARS]))
    return st.recursive(
        atoms,
        lambda sub: st.one_of(
            st.builds(lambda a, b: conj(a, b), sub, sub),
            st.builds(lambda a, b: disj(a, b), sub, sub),
            st.builds(neg, sub),
            st.builds(mk_ite, sub, sub, sub),
        ),
        max_leaves=8,
    )


def int_models():
    return st.fixed_dictionaries(
        {**{v: small.map(Fraction) for v in IVARS}, **{b: st.sampled_from([Fraction(0), Fraction(1)]) for b in BVARS}}
    )


def real_models():
    return st.fixed_dictionaries(
        {**{v: fracs for v in RVARS}, **{b: st.sampled_from([Fraction(0), Fraction(1)]) for b in BVARS}}
    )


def ite_lits():
    """Literals over terms that contain an ite atom."""
    base = linear(IVARS)
    return st.builds(
        lambda c, a, b, r, op: Lit(r + mk_ite_term(c, a, b, I), op),
        int_lits(), base, base, base, st.sampled_from(OPS),
    )
