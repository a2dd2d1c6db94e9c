from fractions import Fraction

import pytest

from rsynth.fixpoint import synthesize
from rsynth.logic import Sort, Var
from rsynth.lustre import ElaborationError, LustreSyntaxError, elaborate, parse, parse_file, pretty

from conftest import BENCH

ALL = sorted(p.stem for p in BENCH.glob("*.lus"))


def node(body, params="x, y : int", extra=""):
    # pragmas run to the end of their line
    body = body.replace("--%PROPERTY ok;", "\n--%PROPERTY ok;\n")
    return f"node n({params}) returns (); {extra} let {body}\n--%REALIZABLE x;\ntel;"


def test_onedim_elaboration():
    c = elaborate(parse_file(BENCH / "onedim.lus"))
    x, y, pos = Var("x", Sort.INT), Var("y", Sort.INT), Var("position", Sort.INT)
    assert c.inputs == (x,) and set(c.outputs) == {y, pos}
    m = {x: Fraction(1), y: Fraction(-1), pos: Fraction(0),
         y.prime(): Fraction(1), pos.prime(): Fraction(2)}
    assert c.A.holds(m) and c.G_T.holds(m)
    assert not c.G_T.holds({**m, pos.prime(): Fraction(1)})
    assert c.G_I.holds({y: Fraction(0), pos: Fraction(0)})


def test_comments_pragmas_and_reals():
    src = """
    (* block comment *)
    node r(a, b : real) returns ();
    var ok : bool;
    let
      assert a >= -1.5 and a <= 2.5e0;
      ok = b = a / 2.0 or b > 1.0; -- trailing comment
      --%PROPERTY ok;
      --%REALIZABLE a;
    tel
    """
    c = elaborate(parse(src))
    a, b = Var("a", Sort.REAL), Var("b", Sort.REAL)
    assert c.A.holds({a: Fraction(-3, 2)}) and not c.A.holds({a: Fraction(3)})
    assert c.G_T.holds({a: Fraction(1), b.prime(): Fraction(1, 2)})


def test_ite_and_arrow():
    src = node("ok = y = (0 -> if pre(y) > 2 then 0 else pre(y) + 1); --%PROPERTY ok;", extra="var ok : bool;")
    c = elaborate(parse(src))
    # ok depends on pre, so it stays a state variable (Bool as 0/1)
    y, ok = Var("y", Sort.INT), Var("ok", Sort.BOOL)
    assert set(c.outputs) == {y, ok}
    one = {ok: Fraction(1), ok.prime(): Fraction(1)}
    assert c.G_I.holds({**one, y: Fraction(0)})
    assert c.G_T.holds({**one, y: Fraction(3), y.prime(): Fraction(0)})
    assert c.G_T.holds({**one, y: Fraction(1), y.prime(): Fraction(2)})
    assert not c.G_T.holds({**one, y: Fraction(1), y.prime(): Fraction(0)})


@pytest.mark.parametrize("src", [
    "node n(x : int) returns (); let assert x >= ; tel;",
    "node n(x : int) returns () let tel;",
    "node n(x : int) returns (); let y = 1 tel;",
    "node n(x : int) returns (); let assert x # 1; tel;",
])
def test_syntax_errors(src):
    with pytest.raises(LustreSyntaxError):
        parse(src)


@pytest.mark.parametrize("body,extra,needle", [
    ("a = b + 1; b = a - 1; ok = a > 0; --%PROPERTY ok;", "var a, b : int; ok : bool;", "circular"),
    ("ok = pre(y) > 0; --%PROPERTY ok;", "var ok : bool;", "pre"),
    ("ok = y = (0 -> pre(pre(y))); --%PROPERTY ok;", "var ok : bool;", "nested pre"),
    ("ok = z > 0; --%PROPERTY ok;", "var ok : bool;", "undeclared"),
    ("ok = y = (0 -> pre(x)); --%PROPERTY ok;", "var ok : bool;", "pre of input"),
    ("assert y > 0; ok = y > 0; --%PROPERTY ok;", "var ok : bool;", "current output"),
    ("ok = y * y > 0; --%PROPERTY ok;", "var ok : bool;", "non-linear"),
    ("x = 1; ok = y > 0; --%PROPERTY ok;", "var ok : bool;", "input"),
])
def test_elaboration_errors(body, extra, needle):
    with pytest.raises(ElaborationError, match=needle):
        elaborate(parse(node(body, extra=extra)))


def test_error_positions_are_reported():
    with pytest.raises(ElaborationError) as info:
        elaborate(parse(node("ok = q > 0;\n --%PROPERTY ok;", extra="var ok : bool;")))
    assert ":" in str(info.value)


@pytest.mark.parametrize("name", ALL)
def test_pretty_print_round_trip(name):
    prog = parse_file(BENCH / f"{name}.lus")
    text = pretty(prog)
    again = parse(text)
    assert pretty(again) == text
    assert elaborate(again) == elaborate(prog)


def test_round_trip_preserves_realizability():
    prog = parse_file(BENCH / "onedim.lus")
    assert synthesize(elaborate(parse(pretty(prog))), "det").verdict == "realizable"
