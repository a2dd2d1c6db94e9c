import io
import math
from fractions import Fraction

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from rsynth.logic import Sort
from rsynth.runtime import (
    AssumptionViolation,
    EmptyRange,
    GuaranteeViolation,
    InputSampler,
    RngContractViolation,
    RngProvider,
    ValidatingRng,
    make_rng,
    run,
    step,
)
from rsynth.runtime.fuzz import constant_feedback, fuzz_emit, fuzz_records, stream_feedback
from rsynth.runtime.games import GameConfig, GameConfigError, simulate_game

from conftest import BENCH, synth

KINDS = ["uniform", "center", "corner"]
fr = st.fractions(min_value=-50, max_value=50, max_denominator=7)


@given(st.sampled_from(KINDS), st.integers(0, 999), fr, fr, st.booleans(), st.booleans(),
       st.lists(st.integers(-50, 50), max_size=4))
def test_int_draws_meet_postconditions(kind, seed, a, b, lc, uc, H):
    lo, hi = min(a, b), max(a, b)
    first = math.ceil(lo) if lc else math.floor(lo) + 1
    last = math.floor(hi) if uc else math.ceil(hi) - 1
    assume(set(range(first, last + 1)) - set(H))
    v = make_rng(kind, seed).draw([Fraction(h) for h in H], lc, uc, lo, hi, Sort.INT)
    assert v.denominator == 1 and first <= v <= last and v not in H


@given(st.sampled_from(KINDS), st.integers(0, 999), fr, fr, st.booleans(), st.booleans(),
       st.lists(fr, max_size=3), st.sampled_from(["both", "lower", "upper", "none"]))
def test_real_draws_meet_postconditions(kind, seed, a, b, lc, uc, H, sides):
    lo, hi = min(a, b), max(a, b)
    assume(lo < hi)
    lo = lo if sides in ("both", "lower") else None
    hi = hi if sides in ("both", "upper") else None
    v = make_rng(kind, seed).draw(H, lc, uc, lo, hi, Sort.REAL)
    assert v not in H
    assert lo is None or v > lo or (lc and v == lo)
    assert hi is None or v < hi or (uc and v == hi)


def test_unbounded_int_draw_fits_machine_ints():
    r = make_rng("uniform", 1)
    for _ in range(100):
        v = r.draw([], True, True, None, None, Sort.INT)
        assert -2 ** 31 <= v <= 2 ** 31 - 1


def test_empty_ranges_are_reported():
    r = make_rng("uniform", 0)
    with pytest.raises(EmptyRange):
        r.draw([], False, True, Fraction(1), Fraction(1), Sort.INT)
    with pytest.raises(EmptyRange):
        r.draw([Fraction(0), Fraction(1)], True, True, Fraction(0), Fraction(1), Sort.INT)


class _Liar(RngProvider):
    name = "liar"

    def index(self, n):
        return 0

    def draw(self, H, lclosed, uclosed, lower, upper, sort=Sort.INT):
        return Fraction(lower) - 1


def test_validating_wrapper_catches_bad_provider():
    with pytest.raises(RngContractViolation):
        ValidatingRng(_Liar(0)).draw([], True, True, Fraction(0), Fraction(3), Sort.INT)


def test_unknown_provider():
    with pytest.raises(ValueError):
        make_rng("gaussian")


def test_bias_providers_are_biased():
    corner = make_rng("corner", 3)
    center = make_rng("center", 3)
    low = sum(corner.draw([], True, True, Fraction(0), Fraction(99)) < 25 for _ in range(2000))
    mid = sum(25 <= center.draw([], True, True, Fraction(0), Fraction(99)) < 75 for _ in range(2000))
    # uniform would give about 500 and 1000
    assert low > 1000 and mid > 1300


# ---------------------------------------------------------------- stepping


def _onedim(mode="random"):
    c, r = synth("onedim", mode)
    v = {x.name: x for x in c.inputs + c.outputs}
    return c, r, v["x"], v["y"], v["position"]


def test_step_examples():
    c, r, x, y, pos = _onedim()
    rng = make_rng("uniform", 5)
    seen = set()
    for _ in range(1000):
        res = step(r.tree, c, {y: Fraction(0), pos: Fraction(1)}, {x: Fraction(0)}, rng, r.F)
        seen.add(res.state[y])
        assert res.state[pos] == 1 + res.state[y]
    assert seen == {-1, 0, 1}
    res = step(r.tree, c, {y: Fraction(0), pos: Fraction(0)}, {x: Fraction(-1)}, rng, r.F)
    assert res.state[y] == 1 and res.state[pos] == 0


def test_step_rejects_bad_inputs_and_states():
    c, r, x, y, pos = _onedim()
    with pytest.raises(AssumptionViolation):
        step(r.tree, c, {y: Fraction(0), pos: Fraction(0)}, {x: Fraction(2)}, F=r.F)
    with pytest.raises(AssumptionViolation):
        step(r.tree, c, {y: Fraction(0), pos: Fraction(-1)}, {x: Fraction(0)}, F=r.F)


def test_strict_step_raises_on_violation():
    c, r, x, y, pos = _onedim()
    # without F the witness may leave the viable set from a hopeless state
    with pytest.raises(GuaranteeViolation):
        step(r.tree, c, {y: Fraction(0), pos: Fraction(-5)}, {x: Fraction(-1)})
    assert not step(r.tree, c, {y: Fraction(0), pos: Fraction(-5)}, {x: Fraction(-1)}, strict=False).ok


def test_sampler_respects_assumptions():
    c, r, x, y, pos = _onedim()
    s = InputSampler(c, seed=1)
    for _ in range(200):
        assert c.A.holds({**s.sample(r.y_init), **r.y_init})


def test_run_is_reproducible():
    c, r, *_ = _onedim()
    a = run(r.tree, c, r.y_init, 200, make_rng("uniform", 9), r.F, seed=4)
    b = run(r.tree, c, r.y_init, 200, make_rng("uniform", 9), r.F, seed=4)
    assert a == b and len(a) == 201


# ---------------------------------------------------------------- games


def _game(name, **over):
    cfg = GameConfig.load(BENCH / f"{name}.json")
    for k, v in over.items():
        setattr(cfg, k, v)
    return cfg


def test_zero_turn_game_covers_start_cell():
    cfg = _game("chaser_int")
    c, r = synth("bounded_evasion_ints")
    tr = simulate_game(r.tree, c, r.y_init, cfg, r.F, turns=0)
    assert len(tr.records) == 1 and len(tr.visited) == 1 and tr.total_cells == 49
    assert tr.coverage == pytest.approx(1 / 49)


def test_game_csv(tmp_path):
    cfg = _game("patrol_real", turns=20)
    c, r = synth("bounded_evasion")
    tr = simulate_game(r.tree, c, r.y_init, cfg, r.F)
    assert not tr.violation and tr.coverage is None
    out = io.StringIO()
    tr.write_csv(out)
    rows = out.getvalue().strip().splitlines()
    assert rows[0] == "turn,rx,ry,ax,ay,ok" and len(rows) == 22


@pytest.mark.parametrize("bad", [
    {"delta": "0"},
    {"policy": "teleport"},
    {"policy": "patrol", "waypoints": []},
    {"adversary_start": ["0", "0"]},
])
def test_game_config_validation(bad):
    base = {"contract": "bounded_evasion_ints.lus", "bounds": [0, 6, 0, 6], "delta": "1",
            "robot_start": ["0", "0"], "adversary_start": ["6", "6"], "policy": "chaser", "turns": 10}
    base.update(bad)
    with pytest.raises(GameConfigError):
        GameConfig.from_dict(base)


# ---------------------------------------------------------------- fuzzer


def test_fuzz_records_and_lines():
    c, r = synth("fuzzer")
    recs = list(fuzz_records(r.tree, c, r.y_init, constant_feedback(False), 500, make_rng("uniform", 2), r.F))
    assert len(recs) == 500 and all(0 <= x.p <= 1 for x in recs)
    k, p, v = recs[0].line().split()
    assert k == "1" and len(p.split(".")[1]) == 9


def test_stream_feedback_stops_at_eof():
    c, r = synth("fuzzer")
    fb = stream_feedback(io.StringIO("1\n0\n\n1\n"))
    assert len(list(fuzz_records(r.tree, c, r.y_init, fb, F=r.F))) == 3
    with pytest.raises(ValueError):
        stream_feedback(io.StringIO("maybe\n"))()


def test_fuzz_emit_survives_closed_sink():
    c, r = synth("fuzzer")
    sink = io.StringIO()
    sink.close()
    assert fuzz_emit(r.tree, c, r.y_init, constant_feedback(True), sink, 10, F=r.F) == 0
