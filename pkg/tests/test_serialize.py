import json

import pytest

from rsynth.serialize import DumpError, dumps, load_witness

from conftest import REALIZABLE, synth


@pytest.mark.parametrize("mode", ["random", "det"])
@pytest.mark.parametrize("name", REALIZABLE)
def test_dump_round_trip(name, mode):
    c, r = synth(name, mode)
    text = dumps(c, r, mode)
    w = load_witness(text)
    assert w.contract == c and w.tree == r.tree and w.F == r.F and w.y_init == r.y_init
    assert w.mode == mode
    # dumps are stable text
    assert dumps(c, r, mode) == text


def test_bad_format_rejected():
    with pytest.raises(DumpError):
        load_witness(json.dumps({"format": "something-else"}))


def test_truncated_dump_rejected():
    c, r = synth("onedim")
    data = json.loads(dumps(c, r, "random"))
    del data["tree"]
    with pytest.raises(DumpError):
        load_witness(data)


def test_garbled_formula_rejected():
    c, r = synth("onedim")
    data = json.loads(dumps(c, r, "random"))
    data["A"] = "(>= x"
    with pytest.raises(DumpError):
        load_witness(data)
