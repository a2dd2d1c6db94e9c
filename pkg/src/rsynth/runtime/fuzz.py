"""Fuzz-emitter loop driven by a fuzzer contract.

The contract has a boolean input ``cvg`` (coverage progressed on the previous
test) and outputs ``p`` and ``in_sys``.  Each step reads one feedback bit,
runs the witness and writes the generated test input.  A record carries the
``p`` that governed the emitted ``in_sys``: the contract ties ``in_sys`` to
the previous value of ``p``, so that is the value printed next to it.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .interp import step
from .rng import make_rng

VALID_RANGE = (0, 100)


@dataclass(frozen=True)
class FuzzRecord:
    step: int
    p: Fraction
    in_sys: Fraction
    cvg: bool

    @property
    def valid(self) -> bool:
        return VALID_RANGE[0] <= self.in_sys <= VALID_RANGE[1]

    def line(self) -> str:
        return f"{self.step} {float(self.p):.9f} {self.in_sys}"


def constant_feedback(value: bool):
    def read():
        return value

    return read


def stream_feedback(fh=None):
    """Reads one ``0``/``1`` per line; returns None at end of input."""
    fh = fh or sys.stdin

    def read():
        while True:
            line = fh.readline()
            if not line:
                return None
            line = line.strip()
            if line in ("0", "1"):
                return line == "1"
            if line:
                raise ValueError(f"feedback must be 0 or 1, got {line!r}")

    return read


def fuzz_records(tree, contract, y_init, feedback, steps=None, rng=None, F=None,
                 names=("cvg", "p", "in_sys")) -> Iterator[FuzzRecord]:
    by_name = {v.name: v for v in contract.inputs + contract.outputs}
    cvg, p, in_sys = (by_name[n] for n in names)
    rng = rng or make_rng("uniform", 0)
    state = dict(y_init)
    k = 0
    while steps is None or k < steps:
        bit = feedback()
        if bit is None:
            return
        governing = state[p]
        state = step(tree, contract, state, {cvg: Fraction(int(bit))}, rng, F).state
        k += 1
        yield FuzzRecord(k, governing, state[in_sys], bool(bit))


def fuzz_emit(tree, contract, y_init, feedback, sink=None, steps=None, rng=None, F=None) -> int:
    """Write one record per line to ``sink``; stops cleanly when the sink closes."""
    sink = sink or sys.stdout
    n = 0
    try:
        for rec in fuzz_records(tree, contract, y_init, feedback, steps, rng, F):
            sink.write(rec.line() + "\n")
            sink.flush()
            n += 1
    except (BrokenPipeError, ValueError) as exc:
        # ValueError here comes from writing to a closed file
        if isinstance(exc, ValueError) and "closed file" not in str(exc):
            raise
    return n
