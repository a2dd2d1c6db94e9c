import os
import shutil
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from rsynth.fixpoint import synthesize
from rsynth.lustre import load_contract

BENCH = Path(__file__).resolve().parent.parent / "src" / "rsynth" / "benchmarks"

settings.register_profile(
    "default", max_examples=100, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

REALIZABLE = [
    "onedim", "box", "diagonal", "evasion", "follow", "limitedbox", "solitarybox", "square",
    "bounded_evasion", "bounded_evasion_ints", "fuzzer", "example2",
]
UNREALIZABLE = ["empty_transition", "counter_bounded"]

_cache = {}


def synth(name, mode="random"):
    """Synthesize a shipped benchmark once per test session."""
    key = (name, mode)
    if key not in _cache:
        c = load_contract(BENCH / f"{name}.lus")
        _cache[key] = (c, synthesize(c, mode))
    return _cache[key]


@pytest.fixture(scope="session")
def bench_dir():
    return BENCH


needs_gcc = pytest.mark.skipif(shutil.which("gcc") is None, reason="gcc not available")
needs_z3 = pytest.mark.skipif(shutil.which("z3") is None, reason="z3 not available")


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            if rep.when != "call" or "test_acceptance.py::test_criterion_" not in rep.nodeid:
                continue
            n = int(rep.nodeid.split("test_criterion_")[1][:2])
            lines.append((n, f"criterion {n:2d}: {'PASS' if outcome == 'passed' else 'FAIL'}  {rep.nodeid.split('::')[1]}"))
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, text in sorted(lines):
            terminalreporter.write_line(text)
