"""Random number providers for URNG leaves.

A provider implements ``draw(H, lclosed, uclosed, lower, upper, sort)``.
Bounds are exact Fractions or ``None`` for an infinite side.  Integer draws
with an infinite side fall back to the 32-bit range; real draws pick a point
on the grid of multiples of 2**-32 inside the interval (a window of width
2**20 stands in for an infinite side).  Values in H are avoided by
resampling and, when that keeps failing, by a deterministic scan.
"""
from __future__ import annotations

import math
import random
from fractions import Fraction

from ..logic.expr import Sort

INT_MIN = -(2 ** 31)
INT_MAX = 2 ** 31 - 1
GRID = 2 ** 32
REAL_WINDOW = 2 ** 20
AVOID_TRIES = 10000


class RngContractViolation(AssertionError):
    """A provider returned a value outside its postconditions."""


class EmptyRange(ValueError):
    """The requested interval has no admissible value."""


def int_range(lclosed, uclosed, lower, upper):
    """Smallest and largest admissible integers, before avoiding H."""
    if lower is None:
        lo = INT_MIN
    else:
        lo = math.ceil(lower) if lclosed else math.floor(lower) + 1
    if upper is None:
        hi = INT_MAX
    else:
        hi = math.floor(upper) if uclosed else math.ceil(upper) - 1
    return lo, hi


def real_window(lower, upper):
    if lower is None and upper is None:
        return Fraction(-REAL_WINDOW // 2), Fraction(REAL_WINDOW // 2)
    if lower is None:
        return upper - REAL_WINDOW, upper
    if upper is None:
        return lower, lower + REAL_WINDOW
    return lower, upper


def in_bounds(v, lclosed, uclosed, lower, upper) -> bool:
    if lower is not None and (v < lower or (v == lower and not lclosed)):
        return False
    if upper is not None and (v > upper or (v == upper and not uclosed)):
        return False
    return True


class RngProvider:
    """Base provider.  Subclasses choose how an index in ``range(n)`` is picked."""

    name = "base"

    def __init__(self, seed=None):
        self.seed = seed
        self.random = random.Random(seed)

    def index(self, n: int) -> int:
        raise NotImplementedError

    def _candidates(self, lclosed, uclosed, lower, upper, sort):
        """Return (count, value_of) describing the finite candidate grid."""
        if sort is Sort.REAL:
            lo, hi = real_window(lower, upper)
            if lo > hi or (lo == hi and not (lclosed and uclosed)):
                raise EmptyRange(f"empty real interval ({lo}, {hi})")
            if lo == hi:
                return 1, lambda k: lo
            # multiples of 2**-32 keep denominators bounded along a run
            a, b = lo * GRID, hi * GRID
            first = math.ceil(a) if lclosed and lower is not None else math.floor(a) + 1
            last = math.floor(b) if uclosed and upper is not None else math.ceil(b) - 1
            if first <= last:
                return last - first + 1, lambda k: Fraction(first + k, GRID)
            # the interval is narrower than the grid: fall back to a relative grid
            step = (hi - lo) / GRID
            return GRID - 1, lambda k: lo + (k + 1) * step
        lo, hi = int_range(lclosed, uclosed, lower, upper)
        if lo > hi:
            raise EmptyRange(f"empty integer interval [{lo}, {hi}]")
        return hi - lo + 1, lambda k: Fraction(lo + k)

    def draw(self, H, lclosed, uclosed, lower, upper, sort=Sort.INT) -> Fraction:
        n, value = self._candidates(bool(lclosed), bool(uclosed), lower, upper, sort)
        avoid = set(H)
        for _ in range(AVOID_TRIES if avoid else 1):
            v = value(self.index(n))
            if v not in avoid:
                return v
        for k in range(n):
            v = value(k)
            if v not in avoid:
                return v
        raise EmptyRange("every candidate value is excluded")


class UniformRng(RngProvider):
    name = "uniform"

    def index(self, n):
        return self.random.randrange(n)


class CenterBiasRng(RngProvider):
    """Triangular distribution peaking at the middle of the interval."""

    name = "center"

    def index(self, n):
        u = (self.random.random() + self.random.random()) / 2
        return min(n - 1, int(u * n))


class CornerBiasRng(RngProvider):
    """Skewed towards the lower end of the interval."""

    name = "corner"

    def index(self, n):
        u = self.random.random() ** 4
        return min(n - 1, int(u * n))


class ValidatingRng:
    """Wraps a provider and checks every draw against the URNG postconditions."""

    def __init__(self, inner: RngProvider):
        self.inner = inner
        self.seed = inner.seed
        self.draws = 0

    @property
    def random(self):
        return self.inner.random

    def draw(self, H, lclosed, uclosed, lower, upper, sort=Sort.INT) -> Fraction:
        v = self.inner.draw(H, lclosed, uclosed, lower, upper, sort)
        self.draws += 1
        if v in set(H):
            raise RngContractViolation(f"{self.inner.name} returned avoided value {v}")
        if not in_bounds(v, lclosed, uclosed, lower, upper):
            raise RngContractViolation(f"{self.inner.name} returned {v} outside its interval")
        if sort is Sort.INT and v.denominator != 1:
            raise RngContractViolation(f"{self.inner.name} returned non-integer {v}")
        return v


PROVIDERS = {"uniform": UniformRng, "center": CenterBiasRng, "corner": CornerBiasRng}


def make_rng(kind: str = "uniform", seed=None) -> ValidatingRng:
    try:
        return ValidatingRng(PROVIDERS[kind](seed))
    except KeyError:
        raise ValueError(f"unknown RNG provider {kind!r}") from None
