"""Avoidance games: a synthesized robot against a scripted adversary.

The game contract has the adversary position as inputs (``ax``, ``ay`` by
default) and the robot position among its outputs (``rx``, ``ry``).  Each turn
the adversary moves first, then the witness computes the robot's reply.
"""
from __future__ import annotations

import csv
import json
import math
import os
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from ..logic.expr import Sort
from .interp import step
from .rng import make_rng


class GameConfigError(ValueError):
    pass


def _frac(x) -> Fraction:
    return Fraction(str(x)) if isinstance(x, float) else Fraction(x)


@dataclass
class GameConfig:
    contract: str
    bounds: Optional[tuple]  # (x_min, x_max, y_min, y_max) or None when unbounded
    delta: Fraction
    robot_start: tuple
    adversary_start: tuple
    policy: str = "chaser"  # patrol | chaser
    waypoints: tuple = ()
    turns: int = 1000
    seed: int = 0
    robot_vars: tuple = ("rx", "ry")
    adversary_vars: tuple = ("ax", "ay")
    rng: str = "uniform"
    base_dir: str = "."

    def __post_init__(self):
        if self.delta <= 0:
            raise GameConfigError("delta must be positive")
        if tuple(self.robot_start) == tuple(self.adversary_start):
            raise GameConfigError("robot and adversary must start on different positions")
        if self.policy not in ("patrol", "chaser"):
            raise GameConfigError(f"unknown adversary policy {self.policy!r}")
        if self.policy == "patrol" and not self.waypoints:
            raise GameConfigError("a patrol policy needs waypoints")

    @classmethod
    def from_dict(cls, d: dict, base_dir: str = "."):
        try:
            b = d.get("bounds")
            bounds = None if b is None else tuple(_frac(b[k]) for k in ("x_min", "x_max", "y_min", "y_max"))
            return cls(
                contract=d["contract"],
                bounds=bounds,
                delta=_frac(d["delta"]),
                robot_start=tuple(_frac(v) for v in d["robot_start"]),
                adversary_start=tuple(_frac(v) for v in d["adversary_start"]),
                policy=d.get("policy", "chaser"),
                waypoints=tuple(tuple(_frac(v) for v in w) for w in d.get("waypoints", ())),
                turns=int(d.get("turns", 1000)),
                seed=int(d.get("seed", 0)),
                robot_vars=tuple(d.get("robot_vars", ("rx", "ry"))),
                adversary_vars=tuple(d.get("adversary_vars", ("ax", "ay"))),
                rng=d.get("rng", "uniform"),
                base_dir=base_dir,
            )
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            if isinstance(exc, GameConfigError):
                raise
            raise GameConfigError(f"malformed game config: {exc}") from exc

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh), os.path.dirname(os.path.abspath(path)))

    @property
    def contract_path(self) -> str:
        return os.path.join(self.base_dir, self.contract)


@dataclass
class RunTrace:
    records: list = field(default_factory=list)  # dicts with turn, rx, ry, ax, ay, ok
    visited: set = field(default_factory=set)
    violation: bool = False
    diagnostic: str = ""
    total_cells: Optional[int] = None

    @property
    def coverage(self) -> Optional[float]:
        if not self.total_cells:
            return None
        return len(self.visited) / self.total_cells

    def write_csv(self, path_or_file):
        close = isinstance(path_or_file, (str, os.PathLike))
        fh = open(path_or_file, "w", newline="", encoding="utf-8") if close else path_or_file
        try:
            w = csv.writer(fh)
            w.writerow(["turn", "rx", "ry", "ax", "ay", "ok"])
            for r in self.records:
                w.writerow([r["turn"]] + [float(r[k]) for k in ("rx", "ry", "ax", "ay")] + [int(r["ok"])])
        finally:
            if close:
                fh.close()


# ---------------------------------------------------------------- adversaries


class Patrol:
    """Cycles through waypoints, moving up to delta per axis each turn."""

    def __init__(self, cfg: GameConfig, rnd: random.Random, integer: bool):
        self.cfg, self.rnd, self.integer = cfg, rnd, integer
        self.target = 0
        # start heading to the first waypoint that differs from the start
        if tuple(cfg.waypoints[0]) == tuple(cfg.adversary_start):
            self.target = 1 % len(cfg.waypoints)

    def move(self, pos, robot):
        wp = self.cfg.waypoints[self.target]
        nxt = tuple(_toward(p, w, _stride(self.rnd, self.cfg.delta, self.integer)) for p, w in zip(pos, wp))
        if nxt == tuple(wp):
            self.target = (self.target + 1) % len(self.cfg.waypoints)
        return nxt


class Chaser:
    """Moves toward the robot by a uniform draw in [0, delta] on each axis."""

    def __init__(self, cfg: GameConfig, rnd: random.Random, integer: bool):
        self.cfg, self.rnd, self.integer = cfg, rnd, integer

    def move(self, pos, robot):
        return tuple(_toward(p, r, _stride(self.rnd, self.cfg.delta, self.integer)) for p, r in zip(pos, robot))


def _stride(rnd, delta, integer) -> Fraction:
    if integer:
        return Fraction(rnd.randint(0, math.floor(delta)))
    return delta * Fraction(rnd.randint(0, 1000), 1000)


def _toward(p, goal, d):
    if goal > p:
        return min(goal, p + d)
    return max(goal, p - d)


def _clip(pos, bounds):
    if bounds is None:
        return pos
    x0, x1, y0, y1 = bounds
    return (min(max(pos[0], x0), x1), min(max(pos[1], y0), y1))


# ---------------------------------------------------------------- simulation


def _cells(bounds):
    if bounds is None:
        return None
    x0, x1, y0, y1 = bounds
    return (math.floor(x1) - math.ceil(x0) + 1) * (math.floor(y1) - math.ceil(y0) + 1)


def simulate_game(tree, contract, y_init, cfg: GameConfig, F=None, rng=None, turns: int = None) -> RunTrace:
    """Play ``turns`` rounds (``cfg.turns`` by default) and record the trace."""
    turns = cfg.turns if turns is None else turns
    by_name = {v.name: v for v in contract.inputs + contract.outputs}
    try:
        rx, ry = (by_name[n] for n in cfg.robot_vars)
        ax, ay = (by_name[n] for n in cfg.adversary_vars)
    except KeyError as exc:
        raise GameConfigError(f"contract {contract.name} has no variable {exc}") from None
    extra = [x for x in contract.inputs if x not in (ax, ay)]
    if extra:
        raise GameConfigError(f"unexpected inputs {[x.name for x in extra]} in a game contract")
    integer = rx.sort is Sort.INT
    state = dict(y_init)
    if (state[rx], state[ry]) != tuple(cfg.robot_start):
        raise GameConfigError(
            f"robot_start {tuple(map(str, cfg.robot_start))} differs from the contract's initial position "
            f"({state[rx]}, {state[ry]})")
    rng = rng or make_rng(cfg.rng, cfg.seed)
    rnd = random.Random(f"adversary-{cfg.seed}")
    adv = (Patrol if cfg.policy == "patrol" else Chaser)(cfg, rnd, integer)
    pos = tuple(cfg.adversary_start)
    trace = RunTrace(total_cells=_cells(cfg.bounds) if integer else None)

    def record(turn, ok):
        trace.records.append({"turn": turn, "rx": state[rx], "ry": state[ry], "ax": pos[0], "ay": pos[1], "ok": ok})
        if integer:
            trace.visited.add((int(state[rx]), int(state[ry])))

    record(0, contract.G_I.holds(state))
    for turn in range(1, turns + 1):
        robot = (state[rx], state[ry])
        pos = _clip(adv.move(pos, robot), cfg.bounds)
        res = step(tree, contract, state, {ax: pos[0], ay: pos[1]}, rng, F, strict=False)
        state = res.state
        record(turn, res.ok)
        if not res.ok:
            trace.violation = True
            trace.diagnostic = f"turn {turn}: guarantees violated at robot ({state[rx]}, {state[ry]}), adversary {pos}"
            break
    return trace
