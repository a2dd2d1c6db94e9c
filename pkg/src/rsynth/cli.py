"""Command-line entry point: ``rsynth check|synth|codegen|simulate|fuzz-emit``."""
from __future__ import annotations

import argparse
import logging
import os
import sys
import traceback

from . import __version__
from .codegen import EmitConfig, emit_c, emit_randval_default, emit_smtlib
from .aeval import IterationCapExceeded
from .fixpoint import FixpointError, synthesize
from .lustre import ElaborationError, LustreSyntaxError, load_contract
from .runtime.games import GameConfigError
from .serialize import DumpError, Witness, dumps, load_witness_file
from .solver import Solver, SolverConfig

EXIT_REALIZABLE, EXIT_UNREALIZABLE, EXIT_INDETERMINATE = 0, 1, 2
EXIT_USAGE, EXIT_INTERNAL = 64, 70
_VERDICT_EXIT = {"realizable": 0, "unrealizable": 1, "indeterminate": 2}

log = logging.getLogger("rsynth")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--solver", help="external SMT-LIB solver command (default: internal)")
    common.add_argument("--timeout-ms", type=int, default=20000, help="per-query solver budget")
    common.add_argument("--iter-cap", type=int, default=128, help="maximum fixpoint rounds")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="rsynth", description="Realizability checking and random witness synthesis.")
    p.add_argument("--version", action="version", version=f"rsynth {__version__}")
    sub = p.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    c = sub.add_parser("check", parents=[common], help="decide realizability")
    c.add_argument("file")
    c.add_argument("--show-fixpoint", action="store_true", help="also print the viable set")

    s = sub.add_parser("synth", parents=[common], help="synthesize a witness and write a JSON dump")
    s.add_argument("file")
    s.add_argument("--mode", choices=("random", "det"), default="random")
    s.add_argument("--out", help="dump path (default: standard output)")

    g = sub.add_parser("codegen", parents=[common], help="emit C or SMT-LIB from a dump or contract")
    g.add_argument("source", help="witness dump (.json) or contract (.lus)")
    g.add_argument("--target", choices=("c", "smtlib"), default="c")
    g.add_argument("--mode", choices=("random", "det"), default="random", help="when synthesizing from .lus")
    g.add_argument("--emit-randval", action="store_true", help="also write a default randval.c/randval.h")
    g.add_argument("--out-dir", default=".")

    m = sub.add_parser("simulate", parents=[common], help="play an avoidance game")
    m.add_argument("file")
    m.add_argument("--game", required=True, help="JSON game configuration")
    m.add_argument("--mode", choices=("random", "det"), default="random")
    m.add_argument("--seed", type=int)
    m.add_argument("--turns", type=int)
    m.add_argument("--rng", choices=("uniform", "center", "corner"))
    m.add_argument("--csv", help="write the trace as CSV")

    f = sub.add_parser("fuzz-emit", parents=[common], help="emit fuzzer test inputs")
    f.add_argument("file")
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--feedback", choices=("stdin", "false", "true"), default="false",
                   help="source of the coverage bit (default: constant false)")
    f.add_argument("--steps", type=int, help="stop after this many records")
    return p


def _solver(args) -> Solver:
    return Solver(SolverConfig.from_env(args.solver, args.timeout_ms))


def _synth(args, path, mode):
    c = load_contract(path)
    solver = _solver(args)
    try:
        return c, synthesize(c, mode, solver=solver, iter_cap=args.iter_cap)
    finally:
        solver.close()


def _need_realizable(res, path):
    if res.verdict != "realizable":
        print(res.verdict)
        log.error("%s: %s", path, getattr(res, "reason", ""))
        return _VERDICT_EXIT[res.verdict]
    return None


def cmd_check(args) -> int:
    c, res = _synth(args, args.file, "det")
    print(res.verdict)
    if res.verdict == "realizable" and args.show_fixpoint:
        print(f"F = {res.F}")
    elif res.verdict != "realizable" and getattr(res, "reason", ""):
        log.info("reason: %s", res.reason)
    return _VERDICT_EXIT[res.verdict]


def cmd_synth(args) -> int:
    c, res = _synth(args, args.file, args.mode)
    code = _need_realizable(res, args.file)
    if code is not None:
        return code
    text = dumps(c, res, args.mode)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"realizable: wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _witness(args):
    if args.source.endswith(".lus"):
        c, res = _synth(args, args.source, args.mode)
        code = _need_realizable(res, args.source)
        if code is not None:
            return None, code
        return Witness.from_result(c, res, args.mode), 0
    return load_witness_file(args.source), 0


def cmd_codegen(args) -> int:
    w, code = _witness(args)
    if w is None:
        return code
    os.makedirs(args.out_dir, exist_ok=True)
    name = w.contract.name
    if args.target == "c":
        out = os.path.join(args.out_dir, f"{name}_witness.c")
        text = emit_c(w.tree, w.contract, w.y_init, EmitConfig(emit_randval=args.emit_randval))
    else:
        out = os.path.join(args.out_dir, f"{name}_witness.smt2")
        text = emit_smtlib(w.tree, w.contract, w.F)
    written = [out]
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(text)
    if args.emit_randval:
        h, csrc = emit_randval_default()
        for fname, body in (("randval.h", h), ("randval.c", csrc)):
            path = os.path.join(args.out_dir, fname)
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(body)
            written.append(path)
    for path in written:
        print(path)
    return 0


def cmd_simulate(args) -> int:
    from .runtime.games import GameConfig, simulate_game

    cfg = GameConfig.load(args.game)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.turns is not None:
        cfg.turns = args.turns
    if args.rng:
        cfg.rng = args.rng
    c, res = _synth(args, args.file, args.mode)
    code = _need_realizable(res, args.file)
    if code is not None:
        return code
    trace = simulate_game(res.tree, c, res.y_init, cfg, res.F)
    if args.csv:
        trace.write_csv(args.csv)
    turns = len(trace.records) - 1
    print(f"turns {turns} violations {int(trace.violation)}", end="")
    if trace.coverage is not None:
        print(f" coverage {trace.coverage:.4f} ({len(trace.visited)}/{trace.total_cells} cells)", end="")
    print()
    if trace.violation:
        log.error("guarantee violation: %s", trace.diagnostic)
        return EXIT_INTERNAL
    return 0


def cmd_fuzz(args) -> int:
    from .runtime.fuzz import constant_feedback, fuzz_emit, stream_feedback
    from .runtime.rng import make_rng

    c, res = _synth(args, args.file, "random")
    code = _need_realizable(res, args.file)
    if code is not None:
        return code
    fb = stream_feedback(sys.stdin) if args.feedback == "stdin" else constant_feedback(args.feedback == "true")
    fuzz_emit(res.tree, c, res.y_init, fb, sys.stdout, args.steps, make_rng("uniform", args.seed), res.F)
    if _pipe_closed():
        # the reader went away: keep the interpreter from complaining at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
    return 0


def _pipe_closed() -> bool:
    try:
        sys.stdout.write("")
        sys.stdout.flush()
        return False
    except (BrokenPipeError, ValueError):
        return True


COMMANDS = {"check": cmd_check, "synth": cmd_synth, "codegen": cmd_codegen,
            "simulate": cmd_simulate, "fuzz-emit": cmd_fuzz}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="rsynth: %(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return COMMANDS[args.command](args)
    except (LustreSyntaxError, ElaborationError, DumpError, GameConfigError) as exc:
        sys.stderr.write(f"rsynth: {exc}\n")
        return EXIT_USAGE
    except (FixpointError, IterationCapExceeded) as exc:
        # resource limits are internal failures, but expected ones: no traceback
        sys.stderr.write(f"rsynth: resource limit: {exc}\n")
        return EXIT_INTERNAL
    except (OSError, ValueError) as exc:
        if isinstance(exc, (FileNotFoundError, IsADirectoryError, PermissionError)):
            sys.stderr.write(f"rsynth: {exc}\n")
            return EXIT_USAGE
        sys.stderr.write(f"rsynth: internal error: {exc}\n")
        traceback.print_exc(file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001 - report anything else as an internal failure
        sys.stderr.write(f"rsynth: internal error: {exc}\n")
        traceback.print_exc(file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
