"""SMT-LIB 2 child-process backend (any conformant solver, e.g. ``z3 -in``)."""
from __future__ import annotations

import os
import select
import shlex
import subprocess
import time
from fractions import Fraction

from ..logic.expr import Sort
from ..logic.smtlib import declare, sexprs, to_smt, var_symbol
from .fm import SolverTimeout


class ExternalSolverError(RuntimeError):
    pass


def _logic_for(vs) -> str:
    sorts = {v.sort for v in vs}
    if Sort.INT in sorts and Sort.REAL in sorts:
        return "ALL"
    return "QF_LRA" if Sort.REAL in sorts else "QF_LIA"


def _value(e) -> Fraction:
    if isinstance(e, str):
        if e == "true":
            return Fraction(1)
        if e == "false":
            return Fraction(0)
        return Fraction(e)
    head = e[0]
    if head == "-":
        if len(e) == 2:
            return -_value(e[1])
        return _value(e[1]) - _value(e[2])
    if head == "/":
        return _value(e[1]) / _value(e[2])
    raise ExternalSolverError(f"cannot read model value {e!r}")


class ExternalSolver:
    """Single incremental session with a child solver process."""

    def __init__(self, command: str, timeout_ms: int = 20000):
        self.argv = shlex.split(command)
        self.timeout_ms = timeout_ms
        self.proc = None
        self.logic = None
        self._buf = b""

    def _start(self, logic):
        self.close()
        try:
            self.proc = subprocess.Popen(
                self.argv,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.DEVNULL,
            )
        except OSError as exc:
            raise ExternalSolverError(f"cannot start {self.argv!r}: {exc}") from exc
        self.logic = logic
        self._buf = b""
        self._send("(set-option :print-success false)")
        self._send("(set-option :produce-models true)")
        self._send(f"(set-logic {logic})")

    def close(self):
        if self.proc is not None:
            try:
                self.proc.stdin.close()
            except OSError:
                pass
            self.proc.kill()
            self.proc.wait()
            self.proc = None

    def _send(self, line: str):
        try:
            self.proc.stdin.write((line + "\n").encode())
            self.proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise ExternalSolverError(f"solver pipe closed: {exc}") from exc

    def _read_sexpr(self, deadline) -> str:
        """Read one complete response (an atom line or a balanced s-expression)."""
        fd = self.proc.stdout.fileno()
        while True:
            text = self._buf.decode(errors="replace")
            stripped = text.lstrip()
            if stripped:
                if stripped[0] != "(":
                    nl = stripped.find("\n")
                    if nl >= 0:
                        resp = stripped[:nl].strip()
                        self._buf = stripped[nl + 1:].encode()
                        return resp
                else:
                    depth = 0
                    for i, ch in enumerate(stripped):
                        if ch == "(":
                            depth += 1
                        elif ch == ")":
                            depth -= 1
                            if depth == 0:
                                self._buf = stripped[i + 1:].encode()
                                return stripped[: i + 1]
            left = deadline - time.monotonic()
            if left <= 0:
                self.close()
                raise SolverTimeout("external solver timed out")
            ready, _, _ = select.select([fd], [], [], left)
            if not ready:
                continue
            chunk = os.read(fd, 65536)
            if not chunk:
                raise ExternalSolverError("solver process exited")
            self._buf += chunk

    def check_sat(self, f, vs):
        from .core import UNSAT, Sat

        logic = _logic_for(vs)
        if self.proc is None or self.proc.poll() is not None or self.logic != logic:
            self._start(logic)
        deadline = time.monotonic() + self.timeout_ms / 1000.0
        self._send("(push 1)")
        for v in sorted(vs, key=lambda v: (v.name, v.primed)):
            self._send(declare(v))
        self._send(f"(assert {to_smt(f)})")
        self._send("(check-sat)")
        resp = self._read_sexpr(deadline)
        if resp == "unsat":
            self._send("(pop 1)")
            return UNSAT
        if resp != "sat":
            self._send("(pop 1)")
            if resp.startswith("(error"):
                raise ExternalSolverError(resp)
            return None  # unknown: let the caller fall back
        model = {}
        ordered = list(vs)
        if ordered:
            self._send("(get-value (" + " ".join(var_symbol(v) for v in ordered) + "))")
            resp = self._read_sexpr(deadline)
            parsed = sexprs(resp)[0]
            if parsed and parsed[0] == "error":
                raise ExternalSolverError(resp)
            table = {var_symbol(v).strip("|"): v for v in ordered}
            for name, val in parsed:
                model[table[name]] = _value(val)
        self._send("(pop 1)")
        return Sat(model)
