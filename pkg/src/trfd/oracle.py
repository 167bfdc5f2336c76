"""Evaluation-counted access to the black-box residual map F.

Two backends share one interface: an in-process callable, and an
external child process speaking a newline-delimited JSON protocol over
stdin/stdout.  Every call to ``eval_F`` counts as exactly one
evaluation; the solver's budget is expressed in "simplex gradients",
each worth n + 1 evaluations.

Wire protocol (one JSON document per line):

    solver -> oracle   {"hello": {"n": <int>, "m": <int>}}
    oracle -> solver   {"ready": true}
    solver -> oracle   {"id": <int>, "x": [<n floats>]}
    oracle -> solver   {"id": <int>, "fvec": [<m floats>]}
                       or {"id": <int>, "error": "<message>"}

Floats are written with 17 significant digits so that the decimal text
round-trips bit-exactly.  Failures are fatal: the exact-oracle model has
no retry semantics.
"""
from __future__ import annotations

import json
import os
import select
import shlex
import subprocess
from dataclasses import dataclass

import numpy as np

TIMEOUT_ENV = "TRFD_ORACLE_TIMEOUT_SECS"
DEFAULT_TIMEOUT = 60.0


class OracleFailure(Exception):
    """The backend returned an unusable answer (wrong shape, non-finite,
    malformed output, or a dead process)."""


class SpawnFailure(Exception):
    """The external oracle command could not be started."""


class HandshakeTimeout(Exception):
    """The external oracle did not complete the hello/ready exchange."""


def format_float(v: float) -> str:
    """17-significant-digit decimal; parses back to the same float64."""
    return f"{float(v):.16e}"


@dataclass
class EvalBudget:
    """Evaluation allowance in simplex gradients (n + 1 evaluations each)."""

    simplex_gradients: int = 100
    n: int = 0

    def __post_init__(self):
        if self.simplex_gradients < 1:
            raise ValueError("budget must be at least one simplex gradient")

    @property
    def max_evals(self) -> int:
        return self.simplex_gradients * (self.n + 1)


class BlackBoxOracle:
    """Base: validates outputs and counts evaluations."""

    def __init__(self, m: int):
        self.m = int(m)
        self.eval_count = 0

    def eval_F(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if not np.all(np.isfinite(x)):
            raise OracleFailure("query point has non-finite components")
        fvec = self._evaluate(x)
        self.eval_count += 1
        fvec = np.asarray(fvec, dtype=float).reshape(-1)
        if fvec.size != self.m:
            raise OracleFailure(f"oracle returned {fvec.size} values, expected {self.m}")
        if not np.all(np.isfinite(fvec)):
            raise OracleFailure("oracle returned non-finite values")
        return fvec

    def _evaluate(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def close(self) -> None:
        pass


class InProcessOracle(BlackBoxOracle):
    def __init__(self, fn, m: int):
        super().__init__(m)
        self._fn = fn

    def _evaluate(self, x: np.ndarray) -> np.ndarray:
        return self._fn(x)


class ExternalOracle(BlackBoxOracle):
    """Child process speaking the line protocol above.

    The instance is single-owner: one solver run drives one process.
    """

    def __init__(self, command: str, n: int, m: int, timeout: float | None = None):
        super().__init__(m)
        self.n = int(n)
        if timeout is None:
            timeout = float(os.environ.get(TIMEOUT_ENV, DEFAULT_TIMEOUT))
        self.timeout = timeout
        self._next_id = 0
        argv = shlex.split(command)
        try:
            self._proc = subprocess.Popen(
                argv,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.DEVNULL,
            )
        except OSError as exc:
            raise SpawnFailure(f"could not start {argv[0]!r}: {exc}") from exc
        self._buffer = b""
        self._handshake()

    def _handshake(self) -> None:
        self._send('{"hello": {"n": %d, "m": %d}}' % (self.n, self.m))
        try:
            reply = self._read_line()
        except OracleFailure as exc:
            self.close()
            raise HandshakeTimeout(str(exc)) from exc
        try:
            doc = json.loads(reply)
        except json.JSONDecodeError as exc:
            self.close()
            raise HandshakeTimeout(f"bad handshake reply: {reply!r}") from exc
        if doc.get("ready") is not True:
            self.close()
            raise HandshakeTimeout(f"oracle not ready: {reply!r}")

    def _send(self, line: str) -> None:
        if self._proc.poll() is not None:
            raise OracleFailure("oracle process is dead")
        try:
            self._proc.stdin.write(line.encode("ascii") + b"\n")
            self._proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise OracleFailure("oracle process closed its input") from exc

    def _read_line(self) -> str:
        fd = self._proc.stdout.fileno()
        while b"\n" not in self._buffer:
            ready, _, _ = select.select([fd], [], [], self.timeout)
            if not ready:
                raise OracleFailure(f"oracle timed out after {self.timeout:g}s")
            chunk = os.read(fd, 65536)
            if not chunk:
                raise OracleFailure("oracle process closed its output")
            self._buffer += chunk
        line, self._buffer = self._buffer.split(b"\n", 1)
        return line.decode("utf-8", errors="replace")

    def _evaluate(self, x: np.ndarray) -> np.ndarray:
        qid = self._next_id
        self._next_id += 1
        payload = ", ".join(format_float(v) for v in x)
        self._send('{"id": %d, "x": [%s]}' % (qid, payload))
        reply = self._read_line()
        try:
            doc = json.loads(reply)
        except json.JSONDecodeError as exc:
            raise OracleFailure(f"malformed oracle reply: {reply!r}") from exc
        if doc.get("id") != qid:
            raise OracleFailure(f"oracle answered id {doc.get('id')} to query {qid}")
        if "error" in doc:
            raise OracleFailure(f"oracle error: {doc['error']}")
        if "fvec" not in doc:
            raise OracleFailure(f"oracle reply carries no fvec: {reply!r}")
        return np.asarray(doc["fvec"], dtype=float)

    def close(self) -> None:
        proc = getattr(self, "_proc", None)
        if proc is None:
            return
        for stream in (proc.stdin, proc.stdout):
            try:
                if stream:
                    stream.close()
            except OSError:
                pass
        if proc.poll() is None:
            proc.terminate()
            try:
                proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                proc.kill()
                proc.wait()

    def __del__(self):
        self.close()


def spawn_external(command: str, n: int, m: int, timeout: float | None = None) -> ExternalOracle:
    """Start an external oracle and complete the handshake.

    The hello message carries both dimensions, so n is required at spawn
    time alongside the output dimension m.
    """
    return ExternalOracle(command, n=n, m=m, timeout=timeout)
