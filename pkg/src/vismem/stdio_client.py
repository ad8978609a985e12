"""Client side of the stdio encoder protocol.

The peer is any process that reads newline-delimited JSON requests
``{"id": str, "path": str}`` on stdin and answers with one line per id,
``{"id": str, "dim": int, "values": [float, ...]}`` (or
``{"id": str, "error": str}``), in any order. The peer exits on EOF.

``StdioEncoderClient`` pipelines a batch of requests, then reads lines
until every id has been answered. ``run_conformance_check`` is the
harness used to qualify an external encoder implementation: it sends a
pipelined batch against generated images and verifies that responses
match requests one to one.
"""

from __future__ import annotations

import json
import subprocess
from dataclasses import dataclass, field

import numpy as np

from .embedding import as_embedding
from .errors import (
    DimensionMismatchError,
    ExternalUnavailableError,
    ProtocolViolationError,
)


class StdioEncoderClient:
    """Owns one peer subprocess; writes are serialized, responses are
    matched back to requests by id."""

    def __init__(self, command: list[str]):
        self.command = list(command)
        try:
            self.proc = subprocess.Popen(
                self.command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                bufsize=1,
            )
        except OSError as exc:
            raise ExternalUnavailableError(f"cannot start {command!r}: {exc}") from exc

    def encode_batch(self, requests, expected_dim: int | None = None) -> dict[str, np.ndarray]:
        """Send ``(id, path)`` pairs, return ``{id: vector}`` for all of them."""
        ids = [rid for rid, _ in requests]
        if len(set(ids)) != len(ids):
            raise ValueError("request ids must be unique within a batch")
        if self.proc.poll() is not None:
            raise ExternalUnavailableError("stdio encoder peer has exited")
        try:
            for rid, path in requests:
                self.proc.stdin.write(json.dumps({"id": rid, "path": str(path)}) + "\n")
            self.proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise ExternalUnavailableError("stdio encoder peer closed stdin") from exc

        pending = set(ids)
        out: dict[str, np.ndarray] = {}
        while pending:
            line = self.proc.stdout.readline()
            if line == "":
                raise ExternalUnavailableError(
                    f"peer closed stream with {len(pending)} responses outstanding"
                )
            if not line.strip():
                continue
            try:
                msg = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ProtocolViolationError(f"malformed response line: {line!r}") from exc
            if not isinstance(msg, dict) or "id" not in msg:
                raise ProtocolViolationError(f"response without id: {line!r}")
            rid = msg["id"]
            if rid not in pending:
                raise ProtocolViolationError(f"response for unknown id {rid!r}")
            if "error" in msg:
                raise ExternalUnavailableError(f"peer error for {rid!r}: {msg['error']}")
            if "dim" not in msg or "values" not in msg:
                raise ProtocolViolationError(f"incomplete response for {rid!r}")
            values = msg["values"]
            if not isinstance(values, list) or len(values) != msg["dim"]:
                raise ProtocolViolationError(
                    f"response for {rid!r}: dim field {msg['dim']} != {len(values)} values"
                )
            if expected_dim is not None and msg["dim"] != expected_dim:
                raise DimensionMismatchError(
                    f"response for {rid!r}: dim {msg['dim']}, expected {expected_dim}"
                )
            out[rid] = as_embedding(values)
            pending.discard(rid)
        return {rid: out[rid] for rid in ids}

    def close(self) -> None:
        if self.proc.poll() is None:
            try:
                self.proc.stdin.close()
            except OSError:
                pass
            try:
                self.proc.wait(timeout=10)
            except subprocess.TimeoutExpired:
                self.proc.kill()
                self.proc.wait()

    def __enter__(self) -> "StdioEncoderClient":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()


@dataclass
class ConformanceReport:
    requests: int
    answered: int
    dim: int | None
    bijective: bool
    problems: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.bijective and not self.problems and self.answered == self.requests


def run_conformance_check(command: list[str], image_paths, expected_dim: int | None = None) -> ConformanceReport:
    """Pipeline one request per image path and audit the responses."""
    requests = [(f"req-{i:04d}", str(p)) for i, p in enumerate(image_paths)]
    problems: list[str] = []
    dim_seen: int | None = None
    answered = 0
    with StdioEncoderClient(command) as client:
        try:
            result = client.encode_batch(requests, expected_dim=expected_dim)
            answered = len(result)
            dims = {vec.size for vec in result.values()}
            if len(dims) > 1:
                problems.append(f"inconsistent dims: {sorted(dims)}")
            dim_seen = dims.pop() if len(dims) == 1 else None
            for rid, vec in result.items():
                if not np.all(np.isfinite(vec)):
                    problems.append(f"non-finite values for {rid}")
        except (ProtocolViolationError, ExternalUnavailableError, DimensionMismatchError) as exc:
            problems.append(f"{type(exc).__name__}: {exc}")
    bijective = answered == len(requests) and not problems
    return ConformanceReport(
        requests=len(requests),
        answered=answered,
        dim=dim_seen,
        bijective=bijective,
        problems=problems,
    )
