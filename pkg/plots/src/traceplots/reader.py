"""Parsers for the simulator's trace CSV and report files.

The file formats are the whole contract with the simulator: a trace is
    time,graph_index,lyapunov,sync_error,x_0_0,...,x_{N-1}_{n}
with one row per sample, and a report is flat `key = value` text. Anything
that deviates is refused with the offending line number.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

FIXED_COLUMNS = ("time", "graph_index", "lyapunov", "sync_error")


class TraceFormatError(Exception):
    """Malformed trace/report input; carries the 1-based offending line."""

    def __init__(self, path, line: int, message: str):
        super().__init__(f"{path}:{line}: {message}")
        self.path = path
        self.line = line


@dataclass(frozen=True)
class TraceTable:
    times: np.ndarray        # (T,)
    graph_index: np.ndarray  # (T,) int
    lyapunov: np.ndarray     # (T,)
    sync_error: np.ndarray   # (T,)
    states: np.ndarray       # (T, N, ambient)

    @property
    def n_agents(self) -> int:
        return self.states.shape[1]

    @property
    def ambient_dim(self) -> int:
        return self.states.shape[2]

    def switch_times(self) -> np.ndarray:
        """Sample times where the active graph index changes."""
        if len(self.times) < 2:
            return np.empty(0)
        changed = self.graph_index[1:] != self.graph_index[:-1]
        return self.times[1:][changed]


def _expected_coordinate_columns(columns: list[str], path) -> tuple[int, int]:
    """Validate the x_i_k block: a complete (agent, coordinate) grid in order."""
    if not columns:
        raise TraceFormatError(path, 1, "no agent coordinate columns")
    parsed = []
    for c in columns:
        parts = c.split("_")
        if len(parts) != 3 or parts[0] != "x" or not parts[1].isdigit() \
                or not parts[2].isdigit():
            raise TraceFormatError(path, 1, f"unexpected column name {c!r}")
        parsed.append((int(parts[1]), int(parts[2])))
    n_agents = max(i for i, _ in parsed) + 1
    ambient = max(k for _, k in parsed) + 1
    want = [(i, k) for i in range(n_agents) for k in range(ambient)]
    if parsed != want:
        raise TraceFormatError(
            path, 1, f"coordinate columns are not the complete grid "
                     f"x_0_0..x_{n_agents - 1}_{ambient - 1} in order")
    return n_agents, ambient


def read_trace(path) -> TraceTable:
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise TraceFormatError(path, 1, "empty file")
    header = lines[0].split(",")
    if tuple(header[:4]) != FIXED_COLUMNS:
        raise TraceFormatError(
            path, 1, f"header must start with {','.join(FIXED_COLUMNS)}, "
                     f"got {','.join(header[:4])}")
    n_agents, ambient = _expected_coordinate_columns(header[4:], path)
    width = 4 + n_agents * ambient

    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split(",")
        if len(fields) != width:
            raise TraceFormatError(path, lineno,
                                   f"expected {width} fields, got {len(fields)}")
        try:
            rows.append([float(v) for v in fields])
        except ValueError as exc:
            raise TraceFormatError(path, lineno, str(exc)) from exc
    if not rows:
        raise TraceFormatError(path, 2, "trace has a header but no samples")
    data = np.array(rows)
    return TraceTable(
        times=data[:, 0],
        graph_index=data[:, 1].astype(np.int64),
        lyapunov=data[:, 2],
        sync_error=data[:, 3],
        states=data[:, 4:].reshape(len(rows), n_agents, ambient),
    )


def read_report(path) -> dict[str, str]:
    out: dict[str, str] = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            key, sep, value = line.partition(" = ")
            if not sep:
                raise TraceFormatError(path, lineno, f"not a 'key = value' line: {line!r}")
            out[key] = value
    return out
