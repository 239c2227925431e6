"""Trace CSV and summary-report files.

Trace format: one row per sample with columns
    time, graph_index, lyapunov, sync_error, x_0_0, ..., x_{N-1}_{n}
Floats carry 17 significant digits so files round-trip bit-exactly. The
report is flat `key = value` text. Both formats are the contract consumed by
the plotting component; change them only together with their readers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analysis import CertificateReport
from .dynamics import Scenario, Trace
from .errors import InputError


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def trace_header(n_agents: int, sphere_dim: int) -> list[str]:
    cols = ["time", "graph_index", "lyapunov", "sync_error"]
    for i in range(n_agents):
        for k in range(sphere_dim + 1):
            cols.append(f"x_{i}_{k}")
    return cols


def write_trace(path, trace: Trace, stride: int = 1, keep_times=()) -> None:
    """Write the trace, keeping every `stride`-th sample plus the first and
    last rows and any row whose time appears in keep_times (switch instants)."""
    if stride < 1:
        raise InputError(f"sample stride must be >= 1, got {stride}")
    total = len(trace.times)
    keep = set(float(t) for t in keep_times)
    n_agents, ambient = trace.states.shape[1], trace.states.shape[2]
    lines = [",".join(trace_header(n_agents, ambient - 1))]
    for k in range(total):
        if not (k % stride == 0 or k == total - 1 or float(trace.times[k]) in keep):
            continue
        row = [
            _fmt(float(trace.times[k])),
            str(int(trace.graph_index[k])),
            _fmt(float(trace.lyapunov[k])),
            _fmt(float(trace.sync_error[k])),
        ]
        row.extend(_fmt(float(c)) for c in trace.states[k].reshape(-1))
        lines.append(",".join(row))
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


@dataclass(frozen=True)
class TraceData:
    times: np.ndarray
    graph_index: np.ndarray
    lyapunov: np.ndarray
    sync_error: np.ndarray
    states: np.ndarray  # (T, N, n+1)


def read_trace(path) -> TraceData:
    """Parse a trace CSV written by write_trace."""
    with open(path) as fh:
        lines = [line.rstrip("\n") for line in fh if line.strip()]
    if not lines:
        raise InputError(f"{path}: empty trace file")
    header = lines[0].split(",")
    if header[:4] != ["time", "graph_index", "lyapunov", "sync_error"]:
        raise InputError(f"{path}: unexpected trace header {header[:4]}")
    coord_cols = header[4:]
    n_agents = len({c.split("_")[1] for c in coord_cols})
    ambient = len(coord_cols) // max(n_agents, 1)
    if n_agents * ambient != len(coord_cols):
        raise InputError(f"{path}: ragged coordinate columns")
    rows = [line.split(",") for line in lines[1:]]
    data = np.array([[float(v) for v in r] for r in rows])
    return TraceData(
        times=data[:, 0],
        graph_index=data[:, 1].astype(np.int64),
        lyapunov=data[:, 2],
        sync_error=data[:, 3],
        states=data[:, 4:].reshape(len(rows), n_agents, ambient),
    )


def _kv(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "none"
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return _fmt(value)
    return str(value)


def report_lines(report: CertificateReport, sc: Scenario, trace: Trace,
                 seed: int | None = None) -> list[str]:
    lines = [
        f"scenario.mode = {sc.mode}",
        f"scenario.sphere_dim = {sc.sphere_dim}",
        f"scenario.n_agents = {sc.n_agents}",
        f"scenario.dt = {_kv(sc.dt)}",
        f"scenario.horizon = {_kv(sc.horizon)}",
    ]
    if seed is not None:
        lines.append(f"scenario.seed = {seed}")
    lines += [
        f"run.samples = {len(trace.times)}",
        f"run.switches = {sum(1 for e in trace.events if e.kind == 'switch')}",
        f"run.truncated = {_kv(trace.truncated)}",
    ]
    for k, ok in enumerate(report.graph_connected):
        lines.append(f"hypotheses.connectivity.graph_{k} = {_kv(ok)}")
    lines += [
        f"hypotheses.connectivity.active_all = {_kv(report.active_graphs_connected)}",
        f"hypotheses.dwell.ok = {_kv(report.dwell.ok)}",
        f"hypotheses.dwell.margin = {_kv(report.dwell.margin)}",
        f"hypotheses.dwell.worst_pair = {_kv(report.dwell.worst_pair)}",
        f"hypotheses.dwell.inferred = {_kv(report.dwell_inferred)}",
        f"hypotheses.hemisphere.certified = {_kv(report.hemisphere_certified)}",
        f"hypotheses.hemisphere.min_inner = {_kv(report.hemisphere_min_inner)}",
        f"hypotheses.certified = {_kv(report.hypotheses_certified)}",
        f"conclusion.epsilon = {_kv(report.epsilon)}",
        f"conclusion.final_sync_error = {_kv(report.final_sync_error)}",
        f"conclusion.time_to_epsilon = {_kv(report.time_to_epsilon)}",
        f"conclusion.monotonicity_violations = {report.monotonicity_violations}",
        f"verdict = {report.verdict}",
    ]
    return lines


def write_report(path, report: CertificateReport, sc: Scenario, trace: Trace,
                 seed: int | None = None) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(report_lines(report, sc, trace, seed)) + "\n")


def read_report(path) -> dict[str, str]:
    out: dict[str, str] = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            key, _, value = line.partition(" = ")
            out[key] = value
    return out
