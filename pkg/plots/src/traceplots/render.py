"""Figure builders for the four plot kinds.

Output is deterministic: the SVG hash salt is pinned and no creation date is
embedded, so re-rendering identical inputs yields identical bytes.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "traceplots"

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

from .reader import TraceTable, read_report, read_trace  # noqa: E402

KINDS = ("sync_error", "lyapunov", "signal_timeline", "sphere3d")

LOG_FLOOR = 1e-18  # exact zeros still draw as a flat line on the log axis


class RenderError(Exception):
    pass


@dataclass(frozen=True)
class PlotJob:
    trace_path: str
    report_path: str
    kind: str
    out_path: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise RenderError(f"unknown figure kind {self.kind!r}; expected one of {KINDS}")


def _annotate_truncation(ax, trace: TraceTable, report: dict[str, str]) -> None:
    if report.get("run.truncated") == "true":
        t_end = float(trace.times[-1])
        ax.axvline(t_end, color="crimson", linestyle=":", linewidth=1.2)
        ax.annotate(f"truncated at t = {t_end:g}", xy=(0.98, 0.02),
                    xycoords="axes fraction", ha="right", va="bottom",
                    fontsize=8, color="crimson")


def _mark_switches(ax, trace: TraceTable) -> None:
    for t in trace.switch_times():
        ax.axvline(float(t), color="0.75", linewidth=0.6, zorder=0)


def _log_series(ax, trace: TraceTable, values: np.ndarray, label: str) -> None:
    ax.semilogy(trace.times, np.maximum(values, LOG_FLOOR), color="tab:blue", linewidth=1.4)
    _mark_switches(ax, trace)
    ax.set_xlabel("time [s]")
    ax.set_ylabel(label)
    ax.grid(True, which="both", alpha=0.25)


def _figure_sync_error(trace: TraceTable, report: dict[str, str]):
    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    _log_series(ax, trace, trace.sync_error, "max pairwise geodesic distance [rad]")
    ax.set_title("synchronization error" + _verdict_suffix(report))
    _annotate_truncation(ax, trace, report)
    return fig


def _figure_lyapunov(trace: TraceTable, report: dict[str, str]):
    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    _log_series(ax, trace, trace.lyapunov, "Lyapunov value")
    ax.set_title("Lyapunov value (switch instants marked)")
    _annotate_truncation(ax, trace, report)
    return fig


def _figure_signal_timeline(trace: TraceTable, report: dict[str, str]):
    fig, ax = plt.subplots(figsize=(7.0, 2.6))
    ax.step(trace.times, trace.graph_index, where="post", color="tab:orange",
            linewidth=1.4)
    ax.set_xlabel("time [s]")
    ax.set_ylabel("active graph index")
    ax.set_yticks(sorted(set(int(i) for i in trace.graph_index)))
    ax.grid(True, alpha=0.25)
    ax.set_title("switching signal")
    _annotate_truncation(ax, trace, report)
    return fig


def _figure_sphere3d(trace: TraceTable, report: dict[str, str]):
    if trace.ambient_dim != 3:
        raise RenderError(
            f"sphere3d needs 3 coordinates per agent (S^2), trace has "
            f"{trace.ambient_dim}")
    fig = plt.figure(figsize=(6.0, 6.0))
    ax = fig.add_subplot(111, projection="3d")
    u = np.linspace(0.0, 2.0 * np.pi, 24)
    v = np.linspace(0.0, np.pi, 16)
    ax.plot_wireframe(np.outer(np.cos(u), np.sin(v)), np.outer(np.sin(u), np.sin(v)),
                      np.outer(np.ones_like(u), np.cos(v)),
                      color="0.85", linewidth=0.3)
    for i in range(trace.n_agents):
        path = trace.states[:, i, :]
        ax.plot(path[:, 0], path[:, 1], path[:, 2], linewidth=1.2)
        ax.scatter(*path[0], marker="o", s=25)
        ax.scatter(*path[-1], marker="x", s=35)
    ax.set_box_aspect((1, 1, 1))
    ax.set_title("agent trajectories on S^2" +
                 (" (truncated)" if report.get("run.truncated") == "true" else ""))
    return fig


def _verdict_suffix(report: dict[str, str]) -> str:
    verdict = report.get("verdict")
    return f" [{verdict}]" if verdict else ""


_BUILDERS = {
    "sync_error": _figure_sync_error,
    "lyapunov": _figure_lyapunov,
    "signal_timeline": _figure_signal_timeline,
    "sphere3d": _figure_sphere3d,
}


def render(job: PlotJob) -> str:
    """Render one figure; returns the output path. Inputs are never mutated."""
    trace = read_trace(job.trace_path)
    report = read_report(job.report_path)
    fig = _BUILDERS[job.kind](trace, report)
    out = Path(job.out_path)
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    metadata = {"Date": None} if out.suffix.lower() == ".svg" else None
    try:
        fig.savefig(out, metadata=metadata)
    finally:
        plt.close(fig)
    return str(out)
