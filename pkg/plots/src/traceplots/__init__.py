"""Figures from the sphere-synchronization simulator's trace and report files.

Reads only the documented CSV/report formats; shares no code with the
simulator. Kinds: sync_error and lyapunov (log scale, switch markers),
signal_timeline, sphere3d.
"""

from .reader import TraceFormatError, TraceTable, read_report, read_trace
from .render import KINDS, PlotJob, RenderError, render

__version__ = "0.1.0"
