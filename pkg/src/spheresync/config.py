"""Scenario configuration files.

TOML with sections [scenario], [shaping], [[graphs]], [signal], [init],
[output]. Unknown keys are hard errors: a silently ignored typo in a
scientific config destroys reproducibility. Sampled quantities (cap inits,
generated signals) are deterministic in [scenario].seed, so a config plus its
seed pins the whole run.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .analysis import consensus_embed
from .dynamics import AgentStates, Scenario
from .errors import ConfigError
from .manifold import UnitVector, random_unit_vector, sample_in_cap
from .network import DwellTimeSpec, Graph, SwitchingSignal, generate_switching_signal
from .shaping import DistanceFunction

_SECTION_KEYS = {
    "scenario": {"mode", "sphere_dim", "n_agents", "dt", "horizon", "seed"},
    "shaping": {"kind", "power", "domain_limit"},
    "signal": {"switch_times", "graph_indices", "generate", "mode", "tau_d", "n0", "tau_a"},
    "init": {"coordinates", "cap_center", "cap_radius", "euclidean", "embed_radius"},
    "output": {"trace_path", "report_path", "sample_stride"},
}
_GRAPH_KEYS = {"edges"}
_TOP_KEYS = {"scenario", "shaping", "graphs", "signal", "init", "output"}


@dataclass(frozen=True)
class OutputSpec:
    trace_path: str = "trace.csv"
    report_path: str = "report.txt"
    sample_stride: int = 1


def load_config(path) -> dict:
    """Read and schema-check a config file; returns the raw TOML dict."""
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    check_schema(raw)
    return raw


def check_schema(raw: dict) -> None:
    for key in raw:
        if key not in _TOP_KEYS:
            raise ConfigError(f"unknown section [{key}]")
    for section, allowed in _SECTION_KEYS.items():
        table = raw.get(section)
        if table is None:
            continue
        if not isinstance(table, dict):
            raise ConfigError(f"[{section}] must be a table")
        for key in table:
            if key not in allowed:
                raise ConfigError(f"unknown key '{key}' in section [{section}]")
    graphs = raw.get("graphs")
    if graphs is not None:
        if not isinstance(graphs, list):
            raise ConfigError("[[graphs]] must be an array of tables")
        for k, table in enumerate(graphs):
            if not isinstance(table, dict):
                raise ConfigError(f"[[graphs]] entry {k} must be a table")
            for key in table:
                if key not in _GRAPH_KEYS:
                    raise ConfigError(f"unknown key '{key}' in [[graphs]] entry {k}")


def _require(table: dict, section: str, key: str):
    if key not in table:
        raise ConfigError(f"[{section}] is missing required key '{key}'")
    return table[key]


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where} must be a number, got {value!r}")
    return float(value)


def _integer(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where} must be an integer, got {value!r}")
    return value


def apply_override(raw: dict, assignment: str) -> None:
    """Apply a KEY=VALUE override with a section.key path and a TOML literal value."""
    key, sep, literal = assignment.partition("=")
    if not sep:
        raise ConfigError(f"override {assignment!r} is not KEY=VALUE")
    path = key.strip().split(".")
    if len(path) != 2:
        raise ConfigError(f"override key {key!r} must be section.key")
    section, field = path
    if section not in _SECTION_KEYS or field not in _SECTION_KEYS[section]:
        raise ConfigError(f"override targets unknown key '{section}.{field}'")
    try:
        value = tomllib.loads(f"v = {literal.strip()}")["v"]
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"override value {literal!r} is not a TOML literal: {exc}") from exc
    raw.setdefault(section, {})[field] = value


def build_scenario(raw: dict) -> tuple[Scenario, OutputSpec, int]:
    """Turn a schema-checked config dict into a concrete Scenario.

    Returns (scenario, output spec, seed). All sampling is deterministic in
    the seed; explicit coordinates are taken as given (renormalized only when
    they deviate from unit norm by more than construction tolerance).
    """
    check_schema(raw)
    for section in ("scenario", "shaping", "signal", "init"):
        if section not in raw:
            raise ConfigError(f"missing required section [{section}]")
    if "graphs" not in raw or not raw["graphs"]:
        raise ConfigError("missing required section [[graphs]]")

    sc_tab = raw["scenario"]
    mode = _require(sc_tab, "scenario", "mode")
    sphere_dim = _integer(_require(sc_tab, "scenario", "sphere_dim"), "[scenario].sphere_dim")
    n_agents = _integer(_require(sc_tab, "scenario", "n_agents"), "[scenario].n_agents")
    dt = _number(_require(sc_tab, "scenario", "dt"), "[scenario].dt")
    horizon = _number(_require(sc_tab, "scenario", "horizon"), "[scenario].horizon")
    seed = _integer(sc_tab.get("seed", 0), "[scenario].seed")
    if dt <= 0.0:
        raise ConfigError(f"[scenario].dt must be > 0, got {dt}")
    if horizon <= 0.0:
        raise ConfigError(f"[scenario].horizon must be > 0, got {horizon}")

    shp_tab = raw["shaping"]
    kind = _require(shp_tab, "shaping", "kind")
    shaping_kwargs = {}
    if "domain_limit" in shp_tab:
        shaping_kwargs["domain_limit"] = _number(shp_tab["domain_limit"],
                                                 "[shaping].domain_limit")
    if kind == "power_chordal":
        shaping_kwargs["power"] = _number(_require(shp_tab, "shaping", "power"),
                                          "[shaping].power")
    elif "power" in shp_tab:
        raise ConfigError(f"[shaping].power is only meaningful for power_chordal, not {kind!r}")
    try:
        shaping = DistanceFunction(kind, **shaping_kwargs)
    except Exception as exc:
        raise ConfigError(f"[shaping]: {exc}") from exc

    graphs = []
    for k, table in enumerate(raw["graphs"]):
        edges = _require(table, f"graphs[{k}]", "edges")
        try:
            graphs.append(Graph(n_agents, tuple((int(e[0]), int(e[1]), float(e[2]))
                                                for e in edges)))
        except Exception as exc:
            raise ConfigError(f"[[graphs]] entry {k}: {exc}") from exc

    # Deterministic per-purpose seeds so adding one sampler never shifts another.
    seed_seq = np.random.SeedSequence(seed)
    init_state, signal_state = (int(s) for s in seed_seq.generate_state(2))

    signal, dwell = _build_signal(raw["signal"], len(graphs), horizon, signal_state)
    init, embed_radius = _build_init(raw["init"], mode, sphere_dim, n_agents, init_state)

    try:
        scenario = Scenario(
            sphere_dim=sphere_dim, n_agents=n_agents, graphs=tuple(graphs),
            signal=signal, shaping=shaping, init=init, dt=dt, horizon=horizon,
            mode=mode, dwell=dwell, embed_radius=embed_radius)
    except Exception as exc:
        raise ConfigError(str(exc)) from exc

    out_tab = raw.get("output", {})
    stride = _integer(out_tab.get("sample_stride", 1), "[output].sample_stride")
    if stride < 1:
        raise ConfigError(f"[output].sample_stride must be >= 1, got {stride}")
    output = OutputSpec(
        trace_path=str(out_tab.get("trace_path", "trace.csv")),
        report_path=str(out_tab.get("report_path", "report.txt")),
        sample_stride=stride)
    return scenario, output, seed


def _build_signal(table: dict, n_graphs: int, horizon: float,
                  seed: int) -> tuple[SwitchingSignal, DwellTimeSpec | None]:
    explicit = "switch_times" in table or "graph_indices" in table
    generate = bool(table.get("generate", False))
    if explicit and generate:
        raise ConfigError("[signal] cannot both list switch_times and set generate = true")
    if not explicit and not generate:
        raise ConfigError("[signal] needs either explicit switch_times/graph_indices "
                          "or generate = true")

    dwell = None
    if "mode" in table:
        mode = table["mode"]
        try:
            if mode == "fixed_dwell":
                dwell = DwellTimeSpec.fixed(_number(_require(table, "signal", "tau_d"),
                                                    "[signal].tau_d"))
            elif mode == "average_dwell":
                dwell = DwellTimeSpec.average(
                    _number(_require(table, "signal", "n0"), "[signal].n0"),
                    _number(_require(table, "signal", "tau_a"), "[signal].tau_a"))
            else:
                raise ConfigError(f"[signal].mode must be fixed_dwell or average_dwell, "
                                  f"got {mode!r}")
        except ConfigError:
            raise
        except Exception as exc:
            raise ConfigError(f"[signal]: {exc}") from exc
    for key in ("tau_d", "n0", "tau_a"):
        if key in table and "mode" not in table:
            raise ConfigError(f"[signal].{key} requires [signal].mode")

    if generate:
        if dwell is None:
            raise ConfigError("[signal] generate = true requires a dwell mode")
        try:
            return generate_switching_signal(seed, n_graphs, dwell, horizon), dwell
        except Exception as exc:
            raise ConfigError(f"[signal]: {exc}") from exc

    times = _require(table, "signal", "switch_times")
    indices = _require(table, "signal", "graph_indices")
    try:
        signal = SwitchingSignal(tuple(float(t) for t in times),
                                 tuple(int(i) for i in indices))
    except Exception as exc:
        raise ConfigError(f"[signal]: {exc}") from exc
    return signal, dwell


def _build_init(table: dict, mode: str, sphere_dim: int, n_agents: int,
                seed: int) -> tuple[AgentStates, float | None]:
    rng = np.random.default_rng(seed)
    if mode == "rn_consensus_via_sn":
        if "euclidean" not in table:
            raise ConfigError("[init] for rn_consensus_via_sn needs euclidean = [[...]]")
        radius = _number(_require(table, "init", "embed_radius"), "[init].embed_radius")
        pts = table["euclidean"]
        try:
            z = np.array([[float(v) for v in row] for row in pts])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"[init].euclidean: {exc}") from exc
        if z.ndim != 2 or z.shape[0] != n_agents or z.shape[1] != sphere_dim:
            raise ConfigError(
                f"[init].euclidean must be {n_agents} vectors of dimension {sphere_dim}")
        try:
            return consensus_embed(z, radius), radius
        except Exception as exc:
            raise ConfigError(f"[init]: {exc}") from exc

    for key in ("euclidean", "embed_radius"):
        if key in table:
            raise ConfigError(f"[init].{key} is only meaningful for rn_consensus_via_sn")

    if "coordinates" in table:
        if "cap_radius" in table or "cap_center" in table:
            raise ConfigError("[init] cannot mix explicit coordinates with a cap sampler")
        states = []
        for k, row in enumerate(table["coordinates"]):
            try:
                arr = np.array([float(v) for v in row])
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"[init].coordinates entry {k}: {exc}") from exc
            norm = float(np.linalg.norm(arr))
            if abs(norm - 1.0) > 1e-9:
                raise ConfigError(
                    f"[init].coordinates entry {k} has norm {norm!r}; not a unit vector")
            if abs(norm - 1.0) > 1e-12:
                arr = arr / norm
            try:
                states.append(UnitVector(arr))
            except Exception as exc:
                raise ConfigError(f"[init].coordinates entry {k}: {exc}") from exc
        return AgentStates(tuple(states), 0.0), None

    if "cap_radius" not in table:
        raise ConfigError("[init] needs coordinates or a cap sampler (cap_radius)")
    radius = _number(table["cap_radius"], "[init].cap_radius")
    if not 0.0 < radius < math.pi:
        raise ConfigError(f"[init].cap_radius must be in (0, pi), got {radius}")
    if "cap_center" in table:
        row = table["cap_center"]
        try:
            center = UnitVector.normalized(np.array([float(v) for v in row]))
        except Exception as exc:
            raise ConfigError(f"[init].cap_center: {exc}") from exc
        if center.dim != sphere_dim:
            raise ConfigError(
                f"[init].cap_center lives on S^{center.dim}, scenario wants S^{sphere_dim}")
    else:
        center = random_unit_vector(rng, sphere_dim)
    states = sample_in_cap(rng, center, radius, n_agents)
    return AgentStates(tuple(states), 0.0), None


def _toml_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if value != value or math.isinf(value):
            raise ConfigError(f"cannot serialize non-finite float {value}")
        return repr(value)
    if isinstance(value, str):
        return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_toml_value(v) for v in value) + "]"
    raise ConfigError(f"cannot serialize {type(value).__name__} into a config")


def config_text(raw: dict) -> str:
    """Emit a schema-checked config dict as TOML, deterministically ordered."""
    check_schema(raw)
    chunks = []
    for section in ("scenario", "shaping", "signal", "init", "output"):
        table = raw.get(section)
        if not table:
            continue
        lines = [f"[{section}]"]
        for key in sorted(table):
            lines.append(f"{key} = {_toml_value(table[key])}")
        chunks.append("\n".join(lines))
    for table in raw.get("graphs", []):
        chunks.append("[[graphs]]\n" + "\n".join(
            f"{key} = {_toml_value(table[key])}" for key in sorted(table)))
    return "\n\n".join(chunks) + "\n"


def write_config(path, raw: dict) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(config_text(raw))
