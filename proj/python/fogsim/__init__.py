"""Python bindings for the fogsim discrete-event simulator.

Times are integer microseconds and sizes are bytes, as in the C++ core.
"""

from ._fogsim import (
    ComparisonReport,
    ExperimentEntry,
    ExperimentResult,
    FogsimError,
    MetricsReport,
    Node,
    NodeKind,
    RunMode,
    ScenarioConfig,
    ServerQueue,
    SharePolicy,
    Simulation,
    Topology,
    aggregate_batch,
    compare,
    format_scenario,
    load_scenario,
    parse_scenario,
    run_experiment,
    share_assign,
    write_reports,
)

__all__ = [
    "ComparisonReport",
    "ExperimentEntry",
    "ExperimentResult",
    "FogsimError",
    "MetricsReport",
    "Node",
    "NodeKind",
    "RunMode",
    "ScenarioConfig",
    "ServerQueue",
    "SharePolicy",
    "Simulation",
    "Topology",
    "aggregate_batch",
    "compare",
    "format_scenario",
    "load_scenario",
    "parse_scenario",
    "run_experiment",
    "share_assign",
    "write_reports",
]
