"""Sliding-window analytics for temporal interaction graphs."""

from .event_log import (
    EventLog,
    Interaction,
    LogSlice,
    ParseError,
    ParseReport,
    UserTable,
    parse_interactions,
    read_log,
)
from .metrics import (
    BasicCounts,
    ComponentBreakdown,
    RankedUser,
    aggregate_distributions,
    basic_counts,
    component_breakdown,
    components,
    top_k_indegree,
)
from .novelty import FirstSeenTables, build_first_seen, novelty_fractions, spike_detect
from .nullmodels import degree_preserving_graph, shuffle_timestamps
from .synth import Burst, GeneratorConfig, compose, demo_config, generate
from .timeseries import (
    ChurnReport,
    WindowSeries,
    densification_curve,
    lcc_cdf,
    low_pass,
    top_user_trajectories,
    topk_persistence,
)
from .windows import SlidingSchedule, WindowedGraph, WindowSpec, sliding_windows, window_view

__version__ = "0.1.0"
