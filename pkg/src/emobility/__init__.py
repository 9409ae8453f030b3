"""Shared E-mobility routing engine and emulation platform."""

__version__ = "0.1.0"

from .aco import AcoParams, PheromoneTable, run_aco
from .errors import (
    ClockOutOfRangeError,
    DanglingNodeError,
    DeadEndError,
    EmobilityError,
    InsufficientPairsError,
    NetworkFormatError,
    NoFeasibleEntryError,
    NoFeasiblePlanError,
    ScenarioFormatError,
    SocOutOfRangeError,
    UnknownNodeError,
)
from .exact import exact_optimum
from .graph import (
    Mode,
    MultiModalGraph,
    ReducedGraph,
    ReducedGraphFactory,
    build_reduced_graph,
    load_graph,
    shortest_time,
)
from .plans import Leg, Plan, Violation, plan_cost, validate_plan
from .qlearning import QParams, QTable, extract_policy_path, train
from .scenario import (
    EHub,
    EnergyModel,
    ScenarioConfig,
    SpeedProfile,
    ToolState,
    UserPreference,
    distribute_tools,
    edge_speed,
    energy_required,
    feasible_transition,
    load_scenario,
    sample_od_pairs,
)

__all__ = [name for name in dir() if not name.startswith("_")]
