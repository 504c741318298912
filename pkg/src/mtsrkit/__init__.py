"""Performance toolkit for multi-tote storage-and-retrieval robot warehouses.

Predicts steady-state order throughput time and robot/worker/charger
utilization with a shared-token multi-class semi-open queueing network solved
by mean value analysis, cross-validates against an in-package discrete-event
simulator, and serves what-if planning over a CLI and HTTP API.
"""

__version__ = "0.1.0"

from .config import ScenarioConfig, parse_config, reference_scenario  # noqa: F401
from .layout import DistanceMatrix, GridLayout, generate_layout, shortest_distances  # noqa: F401
from .model import QnModel, SystemSpec, build_qn_model, build_routing, build_trip_plan  # noqa: F401
from .planner import PlanResult, SearchBounds, StabilityTarget, minimize_resources  # noqa: F401
from .scenario import build_scenario, simulate_scenario, solve_scenario  # noqa: F401
from .simulator import SimConfig, SimMetrics, compare, simulate  # noqa: F401
from .solver import SolveResult, solve  # noqa: F401
from .travel import KinematicsConfig, TravelTimeTable, build_travel_table  # noqa: F401
