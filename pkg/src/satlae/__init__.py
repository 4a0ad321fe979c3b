"""Slot-level simulator for distributed satellite / LAV MIMO uplinks."""

from .config import Policy, ScenarioConfig
from .engine import (ExperimentResult, SlotMetrics, min_power_experiment, power_sweep, run,
                     service_experiment, timescale_experiment)
from .scenario import dump_scenario, parse_scenario, parse_scenario_text

__version__ = "0.1.0"

__all__ = [
    "Policy", "ScenarioConfig", "ExperimentResult", "SlotMetrics", "run", "power_sweep",
    "min_power_experiment", "service_experiment", "timescale_experiment", "parse_scenario",
    "parse_scenario_text", "dump_scenario",
]
