"""Generalized moving peaks benchmark for large-scale dynamic optimization."""

__version__ = "0.1.0"

from .landscape import (  # noqa: E402
    Component,
    PackedProblem,
    ProblemInstance,
    SubFunction,
    evaluate_problem,
    problem_optimum_value,
    promising_region_count,
)
from .rng import RandomSource, create_rng  # noqa: E402
from .scenario import ScenarioConfig, build_scenario, load_config, save_config  # noqa: E402
from .harness import Session, create_session, e_bbc  # noqa: E402

__all__ = [
    "Component",
    "PackedProblem",
    "ProblemInstance",
    "RandomSource",
    "ScenarioConfig",
    "Session",
    "SubFunction",
    "build_scenario",
    "create_rng",
    "create_session",
    "e_bbc",
    "evaluate_problem",
    "load_config",
    "problem_optimum_value",
    "promising_region_count",
    "save_config",
]
