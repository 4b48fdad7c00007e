from .app import create_cli, estimate_grid, main, write_equilibrium
from .manifest import RunManifest
from .scenario import ScenarioConfig, SolverSettings, load_scenario, parse_scenario

__all__ = [
    "create_cli",
    "estimate_grid",
    "main",
    "write_equilibrium",
    "RunManifest",
    "ScenarioConfig",
    "SolverSettings",
    "load_scenario",
    "parse_scenario",
]
