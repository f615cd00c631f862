"""Scenario configuration, paired runs, nu sweeps and convergence studies."""

from .config import ConfigError, Scenario, from_dict, load  # noqa: F401
from .convergence import ConvergenceReport, convergence_report  # noqa: F401
from .scenario import ScenarioResult, run_scenario, simulate, write_artifacts  # noqa: F401
from .sweep import SweepResult, sweep_nu, write_sweep_artifacts  # noqa: F401
