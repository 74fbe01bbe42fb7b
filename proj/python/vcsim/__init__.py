"""Python access to the vcsim value chain simulator."""

import json

from ._core import (
    ComparisonError,
    ConfigError,
    InvariantViolation,
    IoError,
    Run,
    ValidationError,
    VcsimError,
    case_study_yaml,
    decay_trajectory,
    firm_f,
    innovation_step,
    innovation_step_bound,
    smi,
    spi,
    sri,
    update_vote,
    validate_scenario,
)
from ._core import compare_json as _compare_json
from ._core import run as _run

__all__ = [
    "ComparisonError",
    "ConfigError",
    "InvariantViolation",
    "IoError",
    "Run",
    "ValidationError",
    "VcsimError",
    "case_study_yaml",
    "compare",
    "decay_trajectory",
    "firm_f",
    "innovation_step",
    "innovation_step_bound",
    "kpi",
    "run",
    "smi",
    "spi",
    "sri",
    "update_vote",
    "validate_scenario",
]


def run(scenario_yaml=None, *, base_dir=".", mode=None, seed=None, horizon=None):
    """Run a scenario (YAML text, or the built-in case study when omitted)."""
    return _run(scenario_yaml, str(base_dir), mode, seed, horizon)


def kpi(result):
    """KPI report of a run as a dict."""
    return json.loads(result.kpi_json)


def compare(scor, vcor):
    """Side-by-side KPI comparison of two runs, as a dict with a "rows" list."""
    return json.loads(_compare_json(scor.kpi_json, vcor.kpi_json))
