"""Replica runner, estimators and Monte Carlo experiments."""

from .experiments import (
    DEFAULT_PARAMS,
    DEFAULT_TOLERANCES,
    EXPERIMENTS,
    Estimate,
    ExperimentReport,
    ExperimentSpec,
    TestOutcome,
    experiment,
    run_experiment,
)
from .replicas import run_replicas
from .stats import (
    empirical_cf,
    hill_estimator,
    hill_scan,
    ks_statistic,
    stable_cf_reference,
    tail_slope,
    taylor_tail_T,
)
from .report import report_csv, report_from_dict, report_json, summary_lines, write_report
