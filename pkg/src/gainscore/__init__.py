"""Gain-score robustness test for outcome-to-outcome interference in
two-sibling fixed-effects designs.

The package has three layers: exact identification analytics for the
linearized scenarios (trek enumeration, implied covariances, partial
coefficients), a thresholded Gaussian data generator with reproducible
per-replication streams, and a Monte Carlo harness that reproduces the
result grids with coverage probabilities and validity verdicts.
"""

__version__ = "0.1.0"

from .analytic import (
    CollinearRegressorsError,
    CovMatrix,
    Trek,
    closed_form_b1_b2,
    enumerate_treks,
    implied_covariance_matrix,
    partial_coefficients,
    trek_covariance,
)
from .config import (
    ConfigError,
    ScenarioConfig,
    apply_overrides,
    dump_config,
    load_config,
    parse_config_text,
)
from .dgp import PairSample, gain_scores, generate, replication_rng
from .harness import (
    AggregateResult,
    BASELINE_PARAMS,
    HarnessError,
    SIM_SETS,
    SimulationSet,
    TableResult,
    ValidityVerdict,
    classify_validity,
    run_cell,
    run_table,
)
from .ols import CollinearDesignError, FitResult, fit, gain_score_regression
from .scenarios import (
    CycleError,
    Scenario,
    StructuralModel,
    ValidationReport,
    build_scenario,
    topological_order,
    validate,
)

__all__ = [
    "__version__",
    "AggregateResult",
    "BASELINE_PARAMS",
    "CollinearDesignError",
    "CollinearRegressorsError",
    "ConfigError",
    "CovMatrix",
    "CycleError",
    "FitResult",
    "HarnessError",
    "PairSample",
    "Scenario",
    "ScenarioConfig",
    "SimulationSet",
    "SIM_SETS",
    "StructuralModel",
    "TableResult",
    "Trek",
    "ValidationReport",
    "ValidityVerdict",
    "apply_overrides",
    "build_scenario",
    "classify_validity",
    "closed_form_b1_b2",
    "dump_config",
    "enumerate_treks",
    "fit",
    "gain_score_regression",
    "gain_scores",
    "generate",
    "implied_covariance_matrix",
    "load_config",
    "parse_config_text",
    "partial_coefficients",
    "replication_rng",
    "run_cell",
    "run_table",
    "topological_order",
    "trek_covariance",
    "validate",
]
