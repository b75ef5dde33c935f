"""fclab: a forecast-combination laboratory.

Streaming combination methods (simple average, inverse-MSE weighting,
regression weights, exponential re-weighting and its two-level variant),
seeded simulation scenarios, subset screening, analytic risk baselines and
an evaluation harness for external forecast panels.
"""

__version__ = "0.1.0"

from .core import (
    EvaluationWindow,
    ForecastPanel,
    RiskReport,
    WeightVector,
    msfe,
    normalize_vs_baseline,
)
from .combiners import (
    Combiner,
    ExponentialReweighting,
    InverseMseWeighting,
    LinearRegressionCombiner,
    Rolling,
    SimpleAverage,
    sa_predict,
)
from .dgp import (
    BreakConfig,
    ScenarioConfig,
    ScreeningConfig,
    beta_for_sn,
    generate_breaks,
    generate_case,
    generate_screening,
    sn_grid,
)
from .harness import (
    ExperimentConfig,
    ResultRow,
    ResultTable,
    build_method,
    replication_msfes,
    run_combiner,
    run_experiment,
    run_panel_eval,
)
from .mafter import MultiLevelCombiner, mafter_regret
from .numerics import (
    LeastSquaresFit,
    SeededGenerator,
    normalize_log_weights,
    ols,
    running_error_variance,
)
from .oracle import AsymptoticResult, McRisk, case1_limit, case2_limit, mc_risk, unit_weight
from .panel_io import parse_panel, write_panel, write_result_table
from .screening import (
    SubsetModel,
    abc_score,
    best_per_size,
    retain_top,
    screen_models,
    screening_forecast_panel,
    subset_forecasts,
)

__all__ = [
    "__version__",
    "AsymptoticResult",
    "BreakConfig",
    "Combiner",
    "EvaluationWindow",
    "ExperimentConfig",
    "ExponentialReweighting",
    "ForecastPanel",
    "InverseMseWeighting",
    "LeastSquaresFit",
    "LinearRegressionCombiner",
    "McRisk",
    "MultiLevelCombiner",
    "ResultRow",
    "ResultTable",
    "RiskReport",
    "Rolling",
    "ScenarioConfig",
    "ScreeningConfig",
    "SeededGenerator",
    "SimpleAverage",
    "SubsetModel",
    "WeightVector",
    "abc_score",
    "best_per_size",
    "beta_for_sn",
    "build_method",
    "case1_limit",
    "case2_limit",
    "generate_breaks",
    "generate_case",
    "generate_screening",
    "mafter_regret",
    "mc_risk",
    "msfe",
    "normalize_log_weights",
    "normalize_vs_baseline",
    "ols",
    "parse_panel",
    "replication_msfes",
    "retain_top",
    "run_combiner",
    "run_experiment",
    "run_panel_eval",
    "running_error_variance",
    "sa_predict",
    "screen_models",
    "screening_forecast_panel",
    "sn_grid",
    "subset_forecasts",
    "unit_weight",
    "write_panel",
    "write_result_table",
]
