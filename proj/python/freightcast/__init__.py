"""Seasonal ARIMA/ARIMAX modeling, counterfactual baselines and recovery-pace
analysis for monthly freight-like series."""

from ._core import (  # noqa: F401
    AcfResult,
    AdfResult,
    BacktestMetrics,
    BestFitLine,
    CandidateGrid,
    CandidateResult,
    DatasetConfig,
    DecompositionResult,
    DeterministicTerms,
    DifferenceSpec,
    FittedModel,
    Forecast,
    Frequency,
    HoldoutPolicy,
    ImpactPoint,
    ImpactSeries,
    LjungBoxResult,
    ModelOrder,
    PacfResult,
    ParamVector,
    Period,
    RecoveryPacePoint,
    ResidualSummary,
    ScenarioKind,
    ScenarioResult,
    ScenarioSpec,
    SelectionReport,
    TimeSeries,
    Transform,
    WindowSpec,
    acf,
    adf_test,
    apply_transform,
    backtest_metrics,
    best_fit_line,
    classical_decompose,
    classify_recovery_region,
    difference,
    evaluate_at,
    evaluate_candidate,
    fit,
    forecast,
    inverse_difference,
    invert_transform,
    kalman_loglik,
    ljung_box,
    load_series_csv,
    pacf,
    pearson_corr,
    project_covariate,
    recovery_pace_points,
    resample_weekly_to_monthly,
    residual_diagnostics,
    run_pipeline,
    run_scenario,
    run_scenario_pair,
    select_model,
    simulate,
    slice_window,
)

__version__ = "0.1.0"
