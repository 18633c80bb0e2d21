//! Regime planning, parallel Monte Carlo ensembles and statistical verdicts.

mod checks;
mod monte_carlo;
mod plan;
mod report;

pub use checks::{
    bj_concentration, compensator_checks, correlation_test, covariance_entries, covariance_test,
    diagnose, donsker_ersatz_check, gaussian_marginal_test, lclt_trend_check, mean_test,
    signature_fraction_samples, slow_regime_vague_check, variance_test, CovarianceEntry, Jitter,
    LcltRow, MeanTolerance, DEFAULT_P_THRESHOLD,
};
pub use monte_carlo::{
    run_monte_carlo, CompensatorStats, MonteCarloSummary, RunOptions, DEFAULT_STEP_BUDGET,
};
pub use plan::{plan_regime, CRule, ExperimentPlan, Observable, RegimeKind, RegimeSpec, Thresholds};
pub use report::{Criterion, TestReport};
