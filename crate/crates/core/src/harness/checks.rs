use rand::Rng;
use rayon::prelude::*;

use super::monte_carlo::{run_monte_carlo, MonteCarloSummary, RunOptions};
use super::plan::{ExperimentPlan, Observable, RegimeKind};
use super::report::{Criterion, TestReport};
use crate::analytics::{limit_covariance, local_clt_gap, Bump, LimitLaw};
use crate::error::{Error, Result};
use crate::grid::IntervalGrid;
use crate::parity::{accumulate_parities, partial_sums_at_random_times, signature_counts};
use crate::pmf::{rademacher_sum_pmf, CompensatedSum};
use crate::rng::RngStream;
use crate::stats::{ks_test, normal_cdf, Lattice};

/// Default KS p-value threshold.
pub const DEFAULT_P_THRESHOLD: f64 = 0.001;

const KS_MIN_SAMPLES: usize = 100;
const KS_RELIABLE_SAMPLES: usize = 1000;
const COVARIANCE_MIN_REPLICATIONS: u64 = 1000;
const COVARIANCE_BIAS_ALLOWANCE: f64 = 0.02;
const VAGUE_MIN_SITES: u64 = 10;

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().copied().collect::<CompensatedSum>().value() / n;
    let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
    let var = if xs.len() > 1 { ss / (n - 1.0) } else { 0.0 };
    (mean, var.sqrt())
}

fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let (mx, sx) = mean_sd(xs);
    let (my, sy) = mean_sd(ys);
    let n = xs.len() as f64;
    let cov: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / (n - 1.0);
    cov / (sx * sy)
}

fn column(summary: &MonteCarloSummary, index: usize) -> Result<&[f64]> {
    summary
        .samples
        .get(index)
        .map(Vec::as_slice)
        .ok_or_else(|| Error::Validation(format!("grid point {index} is out of range")))
}

/// Two-sided KS test of the samples at one grid point against the law's Gaussian marginal.
pub fn gaussian_marginal_test(
    summary: &MonteCarloSummary,
    law: &LimitLaw,
    index: usize,
    p_threshold: f64,
) -> Result<TestReport> {
    let xs = column(summary, index)?;
    if xs.len() < KS_MIN_SAMPLES {
        return Err(Error::Capability(format!(
            "KS test needs at least {KS_MIN_SAMPLES} samples, got {}",
            xs.len()
        )));
    }
    let t = summary.times[index];
    let (mean, var) = (law.mean(t), law.variance(t));
    if !(var > 0.0) {
        return Err(Error::Domain(format!(
            "{} has a degenerate marginal at t = {t}",
            law.name()
        )));
    }
    let sd = var.sqrt();
    let ks = ks_test(xs, |x| normal_cdf(x, mean, sd), summary.lattice);
    let mut report = TestReport::new(
        format!("ks_marginal[t={t}]"),
        ks.statistic,
        Criterion::PValueAtLeast(p_threshold),
    )
    .with_p_value(ks.p_value)
    .with_replications(xs.len() as u64)
    .with_seed(summary.seed);
    if xs.len() < KS_RELIABLE_SAMPLES {
        report = report.note("fewer than 1000 samples: asymptotic KS p-value is approximate");
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceEntry {
    pub row: usize,
    pub col: usize,
    pub empirical: f64,
    pub target: f64,
    pub deviation: f64,
}

/// Entrywise comparison of the empirical covariance with the law's covariance.
pub fn covariance_entries(summary: &MonteCarloSummary, law: &LimitLaw) -> Result<Vec<CovarianceEntry>> {
    let target = limit_covariance(law, &summary.times)?;
    let d = summary.times.len();
    let mut out = Vec::with_capacity(d * d);
    for row in 0..d {
        for col in 0..d {
            let (e, t) = (summary.covariance[(row, col)], target[(row, col)]);
            out.push(CovarianceEntry {
                row,
                col,
                empirical: e,
                target: t,
                deviation: e - t,
            });
        }
    }
    Ok(out)
}

/// Max entrywise deviation from the limit covariance; default tolerance
/// `(5/√R + 0.02)·max(1, largest target variance)`.
pub fn covariance_test(
    summary: &MonteCarloSummary,
    law: &LimitLaw,
    tolerance: Option<f64>,
) -> Result<TestReport> {
    if summary.replications < COVARIANCE_MIN_REPLICATIONS {
        return Err(Error::Capability(format!(
            "covariance test needs R ≥ {COVARIANCE_MIN_REPLICATIONS}, got {}",
            summary.replications
        )));
    }
    let entries = covariance_entries(summary, law)?;
    let scale = entries
        .iter()
        .filter(|e| e.row == e.col)
        .fold(1.0f64, |m, e| m.max(e.target));
    let tol = tolerance.unwrap_or_else(|| {
        (5.0 / (summary.replications as f64).sqrt() + COVARIANCE_BIAS_ALLOWANCE) * scale
    });
    let dev = entries.iter().fold(0.0f64, |m, e| m.max(e.deviation.abs()));
    Ok(TestReport::new(
        format!("covariance_max_deviation[{}]", law.name()),
        dev,
        Criterion::Within {
            target: 0.0,
            tolerance: tol,
        },
    )
    .with_replications(summary.replications)
    .with_seed(summary.seed))
}

/// Empirical variance at one grid point against a target.
pub fn variance_test(
    summary: &MonteCarloSummary,
    index: usize,
    target: f64,
    tolerance: f64,
) -> Result<TestReport> {
    column(summary, index)?;
    Ok(TestReport::new(
        format!("variance[t={}]", summary.times[index]),
        summary.variances[index],
        Criterion::Within { target, tolerance },
    )
    .with_replications(summary.replications)
    .with_seed(summary.seed))
}

/// Pearson correlation of paired samples against a target.
pub fn correlation_test(
    name: impl Into<String>,
    xs: &[f64],
    ys: &[f64],
    target: f64,
    tolerance: f64,
) -> Result<TestReport> {
    if xs.len() != ys.len() || xs.len() < 3 {
        return Err(Error::Validation(
            "correlation needs two paired samples of length ≥ 3".into(),
        ));
    }
    Ok(
        TestReport::new(name, pearson(xs, ys), Criterion::Within { target, tolerance })
            .with_replications(xs.len() as u64),
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeanTolerance {
    Absolute(f64),
    /// `multiple·sd/√R + bias`.
    StandardErrors { multiple: f64, bias: f64 },
}

/// Empirical mean at each grid point against the law's mean.
pub fn mean_test(
    summary: &MonteCarloSummary,
    law: &LimitLaw,
    tolerance: MeanTolerance,
) -> Result<Vec<TestReport>> {
    let r = summary.replications as f64;
    Ok(summary
        .times
        .iter()
        .enumerate()
        .map(|(j, &t)| {
            let tol = match tolerance {
                MeanTolerance::Absolute(a) => a,
                MeanTolerance::StandardErrors { multiple, bias } => {
                    multiple * (summary.variances[j] / r).sqrt() + bias
                }
            };
            TestReport::new(
                format!("mean[t={t}]"),
                summary.means[j],
                Criterion::Within {
                    target: law.mean(t),
                    tolerance: tol,
                },
            )
            .with_replications(summary.replications)
            .with_seed(summary.seed)
        })
        .collect())
}

/// `|B(J)|/K` for every `J ⊆ [s]` (bit `k−1` of the index ↔ interval `k`), one row per replication.
pub fn signature_fraction_samples(
    k: u64,
    grid: &IntervalGrid,
    replications: u64,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    let kf = k as f64;
    (0..replications)
        .into_par_iter()
        .map(|r| {
            let mut rng = RngStream::new(seed, r);
            let ledger = accumulate_parities(k, grid, &mut rng)?;
            Ok(signature_counts(&ledger)
                .counts()
                .iter()
                .map(|&c| c as f64 / kf)
                .collect())
        })
        .collect()
}

fn subset_label(mask: usize, s: usize) -> String {
    let members: Vec<String> = (0..s)
        .filter(|b| mask >> b & 1 == 1)
        .map(|b| (b + 1).to_string())
        .collect();
    format!("{{{}}}", members.join(","))
}

/// Per-`J` mean of `|B(J)|/K` (within 0.02 of `2^{−s}`) and its mean-square
/// deviation from `2^{−s}` (at most 0.002).
pub fn bj_concentration(
    k: u64,
    grid: &IntervalGrid,
    replications: u64,
    seed: u64,
) -> Result<Vec<TestReport>> {
    if replications == 0 {
        return Err(Error::Validation("at least one replication is required".into()));
    }
    let rows = signature_fraction_samples(k, grid, replications, seed)?;
    let s = grid.len();
    let target = 0.5f64.powi(s as i32);
    let r = rows.len() as f64;
    let mut out = Vec::with_capacity(2 << s);
    for mask in 0..(1usize << s) {
        let label = subset_label(mask, s);
        let mean = rows.iter().map(|row| row[mask]).sum::<f64>() / r;
        let msd = rows.iter().map(|row| (row[mask] - target).powi(2)).sum::<f64>() / r;
        out.push(
            TestReport::new(
                format!("bj_mean_fraction[J={label}]"),
                mean,
                Criterion::Within {
                    target,
                    tolerance: 0.02,
                },
            )
            .with_replications(replications)
            .with_seed(seed),
        );
        out.push(
            TestReport::new(
                format!("bj_mean_square_deviation[J={label}]"),
                msd,
                Criterion::AtMost(0.002),
            )
            .with_replications(replications)
            .with_seed(seed),
        );
    }
    Ok(out)
}

/// Exact `√(2πK/n)·E[φ(X(0)/√n)]` under the uniform law against `∫φ`; relative error ≤ 0.02.
pub fn slow_regime_vague_check(k: u64, n: u64, bump: &Bump) -> Result<TestReport> {
    if k == 0 || n == 0 {
        return Err(Error::Validation("K and n must be positive".into()));
    }
    let root_n = (n as f64).sqrt();
    let reach = bump.width * root_n;
    // integers m with |m| < w√n
    let sites = 2 * (reach.ceil() as u64) - 1;
    if sites < VAGUE_MIN_SITES {
        return Err(Error::Resolution(format!(
            "only {sites} lattice sites lie inside the support (w√n = {reach}); at least {VAGUE_MIN_SITES} are needed"
        )));
    }
    let kf = k as f64;
    let top = (reach.floor() as i64).min(k as i64);
    let mut m = -top;
    if (m - k as i64).rem_euclid(2) != 0 {
        m += 1;
    }
    let mut sum = CompensatedSum::default();
    while m <= top {
        sum.add(bump.eval(m as f64 / root_n) * rademacher_sum_pmf(k, m));
        m += 2;
    }
    let lhs = (2.0 * std::f64::consts::PI * kf / n as f64).sqrt() * sum.value();
    let rhs = bump.integral();
    let rel = if rhs != 0.0 {
        (lhs - rhs).abs() / rhs.abs()
    } else {
        (lhs - rhs).abs()
    };
    Ok(TestReport::new(
        "vague_relative_error",
        rel,
        Criterion::Within {
            target: 0.0,
            tolerance: 0.02,
        },
    )
    .note(format!("lattice sum = {lhs:.17e}"))
    .note(format!("integral = {rhs:.17e}")))
}

/// Evaluation-time perturbation in the Donsker ersatz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Jitter {
    None,
    /// `Uniform(−K^{−1/2}, K^{−1/2})`.
    ShrinkingInvSqrtK,
    /// `Uniform(−w, w)` with `w` not shrinking in `K`; outside the hypothesis.
    Fixed(f64),
}

/// KS tests of `T_K(t_j + U_j)` against `N(0, t_j)` for every component.
pub fn donsker_ersatz_check(
    k: u64,
    times: &[f64],
    jitter: Jitter,
    replications: u64,
    seed: u64,
) -> Result<Vec<TestReport>> {
    if times.is_empty() {
        return Err(Error::Validation("at least one time is required".into()));
    }
    if let Some(&t) = times.iter().find(|t| !(**t > 0.0) || !t.is_finite()) {
        return Err(Error::Domain(format!("time {t} must be positive")));
    }
    if k == 0 {
        return Err(Error::Validation("dimension must be positive".into()));
    }
    let width = match jitter {
        Jitter::None => 0.0,
        Jitter::ShrinkingInvSqrtK => 1.0 / (k as f64).sqrt(),
        Jitter::Fixed(w) if w >= 0.0 && w.is_finite() => w,
        Jitter::Fixed(w) => return Err(Error::Domain(format!("jitter width {w} is invalid"))),
    };
    let rows: Vec<Vec<f64>> = (0..replications)
        .into_par_iter()
        .map(|r| {
            let mut signs = RngStream::new(seed, r);
            let mut clock = signs.lane(1);
            let at: Vec<f64> = times
                .iter()
                .map(|&t| {
                    if width > 0.0 {
                        (t + clock.random_range(-width..width)).max(0.0)
                    } else {
                        t
                    }
                })
                .collect();
            partial_sums_at_random_times(k, &at, &mut signs)
        })
        .collect::<Result<_>>()?;
    let scale = (k as f64).sqrt();
    let mut out = Vec::with_capacity(times.len());
    for (j, &t) in times.iter().enumerate() {
        let xs: Vec<f64> = rows.iter().map(|row| row[j]).collect();
        if xs.len() < KS_MIN_SAMPLES {
            return Err(Error::Capability(format!(
                "KS test needs at least {KS_MIN_SAMPLES} samples, got {}",
                xs.len()
            )));
        }
        let lattice = if width > 0.0 {
            Lattice {
                origin: 0.0,
                spacing: 1.0 / scale,
            }
        } else {
            let len = crate::grid::floor_index(k, t)?;
            Lattice {
                origin: (len % 2) as f64 / scale,
                spacing: 2.0 / scale,
            }
        };
        let sd = t.sqrt();
        let ks = ks_test(&xs, |x| normal_cdf(x, 0.0, sd), Some(lattice));
        let criterion = match jitter {
            Jitter::Fixed(_) => Criterion::Informational,
            _ => Criterion::PValueAtLeast(DEFAULT_P_THRESHOLD),
        };
        let mut report = TestReport::new(format!("donsker_ks[t={t}]"), ks.statistic, criterion)
            .with_p_value(ks.p_value)
            .with_replications(replications)
            .with_seed(seed);
        if let Jitter::Fixed(w) = jitter {
            report = report.note(format!(
                "jitter width {w} does not shrink with K: outside the hypothesis, no verdict"
            ));
        }
        if xs.len() < KS_RELIABLE_SAMPLES {
            report = report.note("fewer than 1000 samples: asymptotic KS p-value is approximate");
        }
        out.push(report);
    }
    Ok(out)
}

/// Fractions of replications with `sup|B_n| ≤ bound` and `sup|A_n − 4t| ≤ bound`,
/// plus the mean of `M_n(T)` within 4 standard errors of 0.
pub fn compensator_checks(
    summary: &MonteCarloSummary,
    bound: f64,
    fraction: f64,
) -> Result<Vec<TestReport>> {
    let stats = summary
        .compensators
        .as_ref()
        .ok_or_else(|| Error::Contract("summary carries no compensator statistics".into()))?;
    let r = stats.sup_drift.len() as f64;
    let frac = |v: &[f64]| v.iter().filter(|x| **x <= bound).count() as f64 / r;
    let (m_mean, m_sd) = mean_sd(&stats.terminal_martingale);
    Ok(vec![
        TestReport::new(
            format!("compensator_drift_fraction[sup|B|≤{bound}]"),
            frac(&stats.sup_drift),
            Criterion::AtLeast(fraction),
        ),
        TestReport::new(
            format!("compensator_quadratic_fraction[sup|A−4t|≤{bound}]"),
            frac(&stats.sup_quadratic_gap),
            Criterion::AtLeast(fraction),
        ),
        TestReport::new(
            "martingale_terminal_mean",
            m_mean,
            Criterion::Within {
                target: 0.0,
                tolerance: 4.0 * m_sd / r.sqrt(),
            },
        ),
    ]
    .into_iter()
    .map(|t| t.with_replications(summary.replications).with_seed(summary.seed))
    .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LcltRow {
    pub n: u64,
    pub sup_error: f64,
    pub argmax_m: i64,
}

/// Local-CLT gaps over increasing `N`; passes iff strictly decreasing.
pub fn lclt_trend_check(ns: &[u64]) -> Result<(Vec<LcltRow>, TestReport)> {
    if ns.len() < 2 || ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Validation(
            "at least two strictly increasing N values are required".into(),
        ));
    }
    let rows = ns
        .iter()
        .map(|&n| {
            local_clt_gap(n).map(|(sup_error, argmax_m)| LcltRow {
                n,
                sup_error,
                argmax_m,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let worst = rows
        .windows(2)
        .map(|w| w[1].sup_error - w[0].sup_error)
        .fold(f64::NEG_INFINITY, f64::max);
    let report = TestReport::new("lclt_max_successive_change", worst, Criterion::StrictlyBelow(0.0));
    Ok((rows, report))
}

/// Runs a plan and applies its regime's battery.
pub fn diagnose(
    plan: &ExperimentPlan,
    options: &RunOptions,
    p_threshold: f64,
) -> Result<(MonteCarloSummary, Vec<TestReport>)> {
    let law = plan.limit_law().ok_or_else(|| {
        Error::Capability("no reference limit for a non-degenerate explicit initial law".into())
    })?;
    let summary = run_monte_carlo(plan, options)?;
    let mut reports = Vec::new();
    match law {
        LimitLaw::DeterministicDecay { .. } => {
            reports.extend(mean_test(
                &summary,
                &law,
                MeanTolerance::StandardErrors {
                    multiple: 3.0,
                    bias: 0.02,
                },
            )?);
        }
        _ => {
            if summary.replications >= COVARIANCE_MIN_REPLICATIONS {
                reports.push(covariance_test(&summary, &law, None)?);
            } else {
                reports.push(
                    TestReport::new("covariance_max_deviation", f64::NAN, Criterion::Informational)
                        .with_replications(summary.replications)
                        .note("skipped: the covariance test needs R ≥ 1000"),
                );
            }
            if summary.samples[0].len() >= KS_MIN_SAMPLES {
                for (j, &t) in summary.times.iter().enumerate() {
                    if law.variance(t) > 0.0 {
                        reports.push(gaussian_marginal_test(&summary, &law, j, p_threshold)?);
                    }
                }
            }
        }
    }
    if plan.regime.kind() == RegimeKind::Slow {
        reports.extend(compensator_checks(&summary, 0.1, 0.95)?);
    }
    if plan.initial_law.is_uniform() && plan.observable == Observable::Scaled && summary.replications > 1 {
        let kf = plan.k as f64;
        let se = kf * (2.0 / (summary.replications as f64 - 1.0)).sqrt();
        for (j, &t) in summary.times.iter().enumerate() {
            reports.push(
                TestReport::new(
                    format!("stationary_variance[t={t}]"),
                    summary.variances[j] * plan.c * plan.c,
                    Criterion::Within {
                        target: kf,
                        tolerance: 4.0 * se,
                    },
                )
                .with_replications(summary.replications)
                .with_seed(summary.seed),
            );
        }
    }
    Ok((summary, reports))
}
