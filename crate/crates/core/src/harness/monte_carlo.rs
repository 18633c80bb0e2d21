use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::plan::{ExperimentPlan, Observable, RegimeKind};
use crate::analytics::compensators;
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::stats::Lattice;
use crate::walk::{simulate_observable_path, Engine, Recording};

/// Default cap on `replications × steps` for one run.
pub const DEFAULT_STEP_BUDGET: u64 = 5_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub step_budget: u64,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
    pub engine: Engine,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            step_budget: DEFAULT_STEP_BUDGET,
            workers: None,
            engine: Engine::Urn,
        }
    }
}

/// Per-replication compensator functionals of slow-regime runs.
#[derive(Debug, Clone, PartialEq)]
pub struct CompensatorStats {
    /// `sup_t |B_n(t)|`.
    pub sup_drift: Vec<f64>,
    /// `sup_t |A_n(t) − 4t|`.
    pub sup_quadratic_gap: Vec<f64>,
    /// `M_n(T)` at the last grid time.
    pub terminal_martingale: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloSummary {
    pub times: Vec<f64>,
    pub replications: u64,
    pub seed: u64,
    /// `samples[j][r]`: value at time `j` in replication `r`.
    pub samples: Vec<Vec<f64>>,
    pub means: Vec<f64>,
    pub variances: Vec<f64>,
    pub covariance: DMatrix<f64>,
    pub lattice: Option<Lattice>,
    pub compensators: Option<CompensatorStats>,
    /// Excluded from equality-relevant output; depends on the machine.
    pub wall_time: Duration,
}

impl MonteCarloSummary {
    /// Summary statistics of given samples (`samples[j][r]`).
    pub fn from_samples(
        times: Vec<f64>,
        samples: Vec<Vec<f64>>,
        lattice: Option<Lattice>,
        seed: u64,
    ) -> Result<Self> {
        if times.len() != samples.len() {
            return Err(Error::Validation("one sample column per time is required".into()));
        }
        let r = samples.first().map_or(0, Vec::len);
        if r == 0 || samples.iter().any(|s| s.len() != r) {
            return Err(Error::Validation("sample columns must be nonempty and equal length".into()));
        }
        let rf = r as f64;
        let means: Vec<f64> = samples.iter().map(|s| s.iter().sum::<f64>() / rf).collect();
        let d = times.len();
        let denom = if r > 1 { rf - 1.0 } else { 1.0 };
        let covariance = DMatrix::from_fn(d, d, |a, b| {
            samples[a]
                .iter()
                .zip(&samples[b])
                .map(|(x, y)| (x - means[a]) * (y - means[b]))
                .sum::<f64>()
                / denom
        });
        let variances = (0..d).map(|j| covariance[(j, j)]).collect();
        Ok(Self {
            times,
            replications: r as u64,
            seed,
            samples,
            means,
            variances,
            covariance,
            lattice,
            compensators: None,
            wall_time: Duration::ZERO,
        })
    }

    /// Samples of `value(t_j) − value(t_{j−1})`, with `value(t_{−1}) = 0`.
    pub fn interval_increments(&self, j: usize) -> Vec<f64> {
        match j {
            0 => self.samples[0].clone(),
            _ => self.samples[j]
                .iter()
                .zip(&self.samples[j - 1])
                .map(|(b, a)| b - a)
                .collect(),
        }
    }
}

struct Replication {
    values: Vec<f64>,
    compensator: Option<(f64, f64, f64)>,
}

fn replicate(plan: &ExperimentPlan, engine: Engine, r: u64) -> Result<Replication> {
    let mut rng = RngStream::new(plan.seed, r);
    let slow = plan.regime.kind() == RegimeKind::Slow;
    let recording = if slow { Recording::Dense } else { Recording::GridOnly };
    let path =
        simulate_observable_path(plan.k, &plan.grid, &plan.initial_law, &mut rng, engine, recording)?;
    let values = match plan.observable {
        Observable::Scaled => path.scaled(plan.c),
        Observable::Increment => path.increments(plan.c),
    };
    let compensator = if slow {
        let comp = compensators(&path, plan.n, plan.k)?;
        let m_end = comp.martingale.last().copied().unwrap_or(0.0);
        Some((comp.sup_abs_drift(), comp.sup_quadratic_gap(), m_end))
    } else {
        None
    };
    Ok(Replication { values, compensator })
}

/// Runs `plan.replications` independent paths. Replication `r` uses stream `r` of
/// the plan seed, so results do not depend on the worker count.
pub fn run_monte_carlo(plan: &ExperimentPlan, options: &RunOptions) -> Result<MonteCarloSummary> {
    let steps = plan.steps_per_replication().max(1);
    let total = (plan.replications as u128) * (steps as u128);
    if total > options.step_budget as u128 {
        return Err(Error::Resource(format!(
            "{} replications × {steps} steps exceeds the step budget {}",
            plan.replications, options.step_budget
        )));
    }
    let started = Instant::now();
    let engine = options.engine;
    let work = || -> Result<Vec<Replication>> {
        (0..plan.replications)
            .into_par_iter()
            .map(|r| replicate(plan, engine, r))
            .collect()
    };
    let reps = match options.workers {
        Some(0) => return Err(Error::Validation("worker count must be positive".into())),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::Resource(format!("cannot build worker pool: {e}")))?
            .install(work)?,
        None => work()?,
    };
    let d = plan.grid.len();
    let mut samples = vec![Vec::with_capacity(reps.len()); d];
    for rep in &reps {
        for (col, v) in samples.iter_mut().zip(&rep.values) {
            col.push(*v);
        }
    }
    let mut summary = MonteCarloSummary::from_samples(
        plan.grid.times().to_vec(),
        samples,
        Some(plan.lattice()),
        plan.seed,
    )?;
    if reps.iter().all(|r| r.compensator.is_some()) && !reps.is_empty() {
        let mut stats = CompensatorStats {
            sup_drift: Vec::with_capacity(reps.len()),
            sup_quadratic_gap: Vec::with_capacity(reps.len()),
            terminal_martingale: Vec::with_capacity(reps.len()),
        };
        for (b, a, m) in reps.iter().filter_map(|r| r.compensator) {
            stats.sup_drift.push(b);
            stats.sup_quadratic_gap.push(a);
            stats.terminal_martingale.push(m);
        }
        summary.compensators = Some(stats);
    }
    summary.wall_time = started.elapsed();
    Ok(summary)
}
