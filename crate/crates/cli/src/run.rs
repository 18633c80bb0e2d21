use std::collections::BTreeMap;

use hsl_core::analytics::{ehrenfest_moments, Bump, LimitLaw};
use hsl_core::harness::{
    bj_concentration, covariance_entries, diagnose, donsker_ersatz_check, lclt_trend_check,
    plan_regime, run_monte_carlo, slow_regime_vague_check, CRule, ExperimentPlan, Jitter,
    RegimeSpec, RunOptions, TestReport, Thresholds, DEFAULT_STEP_BUDGET,
};
use hsl_core::{Engine, InitialLaw};

use crate::args::{
    CRuleArg, Command, DonskerArgs, EngineArg, ExperimentArgs, InitArg, LcltArgs, MomentsArgs,
    PartitionArgs, RegimeArg, ThresholdArgs, VagueArgs,
};
use crate::output::{self, ReportHeader};
use crate::CliError;

pub struct Outcome {
    pub reports: Vec<TestReport>,
    pub header: Option<ReportHeader>,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub fn step_budget() -> Result<u64, CliError> {
    match std::env::var("HSL_STEP_BUDGET") {
        Err(_) => Ok(DEFAULT_STEP_BUDGET),
        Ok(s) => {
            let v: f64 = s
                .trim()
                .parse()
                .map_err(|_| usage(format!("HSL_STEP_BUDGET = {s:?} is not a number")))?;
            if !v.is_finite() || v < 0.0 {
                return Err(usage(format!("HSL_STEP_BUDGET = {s:?} must be nonnegative")));
            }
            Ok(v as u64)
        }
    }
}

fn thresholds(t: &ThresholdArgs) -> Thresholds {
    Thresholds {
        fast_min: t.fast_min,
        slow_max: t.slow_max,
        drift_max: t.drift_max,
        gap_min: t.gap_min,
    }
}

fn parse_pmf(text: &str) -> Result<BTreeMap<i64, f64>, CliError> {
    let mut map = BTreeMap::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (m, p) = part
            .split_once(':')
            .ok_or_else(|| usage(format!("pmf entry {part:?} is not `m:p`")))?;
        let m: i64 = m.trim().parse().map_err(|_| usage(format!("bad magnetization {m:?}")))?;
        let p: f64 = p.trim().parse().map_err(|_| usage(format!("bad probability {p:?}")))?;
        if map.insert(m, p).is_some() {
            return Err(usage(format!("magnetization {m} appears twice")));
        }
    }
    Ok(map)
}

fn initial_law(a: &ExperimentArgs) -> Result<InitialLaw, CliError> {
    if a.fraction.is_some() && !matches!(a.init, InitArg::Fraction) {
        return Err(usage("`--fraction` needs `--init fraction`"));
    }
    if a.init_pmf.is_some() && !matches!(a.init, InitArg::Pmf) {
        return Err(usage("`--init-pmf` needs `--init pmf`"));
    }
    Ok(match a.init {
        InitArg::Uniform => InitialLaw::UniformOnVertices,
        InitArg::AllPlus => InitialLaw::AllPlus,
        InitArg::Fraction => InitialLaw::FixedMagnetizationFraction(
            a.fraction.ok_or_else(|| usage("`--init fraction` needs `--fraction`"))?,
        ),
        InitArg::Pmf => InitialLaw::ExplicitPmf(parse_pmf(
            a.init_pmf.as_deref().ok_or_else(|| usage("`--init pmf` needs `--init-pmf`"))?,
        )?),
    })
}

fn regime_spec(a: &ExperimentArgs) -> Result<RegimeSpec, CliError> {
    let intermediate_only = a.lambda.is_some() || a.sigma2.is_some() || a.c_rule.is_some() || a.c.is_some();
    match a.regime {
        RegimeArg::Intermediate => {
            let lambda = match (a.lambda, a.n) {
                (Some(l), _) => l,
                (None, Some(n)) => n as f64 / a.k as f64,
                (None, None) => return Err(usage("intermediate regime needs `--lambda` or `--n`")),
            };
            let sigma2 = a.sigma2.unwrap_or(1.0);
            let c_rule = match (a.c_rule, a.c) {
                (None | Some(CRuleArg::Explicit), Some(c)) => CRule::Explicit(c),
                (Some(CRuleArg::Explicit), None) => {
                    return Err(usage("`--c-rule explicit` needs `--c`"))
                }
                (Some(_), Some(_)) => return Err(usage("`--c` only applies to `--c-rule explicit`")),
                (Some(CRuleArg::Diffusive), None) => CRule::Diffusive,
                (Some(CRuleArg::Dimension), None) => CRule::Dimension,
                (None, None) if sigma2 > 0.0 => CRule::Diffusive,
                (None, None) => CRule::Dimension,
            };
            Ok(RegimeSpec::Intermediate {
                k: a.k,
                lambda,
                sigma2,
                c_rule,
                n: a.n,
            })
        }
        RegimeArg::Fast | RegimeArg::Slow if intermediate_only => Err(usage(
            "`--lambda`, `--sigma2`, `--c-rule` and `--c` apply to the intermediate regime only",
        )),
        RegimeArg::Fast => Ok(RegimeSpec::Fast {
            k: a.k,
            n: a.n.ok_or_else(|| usage("fast regime needs `--n`"))?,
        }),
        RegimeArg::Slow => Ok(RegimeSpec::Slow {
            k: a.k,
            n: a.n.ok_or_else(|| usage("slow regime needs `--n`"))?,
        }),
    }
}

fn experiment(a: &ExperimentArgs) -> Result<(ExperimentPlan, RunOptions), CliError> {
    let law = initial_law(a)?;
    let spec = regime_spec(a)?;
    if !(a.p_threshold > 0.0 && a.p_threshold < 1.0) {
        return Err(usage("`--p-threshold` must lie in (0, 1)"));
    }
    let plan = plan_regime(spec, a.grid.clone(), law, a.reps, a.seed, &thresholds(&a.thresholds))?;
    let options = RunOptions {
        step_budget: step_budget()?,
        workers: None,
        engine: match a.engine {
            EngineArg::Urn => Engine::Urn,
            EngineArg::Full => Engine::Full,
        },
    };
    Ok((plan, options))
}

fn header(config: &Command, seed: Option<u64>, regime: Option<&'static str>) -> Result<ReportHeader, CliError> {
    Ok(ReportHeader {
        config: serde_json::to_value(config)?,
        seed,
        regime,
    })
}

fn simulate(cmd: &Command, a: &ExperimentArgs, battery: bool) -> Result<Outcome, CliError> {
    let (plan, options) = experiment(a)?;
    let (summary, reports) = if battery {
        diagnose(&plan, &options, a.p_threshold)?
    } else {
        (run_monte_carlo(&plan, &options)?, Vec::new())
    };
    let dir = &a.output.out;
    output::write_fdl_samples(dir, &summary)?;
    match plan.limit_law() {
        Some(law @ LimitLaw::DeterministicDecay { .. }) => output::write_decay(dir, &summary, &law)?,
        Some(law) => output::write_covariance(dir, &covariance_entries(&summary, &law)?)?,
        None => {}
    }
    println!(
        "{} regime: K = {}, n = {}, c = {}, R = {}",
        plan.regime.kind().as_str(),
        plan.k,
        plan.n,
        plan.c,
        plan.replications
    );
    for (j, t) in summary.times.iter().enumerate() {
        println!(
            "t = {t}: mean = {:.6}, variance = {:.6}",
            summary.means[j], summary.variances[j]
        );
    }
    Ok(Outcome {
        reports,
        header: Some(header(cmd, Some(a.seed), Some(plan.regime.kind().as_str()))?),
    })
}

fn moments(a: &MomentsArgs) -> Result<Outcome, CliError> {
    let m = ehrenfest_moments(a.k, a.delta)?;
    println!("K = {}, delta = {}", m.k, m.delta);
    println!("mean = {}", m.mean);
    println!("variance = {}", m.variance);
    println!("mean_fraction = {}", m.mean_fraction);
    println!("variance_fraction = {}", m.variance_fraction);
    Ok(Outcome {
        reports: Vec::new(),
        header: None,
    })
}

fn lclt(cmd: &Command, a: &LcltArgs) -> Result<Outcome, CliError> {
    let (rows, report) = lclt_trend_check(&a.n)?;
    output::write_lclt(&a.output.out, &rows)?;
    for r in &rows {
        println!("N = {}: sup_error = {:.9}, argmax_m = {}", r.n, r.sup_error, r.argmax_m);
    }
    Ok(Outcome {
        reports: vec![report],
        header: Some(header(cmd, None, None)?),
    })
}

fn vague(cmd: &Command, a: &VagueArgs) -> Result<Outcome, CliError> {
    let bump = Bump::new(a.amplitude, a.width)?;
    let report = slow_regime_vague_check(a.k, a.n, &bump)?;
    for note in &report.notes {
        println!("{note}");
    }
    Ok(Outcome {
        reports: vec![report],
        header: Some(header(cmd, None, Some("slow"))?),
    })
}

fn parse_jitter(s: &str) -> Result<Jitter, CliError> {
    match s {
        "none" => Ok(Jitter::None),
        "shrinking" => Ok(Jitter::ShrinkingInvSqrtK),
        w => w
            .parse::<f64>()
            .map(Jitter::Fixed)
            .map_err(|_| usage(format!("`--jitter` takes none, shrinking or a width, got {w:?}"))),
    }
}

fn donsker(cmd: &Command, a: &DonskerArgs) -> Result<Outcome, CliError> {
    let jitter = parse_jitter(&a.jitter)?;
    let reports = donsker_ersatz_check(a.k, &a.times, jitter, a.reps, a.seed)?;
    Ok(Outcome {
        reports,
        header: Some(header(cmd, Some(a.seed), None)?),
    })
}

fn partition(cmd: &Command, a: &PartitionArgs) -> Result<Outcome, CliError> {
    let plan = plan_regime(
        RegimeSpec::Fast { k: a.k, n: a.n },
        a.grid.clone(),
        InitialLaw::UniformOnVertices,
        a.reps,
        a.seed,
        &thresholds(&a.thresholds),
    )?;
    let draws = (a.reps as u128) * plan.grid.last_index() as u128;
    let budget = step_budget()?;
    if draws > budget as u128 {
        return Err(hsl_core::Error::Resource(format!(
            "{} replications × {} draws exceeds the step budget {budget}",
            a.reps,
            plan.grid.last_index()
        ))
        .into());
    }
    let reports = bj_concentration(plan.k, &plan.grid, a.reps, a.seed)?;
    Ok(Outcome {
        reports,
        header: Some(header(cmd, Some(a.seed), Some("fast"))?),
    })
}

pub fn execute(cmd: &Command) -> Result<Outcome, CliError> {
    match cmd {
        Command::Simulate(a) => simulate(cmd, a, false),
        Command::Diagnose(a) => simulate(cmd, a, true),
        Command::Moments(a) => moments(a),
        Command::Lclt(a) => lclt(cmd, a),
        Command::Vague(a) => vague(cmd, a),
        Command::Donsker(a) => donsker(cmd, a),
        Command::Partition(a) => partition(cmd, a),
    }
}
