use hsl_core::analytics::LimitLaw;
use hsl_core::harness::{
    diagnose, mean_test, plan_regime, run_monte_carlo, CRule, MeanTolerance, RegimeSpec,
    RunOptions, Thresholds, DEFAULT_P_THRESHOLD,
};
use hsl_core::{Engine, Error, InitialLaw};

fn intermediate(k: u64, sigma2: f64, c_rule: CRule) -> RegimeSpec {
    RegimeSpec::Intermediate {
        k,
        lambda: 1.0,
        sigma2,
        c_rule,
        n: None,
    }
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let plan = plan_regime(
        intermediate(256, 1.0, CRule::Diffusive),
        vec![0.0, 0.5, 1.0],
        InitialLaw::UniformOnVertices,
        300,
        42,
        &Thresholds::default(),
    )
    .unwrap();
    let run = |workers| {
        let mut s = run_monte_carlo(
            &plan,
            &RunOptions {
                workers: Some(workers),
                ..RunOptions::default()
            },
        )
        .unwrap();
        s.wall_time = Default::default();
        s
    };
    let one = run(1);
    assert_eq!(one, run(3));
    assert_eq!(one, run(1));
}

#[test]
fn slow_summaries_are_reproducible() {
    let plan = plan_regime(
        RegimeSpec::Slow { k: 100_000, n: 400 },
        vec![0.5, 1.0],
        InitialLaw::UniformOnVertices,
        200,
        7,
        &Thresholds::default(),
    )
    .unwrap();
    let mut a = run_monte_carlo(&plan, &RunOptions { workers: Some(2), ..RunOptions::default() }).unwrap();
    let mut b = run_monte_carlo(&plan, &RunOptions { workers: Some(1), ..RunOptions::default() }).unwrap();
    a.wall_time = Default::default();
    b.wall_time = Default::default();
    assert_eq!(a, b);
    assert_eq!(a.compensators.as_ref().unwrap().sup_drift.len(), 200);
}

#[test]
fn uniform_start_keeps_variance_k() {
    let plan = plan_regime(
        intermediate(1024, 1.0, CRule::Diffusive),
        vec![0.0, 0.3, 1.0],
        InitialLaw::UniformOnVertices,
        2000,
        5,
        &Thresholds::default(),
    )
    .unwrap();
    let (_, reports) = diagnose(&plan, &RunOptions::default(), DEFAULT_P_THRESHOLD).unwrap();
    let stationary: Vec<_> = reports
        .iter()
        .filter(|r| r.name.starts_with("stationary_variance"))
        .collect();
    assert_eq!(stationary.len(), 3);
    for r in stationary {
        assert_eq!(r.pass(), Some(true), "{r:?}");
    }
}

#[test]
fn decay_means_within_three_standard_errors() {
    let plan = plan_regime(
        intermediate(1024, 0.0, CRule::Dimension),
        vec![0.0, 0.5, 1.0],
        InitialLaw::FixedMagnetizationFraction(0.8),
        2000,
        8,
        &Thresholds::default(),
    )
    .unwrap();
    assert!(matches!(plan.limit_law(), Some(LimitLaw::DeterministicDecay { .. })));
    let summary = run_monte_carlo(&plan, &RunOptions::default()).unwrap();
    // finite-K exact mean is m0/K·(1 − 2/K)^{⌊nt⌋}; against 0.8 e^{−2t}
    // the bias is at most |m0/K − 0.8| plus O(1/K)
    let law = LimitLaw::DeterministicDecay { c: 0.8, lambda: 1.0 };
    let reports = mean_test(
        &summary,
        &law,
        MeanTolerance::StandardErrors {
            multiple: 3.0,
            bias: 2.0 / 1024.0,
        },
    )
    .unwrap();
    for r in reports {
        assert_eq!(r.pass(), Some(true), "{r:?}");
    }
}

#[test]
fn full_engine_matches_urn_engine_statistically() {
    let plan = plan_regime(
        intermediate(64, 1.0, CRule::Diffusive),
        vec![0.25, 1.0],
        InitialLaw::AllPlus,
        4000,
        13,
        &Thresholds::default(),
    )
    .unwrap();
    let urn = run_monte_carlo(&plan, &RunOptions::default()).unwrap();
    let full = run_monte_carlo(
        &plan,
        &RunOptions {
            engine: Engine::Full,
            ..RunOptions::default()
        },
    )
    .unwrap();
    for j in 0..2 {
        let se = ((urn.variances[j] + full.variances[j]) / 4000.0).sqrt();
        assert!((urn.means[j] - full.means[j]).abs() <= 4.0 * se);
    }
}

#[test]
fn planning_errors_name_the_hypothesis() {
    let err = plan_regime(
        RegimeSpec::Slow { k: 1000, n: 100 },
        vec![1.0],
        InitialLaw::UniformOnVertices,
        10,
        1,
        &Thresholds::default(),
    )
    .unwrap_err();
    match err {
        Error::Planning { hypothesis, .. } => assert_eq!(hypothesis, "n/K → 0"),
        other => panic!("{other:?}"),
    }
}
