use crate::analytics::{LimitLaw, OuStart};
use crate::error::{Error, Result};
use crate::grid::IntervalGrid;
use crate::stats::Lattice;
use crate::walk::InitialLaw;

/// Finite surrogates of the asymptotic regime hypotheses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    /// Minimum `n/K` for the fast regime.
    pub fast_min: f64,
    /// Maximum `n/K` for the slow regime.
    pub slow_max: f64,
    /// Maximum `√n·E|X(0)|/K` for the slow regime.
    pub drift_max: f64,
    /// Minimum `min_k Δ_k/K` on fast-regime grids.
    pub gap_min: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            fast_min: 100.0,
            slow_max: 0.05,
            drift_max: 0.15,
            gap_min: 50.0,
        }
    }
}

/// Space normalization `c_{n,K}` for the intermediate regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CRule {
    /// `c = √(n/σ²)`, so that `n/c² = σ²`.
    Diffusive,
    /// `c = K`.
    Dimension,
    Explicit(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegimeSpec {
    /// `n/K → λ > 0`; `n` defaults to `round(λK)`.
    Intermediate {
        k: u64,
        lambda: f64,
        sigma2: f64,
        c_rule: CRule,
        n: Option<u64>,
    },
    /// `n/K → ∞`, normalization `√K`.
    Fast { k: u64, n: u64 },
    /// `n/K → 0`, normalization `√n`, observing increments from time 0.
    Slow { k: u64, n: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegimeKind {
    Intermediate,
    Fast,
    Slow,
}

impl RegimeKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegimeKind::Intermediate => "intermediate",
            RegimeKind::Fast => "fast",
            RegimeKind::Slow => "slow",
        }
    }
}

impl RegimeSpec {
    pub fn kind(&self) -> RegimeKind {
        match self {
            RegimeSpec::Intermediate { .. } => RegimeKind::Intermediate,
            RegimeSpec::Fast { .. } => RegimeKind::Fast,
            RegimeSpec::Slow { .. } => RegimeKind::Slow,
        }
    }
}

/// Quantity recorded at each grid time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    /// `X(t)/c`.
    Scaled,
    /// `(X(t) − X(0))/c`.
    Increment,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPlan {
    pub regime: RegimeSpec,
    pub k: u64,
    pub n: u64,
    pub c: f64,
    pub grid: IntervalGrid,
    pub initial_law: InitialLaw,
    pub replications: u64,
    pub seed: u64,
    pub observable: Observable,
}

fn planning(hypothesis: &str, detail: String) -> Error {
    Error::Planning {
        hypothesis: hypothesis.into(),
        detail,
    }
}

/// Resolves a regime into a concrete plan, checking the regime's hypotheses.
pub fn plan_regime(
    spec: RegimeSpec,
    times: Vec<f64>,
    initial_law: InitialLaw,
    replications: u64,
    seed: u64,
    thresholds: &Thresholds,
) -> Result<ExperimentPlan> {
    if replications == 0 {
        return Err(Error::Validation("at least one replication is required".into()));
    }
    let (k, n, c, observable) = match spec {
        RegimeSpec::Intermediate {
            k,
            lambda,
            sigma2,
            c_rule,
            n,
        } => {
            if !(lambda > 0.0) || !lambda.is_finite() {
                return Err(planning("n/K → λ > 0", format!("λ = {lambda} is not positive")));
            }
            if !(sigma2 >= 0.0) || !sigma2.is_finite() {
                return Err(planning("n/c² → σ² ≥ 0", format!("σ² = {sigma2} is negative")));
            }
            let target = lambda * k as f64;
            let n = match n {
                Some(n) if (n as f64 - target).abs() > 1.0 => {
                    return Err(planning(
                        "n/K → λ",
                        format!("n = {n} is not within one unit of λK = {target}"),
                    ))
                }
                Some(n) => n,
                None => target.round() as u64,
            };
            let c = match c_rule {
                CRule::Diffusive if sigma2 > 0.0 => (n as f64 / sigma2).sqrt(),
                CRule::Diffusive => {
                    return Err(planning(
                        "n/c² → σ²",
                        "σ² = 0 needs c growing faster than √n (use c = K or an explicit c)".into(),
                    ))
                }
                CRule::Dimension => k as f64,
                CRule::Explicit(c) => c,
            };
            (k, n, c, Observable::Scaled)
        }
        RegimeSpec::Fast { k, n } => {
            let ratio = n as f64 / k as f64;
            if ratio < thresholds.fast_min {
                return Err(planning(
                    "n/K → ∞",
                    format!("n/K = {ratio} is below fast_min = {}", thresholds.fast_min),
                ));
            }
            if !initial_law.is_uniform() {
                return Err(planning(
                    "uniform initial law",
                    "the fast regime is stated for the uniform law on vertices".into(),
                ));
            }
            (k, n, (k as f64).sqrt(), Observable::Scaled)
        }
        RegimeSpec::Slow { k, n } => {
            let ratio = n as f64 / k as f64;
            if ratio > thresholds.slow_max {
                return Err(planning(
                    "n/K → 0",
                    format!("n/K = {ratio} exceeds slow_max = {}", thresholds.slow_max),
                ));
            }
            (k, n, (n as f64).sqrt(), Observable::Increment)
        }
    };
    if k == 0 || n == 0 {
        return Err(Error::Validation("K and n must be positive".into()));
    }
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::Validation(format!("normalization c = {c} must be positive")));
    }
    initial_law.validate(k)?;
    let grid = IntervalGrid::new(n, times)?;
    match spec {
        RegimeSpec::Fast { .. } => {
            let gap = grid.min_gap_ratio(k);
            if gap < thresholds.gap_min {
                return Err(planning(
                    "(n/K)(t_{j+1} − t_j) → ∞",
                    format!("min Δ_k/K = {gap} is below gap_min = {}", thresholds.gap_min),
                ));
            }
        }
        RegimeSpec::Slow { .. } => {
            let drift = (n as f64).sqrt() * initial_law.mean_abs_magnetization(k)? / k as f64;
            if drift > thresholds.drift_max {
                return Err(planning(
                    "√n·X(0)/K → 0",
                    format!("√n·E|X(0)|/K = {drift} exceeds drift_max = {}", thresholds.drift_max),
                ));
            }
        }
        RegimeSpec::Intermediate { .. } => {}
    }
    Ok(ExperimentPlan {
        regime: spec,
        k,
        n,
        c,
        grid,
        initial_law,
        replications,
        seed,
        observable,
    })
}

impl ExperimentPlan {
    /// Total chain steps of one replication.
    pub fn steps_per_replication(&self) -> u64 {
        self.grid.last_index()
    }

    /// Lattice carrying the recorded values.
    pub fn lattice(&self) -> Lattice {
        let origin = match self.observable {
            Observable::Scaled => (self.k % 2) as f64 / self.c,
            Observable::Increment => 0.0,
        };
        Lattice {
            origin,
            spacing: 2.0 / self.c,
        }
    }

    /// Reference limit of the recorded quantity, when one is defined for this plan.
    pub fn limit_law(&self) -> Option<LimitLaw> {
        let z0 = |plan: &ExperimentPlan| -> Option<f64> {
            let pmf = plan.initial_law.pmf(plan.k).ok()?;
            Some(pmf.mean() / plan.c)
        };
        match self.regime {
            RegimeSpec::Intermediate { lambda, sigma2, .. } if sigma2 > 0.0 => {
                let sigma = sigma2.sqrt();
                match &self.initial_law {
                    InitialLaw::UniformOnVertices => Some(LimitLaw::Ou {
                        lambda,
                        sigma,
                        start: OuStart::Stationary,
                    }),
                    InitialLaw::ExplicitPmf(map) if map.len() > 1 => None,
                    _ => Some(LimitLaw::Ou {
                        lambda,
                        sigma,
                        start: OuStart::PointMass(z0(self)?),
                    }),
                }
            }
            RegimeSpec::Intermediate { lambda, .. } => Some(LimitLaw::DeterministicDecay {
                c: z0(self)?,
                lambda,
            }),
            RegimeSpec::Fast { .. } => Some(LimitLaw::WhiteNoise),
            RegimeSpec::Slow { .. } => Some(LimitLaw::ScaledBm),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform() -> InitialLaw {
        InitialLaw::UniformOnVertices
    }

    #[test]
    fn intermediate_rule() {
        let spec = RegimeSpec::Intermediate {
            k: 4096,
            lambda: 1.0,
            sigma2: 1.0,
            c_rule: CRule::Diffusive,
            n: None,
        };
        let p = plan_regime(spec, vec![0.0, 1.0], uniform(), 10, 1, &Thresholds::default()).unwrap();
        assert_eq!((p.n, p.c), (4096, 64.0));
        let bad = RegimeSpec::Intermediate {
            k: 4096,
            lambda: 1.0,
            sigma2: 1.0,
            c_rule: CRule::Diffusive,
            n: Some(4100),
        };
        assert!(matches!(
            plan_regime(bad, vec![1.0], uniform(), 10, 1, &Thresholds::default()),
            Err(Error::Planning { .. })
        ));
    }

    #[test]
    fn stationary_variance_matches_ou_for_any_sigma() {
        // Var[X(0)/c] = K σ²/n = σ²/λ, the stationary OU variance.
        let spec = RegimeSpec::Intermediate {
            k: 1000,
            lambda: 2.0,
            sigma2: 0.5,
            c_rule: CRule::Diffusive,
            n: None,
        };
        let p = plan_regime(spec, vec![0.0], uniform(), 10, 1, &Thresholds::default()).unwrap();
        let var_z0 = p.k as f64 / (p.c * p.c);
        assert!((var_z0 - p.limit_law().unwrap().variance(0.0)).abs() < 1e-12);
    }

    #[test]
    fn fast_gap_check() {
        let p = plan_regime(
            RegimeSpec::Fast { k: 256, n: 65536 },
            vec![0.3, 0.7],
            uniform(),
            10,
            1,
            &Thresholds::default(),
        )
        .unwrap();
        assert_eq!(p.c, 16.0);
        let err = plan_regime(
            RegimeSpec::Fast { k: 256, n: 65536 },
            vec![0.3, 0.4],
            uniform(),
            10,
            1,
            &Thresholds::default(),
        );
        match err {
            Err(Error::Planning { hypothesis, .. }) => assert!(hypothesis.contains("t_{j+1}")),
            other => panic!("expected planning error, got {other:?}"),
        }
        assert!(plan_regime(
            RegimeSpec::Fast { k: 256, n: 2560 },
            vec![30.0],
            uniform(),
            10,
            1,
            &Thresholds::default()
        )
        .is_err());
    }

    #[test]
    fn slow_drift_surrogate() {
        let p = plan_regime(
            RegimeSpec::Slow { k: 1_000_000, n: 10_000 },
            vec![0.5, 1.0],
            uniform(),
            10,
            1,
            &Thresholds::default(),
        )
        .unwrap();
        let drift = 100.0 * p.initial_law.mean_abs_magnetization(p.k).unwrap() / 1e6;
        let normal_approx = 100.0 * (2.0e6 / std::f64::consts::PI).sqrt() / 1e6;
        assert!((drift - normal_approx).abs() < 1e-5);
        assert!((drift - 0.0798).abs() < 1e-3);
        assert_eq!(p.observable, Observable::Increment);
        let err = plan_regime(
            RegimeSpec::Slow { k: 1_000_000, n: 10_000 },
            vec![1.0],
            InitialLaw::AllPlus,
            10,
            1,
            &Thresholds::default(),
        );
        assert!(matches!(err, Err(Error::Planning { .. })));
    }
}
