use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OuStart {
    /// `N(0, σ²/λ)`, which makes the process stationary.
    Stationary,
    PointMass(f64),
}

/// Reference limits of the rescaled observable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LimitLaw {
    /// `dO = −2λ O dt + 2σ dW`.
    Ou { lambda: f64, sigma: f64, start: OuStart },
    /// `2 W_t` with `W` a standard Brownian motion from 0.
    ScaledBm,
    /// i.i.d. `N(0, 1)` at distinct times.
    WhiteNoise,
    /// `t ↦ C e^{−2λt}`.
    DeterministicDecay { c: f64, lambda: f64 },
}

impl LimitLaw {
    pub fn validate(&self) -> Result<()> {
        match *self {
            LimitLaw::Ou { lambda, sigma, start } => {
                if !(lambda > 0.0) || !(sigma >= 0.0) {
                    return Err(Error::Domain(format!(
                        "OU limit needs λ > 0 and σ ≥ 0, got λ = {lambda}, σ = {sigma}"
                    )));
                }
                if let OuStart::PointMass(x) = start {
                    if !x.is_finite() {
                        return Err(Error::Domain("OU start must be finite".into()));
                    }
                }
                Ok(())
            }
            LimitLaw::DeterministicDecay { c, lambda } if !c.is_finite() || !(lambda >= 0.0) => {
                Err(Error::Domain("decay needs finite C and λ ≥ 0".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            LimitLaw::Ou { start: OuStart::Stationary, .. } => "stationary Ornstein-Uhlenbeck",
            LimitLaw::Ou { .. } => "Ornstein-Uhlenbeck",
            LimitLaw::ScaledBm => "2W (scaled Brownian motion)",
            LimitLaw::WhiteNoise => "Gaussian white noise",
            LimitLaw::DeterministicDecay { .. } => "deterministic decay",
        }
    }

    pub fn mean(&self, t: f64) -> f64 {
        match *self {
            LimitLaw::Ou { lambda, start: OuStart::PointMass(x0), .. } => {
                x0 * (-2.0 * lambda * t).exp()
            }
            LimitLaw::DeterministicDecay { c, lambda } => c * (-2.0 * lambda * t).exp(),
            _ => 0.0,
        }
    }

    pub fn cov(&self, s: f64, t: f64) -> f64 {
        match *self {
            LimitLaw::Ou { lambda, sigma, start } => {
                let stat = sigma * sigma / lambda * (-2.0 * lambda * (t - s).abs()).exp();
                match start {
                    OuStart::Stationary => stat,
                    OuStart::PointMass(_) => {
                        stat - sigma * sigma / lambda * (-2.0 * lambda * (t + s)).exp()
                    }
                }
            }
            LimitLaw::ScaledBm => 4.0 * s.min(t),
            LimitLaw::WhiteNoise => {
                if s == t {
                    1.0
                } else {
                    0.0
                }
            }
            LimitLaw::DeterministicDecay { .. } => 0.0,
        }
    }

    pub fn variance(&self, t: f64) -> f64 {
        self.cov(t, t)
    }
}

/// Covariance matrix of the limit on a strictly increasing grid.
pub fn limit_covariance(law: &LimitLaw, grid: &[f64]) -> Result<DMatrix<f64>> {
    law.validate()?;
    if grid.windows(2).any(|w| !(w[0] < w[1])) || grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::Validation("grid must be strictly increasing".into()));
    }
    Ok(DMatrix::from_fn(grid.len(), grid.len(), |i, j| {
        law.cov(grid[i], grid[j])
    }))
}

/// Exact conditional `(mean, variance)` of `O(t + dt)` given `O(t) = x0`.
pub fn ou_exact_transition(x0: f64, lambda: f64, sigma: f64, dt: f64) -> Result<(f64, f64)> {
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!(
            "OU transition needs λ > 0, got {lambda} (use the scaled Brownian limit for λ = 0)"
        )));
    }
    if !(sigma >= 0.0) || !(dt > 0.0) {
        return Err(Error::Domain(format!("need σ ≥ 0 and dt > 0, got σ = {sigma}, dt = {dt}")));
    }
    let mean = x0 * (-2.0 * lambda * dt).exp();
    let variance = sigma * sigma / lambda * -(-4.0 * lambda * dt).exp_m1();
    Ok((mean, variance))
}

/// Draws `O(t + dt)` from the exact Gaussian transition.
pub fn sample_ou_transition<R: Rng + ?Sized>(
    x0: f64,
    lambda: f64,
    sigma: f64,
    dt: f64,
    rng: &mut R,
) -> Result<f64> {
    let (mean, variance) = ou_exact_transition(x0, lambda, sigma, dt)?;
    let z: f64 = rng.sample(StandardNormal);
    Ok(mean + variance.sqrt() * z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    #[test]
    fn zero_noise_is_pure_decay() {
        let (m, v) = ou_exact_transition(2.0, 0.7, 0.0, 1.3).unwrap();
        assert_eq!(v, 0.0);
        assert!((m - 2.0 * (-2.0 * 0.7 * 1.3f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn long_horizon_reaches_stationary_variance() {
        let (m, v) = ou_exact_transition(1.0, 1.0, 1.0, 50.0).unwrap();
        assert!(m.abs() < 1e-40);
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn half_unit_step() {
        let (m, v) = ou_exact_transition(1.0, 1.0, 1.0, 0.5).unwrap();
        assert!((m - 0.36787944117144233).abs() < 1e-12);
        assert!((v - 0.8646647167633873).abs() < 1e-12);
    }

    /// Euler–Maruyama with a fine step as an independent route to the transition moments.
    #[test]
    fn euler_maruyama_cross_check() {
        let (lambda, sigma, x0, horizon, h) = (1.0f64, 1.0f64, 1.0f64, 0.5f64, 1e-5f64);
        let steps = (horizon / h).round() as usize;
        // Mean and variance propagate deterministically under the Euler recursion.
        let (mut mean, mut var) = (x0, 0.0);
        for _ in 0..steps {
            mean *= 1.0 - 2.0 * lambda * h;
            var = var * (1.0 - 2.0 * lambda * h).powi(2) + 4.0 * sigma * sigma * h;
        }
        let (m, v) = ou_exact_transition(x0, lambda, sigma, horizon).unwrap();
        assert!((mean - m).abs() < 1e-3);
        assert!((var - v).abs() < 1e-3);
        // And a Monte Carlo Euler run lands near the same values.
        let mut rng = RngStream::new(21, 0);
        let reps = 2000;
        let coarse = 1e-3;
        let n = (horizon / coarse).round() as usize;
        let mut samples = Vec::with_capacity(reps);
        for _ in 0..reps {
            let mut x = x0;
            for _ in 0..n {
                let z: f64 = rng.sample(StandardNormal);
                x += -2.0 * lambda * x * coarse + 2.0 * sigma * coarse.sqrt() * z;
            }
            samples.push(x);
        }
        let emp_mean = samples.iter().sum::<f64>() / reps as f64;
        assert!((emp_mean - m).abs() < 4.0 * (v / reps as f64).sqrt());
    }

    #[test]
    fn rejects_nonpositive_lambda() {
        assert!(matches!(ou_exact_transition(0.0, 0.0, 1.0, 1.0), Err(Error::Domain(_))));
        assert!(ou_exact_transition(0.0, 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn covariance_examples() {
        let c = limit_covariance(&LimitLaw::WhiteNoise, &[0.1, 0.4, 3.0]).unwrap();
        assert_eq!(c, DMatrix::identity(3, 3));
        let c = limit_covariance(&LimitLaw::ScaledBm, &[1.0, 2.0]).unwrap();
        assert_eq!(c, DMatrix::from_row_slice(2, 2, &[4.0, 4.0, 4.0, 8.0]));
        let ou = LimitLaw::Ou { lambda: 1.0, sigma: 1.0, start: OuStart::Stationary };
        let c = limit_covariance(&ou, &[0.0, 1.0]).unwrap();
        let e = (-2.0f64).exp();
        assert!((c[(0, 1)] - e).abs() < 1e-15 && (c[(0, 0)] - 1.0).abs() < 1e-15);
        let decay = LimitLaw::DeterministicDecay { c: 0.8, lambda: 1.0 };
        assert_eq!(limit_covariance(&decay, &[0.0, 1.0]).unwrap(), DMatrix::zeros(2, 2));
        assert!(limit_covariance(&LimitLaw::ScaledBm, &[1.0, 1.0]).is_err());
    }

    #[test]
    fn point_mass_ou_matches_transition() {
        let law = LimitLaw::Ou { lambda: 0.7, sigma: 1.2, start: OuStart::PointMass(0.3) };
        let (m, v) = ou_exact_transition(0.3, 0.7, 1.2, 0.9).unwrap();
        assert!((law.mean(0.9) - m).abs() < 1e-14);
        assert!((law.variance(0.9) - v).abs() < 1e-14);
        assert_eq!(law.variance(0.0), 0.0);
    }
}
