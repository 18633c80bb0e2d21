//! Goodness-of-fit statistics used by the harness.

use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

pub fn normal_cdf(x: f64, mean: f64, sd: f64) -> f64 {
    if sd == 0.0 {
        return if x < mean { 0.0 } else { 1.0 };
    }
    0.5 * erfc(-(x - mean) / (sd * std::f64::consts::SQRT_2))
}

/// `P(K > λ)` for the limiting Kolmogorov distribution.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.0 {
        // Small-λ form: P(K ≤ λ) = √(2π)/λ Σ_{k≥1} exp(−(2k−1)²π²/(8λ²)).
        let c = -std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda);
        let cdf: f64 = (1..=20)
            .map(|k| {
                let odd = (2 * k - 1) as f64;
                (odd * odd * c).exp()
            })
            .sum::<f64>()
            * (2.0 * std::f64::consts::PI).sqrt()
            / lambda;
        return (1.0 - cdf).clamp(0.0, 1.0);
    }
    let sum: f64 = (1..=100)
        .map(|k| {
            let kf = k as f64;
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            sign * (-2.0 * kf * kf * lambda * lambda).exp()
        })
        .sum();
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Equally spaced support `origin + spacing·ℤ` of a discrete sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    pub origin: f64,
    pub spacing: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsOutcome {
    pub statistic: f64,
    pub p_value: f64,
    pub samples: usize,
}

/// One-sample Kolmogorov–Smirnov test against a continuous CDF.
///
/// With a `lattice`, the sample is treated as discretized on that lattice and
/// the empirical CDF is compared with `cdf` only at cell midpoints (continuity
/// correction); otherwise the usual sup over the whole line is taken.
pub fn ks_test<F: Fn(f64) -> f64>(samples: &[f64], cdf: F, lattice: Option<Lattice>) -> KsOutcome {
    let n = samples.len();
    assert!(n > 0, "KS test needs samples");
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.total_cmp(b));
    let nf = n as f64;
    let mut d = 0.0f64;
    let mut i = 0;
    while i < n {
        let v = xs[i];
        let mut j = i;
        while j < n && xs[j] == v {
            j += 1;
        }
        let (below, upto) = (i as f64 / nf, j as f64 / nf);
        match lattice {
            Some(l) => {
                let half = 0.5 * l.spacing;
                let snapped = l.origin + ((v - l.origin) / l.spacing).round() * l.spacing;
                d = d.max((below - cdf(snapped - half)).abs());
                d = d.max((upto - cdf(snapped + half)).abs());
            }
            None => {
                let f = cdf(v);
                d = d.max((f - below).abs()).max((upto - f).abs());
            }
        }
        i = j;
    }
    KsOutcome {
        statistic: d,
        p_value: kolmogorov_sf(nf.sqrt() * d),
        samples: n,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquareOutcome {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
}

/// Pearson goodness-of-fit of `observed` counts against `expected` probabilities.
///
/// Adjacent cells are pooled left to right until each pooled cell expects at
/// least `min_expected` observations; a short tail is merged into the last cell.
pub fn chi_square_gof(observed: &[u64], expected: &[f64], min_expected: f64) -> Result<ChiSquareOutcome> {
    if observed.len() != expected.len() || observed.is_empty() {
        return Err(Error::Validation("observed and expected cells differ".into()));
    }
    let total: u64 = observed.iter().sum();
    if total == 0 {
        return Err(Error::Capability("chi-square test needs observations".into()));
    }
    let nf = total as f64;
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut o, mut e) = (0.0, 0.0);
    for (&obs, &p) in observed.iter().zip(expected) {
        o += obs as f64;
        e += p * nf;
        if e >= min_expected {
            cells.push((o, e));
            o = 0.0;
            e = 0.0;
        }
    }
    if e > 0.0 || o > 0.0 {
        match cells.last_mut() {
            Some(last) => {
                last.0 += o;
                last.1 += e;
            }
            None => cells.push((o, e)),
        }
    }
    if cells.len() < 2 {
        return Err(Error::Capability("too few cells for a chi-square test".into()));
    }
    let statistic: f64 = cells
        .iter()
        .map(|&(o, e)| if e > 0.0 { (o - e).powi(2) / e } else if o > 0.0 { f64::INFINITY } else { 0.0 })
        .sum();
    let dof = cells.len() - 1;
    let dist = ChiSquared::new(dof as f64).expect("positive degrees of freedom");
    Ok(ChiSquareOutcome {
        statistic,
        degrees_of_freedom: dof,
        p_value: if statistic.is_finite() { dist.sf(statistic) } else { 0.0 },
    })
}
