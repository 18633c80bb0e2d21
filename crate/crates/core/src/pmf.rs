//! Probability mass functions over the magnetization lattice `{−K, −K+2, …, K}`.

use statrs::function::factorial::ln_binomial;

use crate::error::{Error, Result};

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// `ln P(Binomial(n, 1/2) = k)`.
pub fn ln_binomial_half(n: u64, k: u64) -> f64 {
    ln_binomial(n, k) - n as f64 * std::f64::consts::LN_2
}

/// `P(ξ_1 + … + ξ_n = m)` for i.i.d. Rademacher signs.
pub fn rademacher_sum_pmf(n: u64, m: i64) -> f64 {
    if m.unsigned_abs() > n || (m + n as i64).rem_euclid(2) != 0 {
        return 0.0;
    }
    let k = ((m + n as i64) / 2) as u64;
    ln_binomial_half(n, k).exp()
}

/// `E|ξ_1 + … + ξ_K|`, via `K·C(K−1, ⌊(K−1)/2⌋) / 2^{K−1}`.
pub fn rademacher_mean_abs(k: u64) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let km1 = k - 1;
    (ln_binomial_half(km1, km1 / 2) + (k as f64).ln()).exp()
}

/// Law of the magnetization `m` of a `K`-dimensional state, stored by
/// plus-count `j = (m + K)/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct UrnPmf {
    k: u64,
    probs: Vec<f64>,
}

impl UrnPmf {
    pub fn from_plus_counts(k: u64, probs: Vec<f64>) -> Result<Self> {
        if probs.len() as u64 != k + 1 {
            return Err(Error::Validation(format!(
                "pmf over K = {k} needs {} entries, got {}",
                k + 1,
                probs.len()
            )));
        }
        Ok(Self { k, probs })
    }

    pub fn point(k: u64, m: i64) -> Result<Self> {
        check_magnetization(k, m)?;
        let mut probs = vec![0.0; k as usize + 1];
        probs[plus_count(k, m) as usize] = 1.0;
        Ok(Self { k, probs })
    }

    /// Law of `2·Binomial(K, 1/2) − K`, the image of the uniform law on vertices.
    pub fn uniform_vertices(k: u64) -> Self {
        let probs = (0..=k).map(|j| ln_binomial_half(k, j).exp()).collect();
        Self { k, probs }
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    /// Probabilities indexed by plus-count.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, m: i64) -> f64 {
        if check_magnetization(self.k, m).is_err() {
            return 0.0;
        }
        self.probs[plus_count(self.k, m) as usize]
    }

    /// `(m, p)` pairs in increasing `m`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        let k = self.k as i64;
        self.probs
            .iter()
            .enumerate()
            .map(move |(j, &p)| (2 * j as i64 - k, p))
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().copied().collect::<CompensatedSum>().value()
    }

    pub fn mean(&self) -> f64 {
        self.iter().map(|(m, p)| m as f64 * p).collect::<CompensatedSum>().value()
    }

    pub fn total_variation(&self, other: &UrnPmf) -> f64 {
        assert_eq!(self.k, other.k, "pmfs over different dimensions");
        0.5 * self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .collect::<CompensatedSum>()
            .value()
    }
}

/// Checks `|m| ≤ K` and `m ≡ K (mod 2)`.
pub fn check_magnetization(k: u64, m: i64) -> Result<()> {
    if m.unsigned_abs() > k || (m + k as i64).rem_euclid(2) != 0 {
        return Err(Error::Validation(format!(
            "magnetization {m} is not admissible for K = {k}"
        )));
    }
    Ok(())
}

pub(crate) fn plus_count(k: u64, m: i64) -> u64 {
    ((m + k as i64) / 2) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_pmf_small() {
        let p = UrnPmf::uniform_vertices(2);
        let expected = [0.25, 0.5, 0.25];
        for (a, b) in p.probs().iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(p.prob(1), 0.0);
        assert_eq!(p.prob(-4), 0.0);
    }

    #[test]
    fn mean_abs_matches_direct_sum() {
        for k in [1u64, 2, 3, 4, 7, 10, 101, 10_000] {
            let direct: CompensatedSum = UrnPmf::uniform_vertices(k)
                .iter()
                .map(|(m, p)| m.unsigned_abs() as f64 * p)
                .collect();
            let closed = rademacher_mean_abs(k);
            assert!(
                (direct.value() - closed).abs() < 1e-9 * closed.max(1.0),
                "K={k}: {} vs {closed}",
                direct.value()
            );
        }
    }

    #[test]
    fn compensated_sum_beats_naive() {
        let mut s = CompensatedSum::default();
        s.add(1.0);
        for _ in 0..10 {
            s.add(1e-16);
        }
        assert!((s.value() - (1.0 + 1e-15)).abs() < 1e-17);
    }
}
