use crate::error::{Error, Result};
use crate::walk::ObservablePath;

/// Compensators of the increment process `ΔZ = (X − X(0))/√n` on the step grid `i/n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompensatorPath {
    pub n: u64,
    pub k: u64,
    /// `ΔZ(i/n)` for `i = 0..=L`.
    pub increments: Vec<f64>,
    /// `B_n(i/n)`.
    pub drift: Vec<f64>,
    /// `A_n(i/n)`.
    pub quadratic: Vec<f64>,
    /// `M_n(i/n) = ΔZ(i/n) − B_n(i/n)`.
    pub martingale: Vec<f64>,
}

impl CompensatorPath {
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.drift.len()).map(|i| i as f64 / self.n as f64)
    }

    /// `max_i |B_n(i/n)|`.
    pub fn sup_abs_drift(&self) -> f64 {
        self.drift.iter().fold(0.0, |m, b| m.max(b.abs()))
    }

    /// `max_i |A_n(i/n) − 4 i/n|`.
    pub fn sup_quadratic_gap(&self) -> f64 {
        self.quadratic
            .iter()
            .zip(self.times())
            .fold(0.0, |m, (a, t)| m.max((a - 4.0 * t).abs()))
    }
}

/// `B_n(t) = −(2/K) Σ_{i<⌊nt⌋} X_i/√n` and `A_n(t) = 4⌊nt⌋/n − (4/K²) Σ_{i<⌊nt⌋} (X_i/√n)²`,
/// where `X_i/√n = ΔZ(i/n) + X(0)/√n`.
pub fn compensators(path: &ObservablePath, n: u64, k: u64) -> Result<CompensatorPath> {
    let dense = path
        .dense
        .as_ref()
        .ok_or_else(|| Error::Contract("compensators need a densely recorded path".into()))?;
    if n == 0 || k == 0 {
        return Err(Error::Domain("n and K must be positive".into()));
    }
    if dense.len() as u64 != path.grid.last_index() + 1 {
        return Err(Error::Contract("dense record does not cover every step".into()));
    }
    let root_n = (n as f64).sqrt();
    let kf = k as f64;
    let x0 = dense[0];
    let len = dense.len();
    let mut increments = Vec::with_capacity(len);
    let mut drift = Vec::with_capacity(len);
    let mut quadratic = Vec::with_capacity(len);
    let mut martingale = Vec::with_capacity(len);
    let (mut sum, mut sum_sq) = (0.0f64, 0.0f64);
    for (i, &x) in dense.iter().enumerate() {
        let inc = (x - x0) as f64 / root_n;
        let b = -2.0 / kf * sum;
        let a = 4.0 * i as f64 / n as f64 - 4.0 / (kf * kf) * sum_sq;
        increments.push(inc);
        drift.push(b);
        quadratic.push(a);
        martingale.push(inc - b);
        let z = x as f64 / root_n;
        sum += z;
        sum_sq += z * z;
    }
    Ok(CompensatorPath {
        n,
        k,
        increments,
        drift,
        quadratic,
        martingale,
    })
}
