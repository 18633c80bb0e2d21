use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::pmf::UrnPmf;

/// Largest `K` accepted by the matrix-powering oracle.
pub const MAX_EXACT_DIMENSION: u64 = 14;

/// One-step kernel and local drift/diffusion of `Z = f_K / c` at a state `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalCharacteristics {
    pub x: f64,
    pub n: u64,
    pub k: u64,
    pub c: f64,
    /// Probability of moving to `x − 2/c`.
    pub p_down: f64,
    /// Probability of moving to `x + 2/c`.
    pub p_up: f64,
    /// `b_n(x) = −2 x n / K`.
    pub drift: f64,
    /// `a_n(x) = 4 n / c²`.
    pub diffusion: f64,
}

pub fn local_characteristics(x: f64, n: u64, k: u64, c: f64) -> Result<LocalCharacteristics> {
    if k == 0 || n == 0 {
        return Err(Error::Domain("n and K must be positive".into()));
    }
    if !(c > 0.0) || !c.is_finite() || !x.is_finite() {
        return Err(Error::Domain(format!("invalid state x = {x} or normalization c = {c}")));
    }
    let kf = k as f64;
    if (x * c).abs() > kf * (1.0 + 1e-12) {
        return Err(Error::Domain(format!(
            "|x·c| = {} exceeds K = {k}: kernel probabilities leave [0, 1]",
            (x * c).abs()
        )));
    }
    let p_down = 0.5 + x * c / (2.0 * kf);
    Ok(LocalCharacteristics {
        x,
        n,
        k,
        c,
        p_down,
        p_up: 1.0 - p_down,
        drift: -2.0 * x * n as f64 / kf,
        diffusion: 4.0 * n as f64 / (c * c),
    })
}

/// `P_n(x, ·)` as `[(x − 2/c, p_down), (x + 2/c, p_up)]`, for `x` on the state lattice.
pub fn transition_kernel(x: f64, k: u64, c: f64) -> Result<[(f64, f64); 2]> {
    let lc = local_characteristics(x, 1, k, c)?;
    let m = x * c;
    let nearest = m.round();
    let on_lattice = (m - nearest).abs() <= 1e-9
        && (nearest as i64 + k as i64).rem_euclid(2) == 0;
    if !on_lattice {
        return Err(Error::Domain(format!(
            "x = {x} is not in the state space (x·c = {m} must be ≡ K mod 2)"
        )));
    }
    Ok([(x - 2.0 / c, lc.p_down), (x + 2.0 / c, lc.p_up)])
}

/// Transition matrix of the magnetization chain, indexed by plus-count.
pub fn urn_transition_matrix(k: u64) -> DMatrix<f64> {
    let size = k as usize + 1;
    let kf = k as f64;
    DMatrix::from_fn(size, size, |from, to| {
        let j = from as f64;
        if to + 1 == from {
            j / kf
        } else if to == from + 1 {
            (kf - j) / kf
        } else {
            0.0
        }
    })
}

fn matrix_power(base: &DMatrix<f64>, mut e: u64) -> DMatrix<f64> {
    let mut result = DMatrix::identity(base.nrows(), base.ncols());
    let mut square = base.clone();
    while e > 0 {
        if e & 1 == 1 {
            result = &result * &square;
        }
        e >>= 1;
        if e > 0 {
            square = &square * &square;
        }
    }
    result
}

/// Exact law of the magnetization after `steps` transitions from `initial`.
pub fn exact_chain_distribution(k: u64, steps: u64, initial: &UrnPmf) -> Result<UrnPmf> {
    if k == 0 || k > MAX_EXACT_DIMENSION {
        return Err(Error::Capability(format!(
            "exact chain oracle supports 1 ≤ K ≤ {MAX_EXACT_DIMENSION}, got {k}"
        )));
    }
    if initial.k() != k {
        return Err(Error::Validation("initial pmf has a different dimension".into()));
    }
    let power = matrix_power(&urn_transition_matrix(k), steps);
    let row = DVector::from_column_slice(initial.probs());
    let out = power.transpose() * row;
    UrnPmf::from_plus_counts(k, out.iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn characteristics_examples() {
        let lc = local_characteristics(0.0, 10, 10, 3.0).unwrap();
        assert_eq!((lc.drift, lc.p_down, lc.p_up), (0.0, 0.5, 0.5));
        let c = 2000f64.sqrt();
        let lc = local_characteristics(1.0, 2000, 1000, c).unwrap();
        assert!((lc.drift + 4.0).abs() < 1e-12);
        assert!((lc.diffusion - 4.0).abs() < 1e-12);
        let lc = local_characteristics(10.0 / 2.0, 7, 10, 2.0).unwrap();
        assert_eq!(lc.p_up, 0.0);
        assert!(matches!(
            local_characteristics(6.0, 7, 10, 2.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn kernel_requires_lattice_state() {
        let k = transition_kernel(1.0, 4, 2.0).unwrap();
        assert_eq!(k[0], (0.0, 0.75));
        assert_eq!(k[1], (2.0, 0.25));
        assert!(transition_kernel(0.5, 4, 2.0).is_err());
    }

    #[test]
    fn chain_identity_and_forced_move() {
        let init = UrnPmf::uniform_vertices(6);
        assert_eq!(exact_chain_distribution(6, 0, &init).unwrap(), init);
        let p = exact_chain_distribution(2, 1, &UrnPmf::point(2, 2).unwrap()).unwrap();
        assert_eq!(p.prob(0), 1.0);
    }

    #[test]
    fn uniform_law_is_stationary() {
        let init = UrnPmf::uniform_vertices(4);
        let p = exact_chain_distribution(4, 7, &init).unwrap();
        assert!(p.total_variation(&init) < 1e-15);
    }

    #[test]
    fn dimension_cap() {
        let init = UrnPmf::uniform_vertices(15);
        assert!(matches!(
            exact_chain_distribution(15, 3, &init),
            Err(Error::Capability(_))
        ));
    }
}
