use crate::error::{Error, Result};

/// First two moments of the number `|O|` of coordinates drawn an odd number
/// of times in `Δ` uniform draws (an Ehrenfest urn started empty).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EhrenfestMoments {
    pub k: u64,
    pub delta: u64,
    /// `E|O|`.
    pub mean: f64,
    /// `Var|O|`.
    pub variance: f64,
    /// `E[|O|/K]`.
    pub mean_fraction: f64,
    /// `Var[|O|/K]`.
    pub variance_fraction: f64,
}

fn pow_int(base: f64, e: u64) -> f64 {
    if e <= i32::MAX as u64 {
        base.powi(e as i32)
    } else {
        base.powf(e as f64)
    }
}

/// `E|O| = (K/2)(1 − (1 − 2/K)^Δ)` and
/// `Var[|O|/K] = (1/4)(1/K + ((K−1)/K)(1 − 4/K)^Δ − (1 − 2/K)^{2Δ})`.
///
/// For `K = 2` the factor `1 − 4/K = −1` is used as is.
pub fn ehrenfest_moments(k: u64, delta: u64) -> Result<EhrenfestMoments> {
    if k < 2 {
        return Err(Error::Domain(format!("Ehrenfest moments need K ≥ 2, got {k}")));
    }
    let kf = k as f64;
    let decay = pow_int(1.0 - 2.0 / kf, delta);
    let mean_fraction = 0.5 * (1.0 - decay);
    let variance_fraction = if delta == 0 {
        0.0
    } else {
        let v = 0.25
            * (1.0 / kf + (kf - 1.0) / kf * pow_int(1.0 - 4.0 / kf, delta)
                - pow_int(1.0 - 2.0 / kf, 2 * delta));
        // Rounding can leave a tiny negative value when the exact variance is 0.
        v.max(0.0)
    };
    Ok(EhrenfestMoments {
        k,
        delta,
        mean: kf * mean_fraction,
        variance: kf * kf * variance_fraction,
        mean_fraction,
        variance_fraction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_draws() {
        for k in [2, 3, 50] {
            let m = ehrenfest_moments(k, 0).unwrap();
            assert_eq!((m.mean, m.variance), (0.0, 0.0));
        }
    }

    #[test]
    fn hand_values() {
        let m = ehrenfest_moments(2, 1).unwrap();
        assert!((m.mean - 1.0).abs() < 1e-15);
        assert!(m.variance_fraction.abs() < 1e-15);
        let m = ehrenfest_moments(4, 2).unwrap();
        assert!((m.mean - 1.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_degenerate_dimension() {
        assert!(matches!(ehrenfest_moments(1, 3), Err(Error::Domain(_))));
        assert!(ehrenfest_moments(0, 3).is_err());
    }

    #[test]
    fn long_run_limits() {
        let m = ehrenfest_moments(100, 100_000).unwrap();
        assert!((m.mean_fraction - 0.5).abs() < 1e-12);
        assert!((m.variance_fraction - 0.25 / 100.0).abs() < 1e-12);
    }
}
