use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::pmf::ln_binomial_half;

/// Largest `N` for the exact local-CLT gap.
pub const MAX_LCLT_N: u64 = 1_000_000;

/// `sup_m √N |P(ξ_1 + … + ξ_N = m) − 2/√(2πN) e^{−m²/2N} 1{m ≡ N mod 2}|`.
///
/// Only lattice points `m ≡ N (mod 2)` contribute; the pmf is symmetric, so the
/// sup is taken over `m ≥ 0` and the returned maximizer is nonnegative.
pub fn local_clt_gap(n: u64) -> Result<(f64, i64)> {
    if n == 0 || n > MAX_LCLT_N {
        return Err(Error::Capability(format!(
            "local CLT gap is computed for 1 ≤ N ≤ {MAX_LCLT_N}, got {n}"
        )));
    }
    let nf = n as f64;
    let norm = 2.0 / (2.0 * PI * nf).sqrt();
    let mut best = (f64::NEG_INFINITY, 0i64);
    let mut m = (n % 2) as i64;
    while m <= n as i64 {
        let k = ((m + n as i64) / 2) as u64;
        let exact = ln_binomial_half(n, k).exp();
        let approx = norm * (-(m * m) as f64 / (2.0 * nf)).exp();
        let err = (exact - approx).abs();
        if err > best.0 {
            best = (err, m);
        }
        m += 2;
    }
    Ok((nf.sqrt() * best.0, best.1))
}
