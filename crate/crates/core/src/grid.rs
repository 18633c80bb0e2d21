use crate::error::{Error, Result};

/// Observation times `t_1 < ... < t_s` together with the step indices `⌊n t_j⌋`.
///
/// `t_0 = 0` is implicit; interval `k` covers the steps `(⌊n t_{k-1}⌋, ⌊n t_k⌋]`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalGrid {
    n: u64,
    times: Vec<f64>,
    indices: Vec<u64>,
}

impl IntervalGrid {
    pub fn new(n: u64, times: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Validation("time scale n must be positive".into()));
        }
        if times.is_empty() {
            return Err(Error::Validation("grid needs at least one time".into()));
        }
        for (j, &t) in times.iter().enumerate() {
            if !t.is_finite() || t < 0.0 {
                return Err(Error::Validation(format!("grid time {t} is not a nonnegative real")));
            }
            if j > 0 && t <= times[j - 1] {
                return Err(Error::Validation("grid times must be strictly increasing".into()));
            }
        }
        let indices = times
            .iter()
            .map(|&t| floor_index(n, t))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { n, times, indices })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Step indices `⌊n t_j⌋`.
    pub fn indices(&self) -> &[u64] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_index(&self) -> u64 {
        *self.indices.last().expect("grid is nonempty")
    }

    /// Per-interval step counts `Δ_k = ⌊n t_k⌋ − ⌊n t_{k−1}⌋`.
    pub fn deltas(&self) -> Vec<u64> {
        let mut prev = 0;
        self.indices
            .iter()
            .map(|&i| {
                let d = i - prev;
                prev = i;
                d
            })
            .collect()
    }

    /// `min_k Δ_k / K`, the finite-size stand-in for the gap condition of the fast regime.
    pub fn min_gap_ratio(&self, k: u64) -> f64 {
        self.deltas().into_iter().min().unwrap_or(0) as f64 / k as f64
    }
}

/// `⌊n t⌋`, refusing values that do not fit a step counter.
pub fn floor_index(n: u64, t: f64) -> Result<u64> {
    let x = (n as f64 * t).floor();
    if !x.is_finite() || x >= 9.0e18 {
        return Err(Error::Overflow(format!("n·t = {n}·{t} exceeds the step index range")));
    }
    Ok(x as u64)
}
