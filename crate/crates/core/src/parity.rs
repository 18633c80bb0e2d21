//! Draw-parity bookkeeping behind the fast-regime representation.
//!
//! Each step of the walk flips the coordinate `U_l`. After the draws of
//! interval `k` only the parity of the number of times coordinate `i` was
//! drawn matters, and grouping coordinates by their parity signature
//! `J ⊆ [s]` gives the sets `B(J)`. Given those sizes and fresh Rademacher
//! signs, the observable at the grid times is a fixed signed combination of
//! block sums.

use rand::Rng;

use crate::error::{Error, Result};
use crate::grid::IntervalGrid;
use crate::rng::rademacher_sum;

/// Largest number of intervals tracked (the signature table has `2^s` cells).
pub const MAX_INTERVALS: usize = 20;

/// Per-coordinate, per-interval draw parities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityLedger {
    k: u64,
    deltas: Vec<u64>,
    /// `rows[k]` holds the parity bits of interval `k + 1`, one bit per coordinate.
    rows: Vec<Vec<u64>>,
}

impl ParityLedger {
    /// Ledger of an explicit draw sequence; `draws` must yield `Σ Δ_k` coordinate indices.
    pub fn from_draws<I>(k: u64, deltas: &[u64], draws: I) -> Result<Self>
    where
        I: IntoIterator<Item = u64>,
    {
        if k == 0 {
            return Err(Error::Validation("dimension must be positive".into()));
        }
        if deltas.is_empty() || deltas.len() > MAX_INTERVALS {
            return Err(Error::Capability(format!(
                "parity ledger supports 1..={MAX_INTERVALS} intervals, got {}",
                deltas.len()
            )));
        }
        let words = k.div_ceil(64) as usize;
        let mut rows = vec![vec![0u64; words]; deltas.len()];
        let mut draws = draws.into_iter();
        for (row, &delta) in rows.iter_mut().zip(deltas) {
            for _ in 0..delta {
                let i = draws
                    .next()
                    .ok_or_else(|| Error::Validation("draw sequence too short".into()))?;
                if i >= k {
                    return Err(Error::Validation(format!("draw {i} outside [0, {k})")));
                }
                row[(i / 64) as usize] ^= 1 << (i % 64);
            }
        }
        Ok(Self {
            k,
            deltas: deltas.to_vec(),
            rows,
        })
    }

    pub fn dimension(&self) -> u64 {
        self.k
    }

    pub fn intervals(&self) -> usize {
        self.rows.len()
    }

    pub fn deltas(&self) -> &[u64] {
        &self.deltas
    }

    /// `p_{i,k}`: whether coordinate `i` was drawn an odd number of times in interval `k` (1-based).
    pub fn parity(&self, coord: u64, interval: usize) -> bool {
        assert!(coord < self.k && (1..=self.rows.len()).contains(&interval));
        self.rows[interval - 1][(coord / 64) as usize] >> (coord % 64) & 1 == 1
    }

    /// `|O|` for interval `k`: coordinates with odd parity on it.
    pub fn odd_in_interval(&self, interval: usize) -> u64 {
        self.rows[interval - 1]
            .iter()
            .map(|w| u64::from(w.count_ones()))
            .sum()
    }

    /// `|O_0^{⌊n t_j⌋}|` recounted from the bits: odd total parity over intervals `1..=j`.
    pub fn odd_through(&self, j: usize) -> u64 {
        assert!((1..=self.rows.len()).contains(&j));
        (0..self.rows[0].len())
            .map(|w| {
                let acc = self.rows[..j].iter().fold(0u64, |acc, row| acc ^ row[w]);
                u64::from(acc.count_ones())
            })
            .sum()
    }
}

/// Parities of `⌊n t_s⌋` fresh uniform draws on the grid's intervals.
pub fn accumulate_parities<R: Rng + ?Sized>(
    k: u64,
    grid: &IntervalGrid,
    rng: &mut R,
) -> Result<ParityLedger> {
    let total = grid.last_index();
    let draws = (0..total).map(|_| rng.random_range(0..k.max(1)));
    ParityLedger::from_draws(k, &grid.deltas(), draws)
}

/// Sizes `|B(J)|` indexed by the bitmask of `J` (bit `k − 1` ↔ interval `k`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignatureCounts {
    s: usize,
    counts: Vec<u64>,
}

impl SignatureCounts {
    pub fn new(s: usize, counts: Vec<u64>) -> Result<Self> {
        if s == 0 || s > MAX_INTERVALS || counts.len() != 1 << s {
            return Err(Error::Validation(format!(
                "signature table for s = {s} needs 2^s entries, got {}",
                counts.len()
            )));
        }
        Ok(Self { s, counts })
    }

    pub fn intervals(&self) -> usize {
        self.s
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn get(&self, mask: usize) -> u64 {
        self.counts[mask]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `Σ_{J : |J ∩ [j]| odd} |B(J)|`, which equals `|O_0^{⌊n t_j⌋}|`.
    pub fn odd_set_union(&self, j: usize) -> Result<u64> {
        if !(1..=self.s).contains(&j) {
            return Err(Error::Domain(format!("interval index {j} outside 1..={}", self.s)));
        }
        let prefix = (1usize << j) - 1;
        Ok(self
            .counts
            .iter()
            .enumerate()
            .filter(|(mask, _)| (mask & prefix).count_ones() % 2 == 1)
            .map(|(_, &c)| c)
            .sum())
    }

    /// Applies the signed combination `(Σ_J (−1)^{|J∩[j]|} S_J)_j` to block sums `S_J`.
    pub fn combine_block_sums(&self, block_sums: &[i64]) -> Vec<i64> {
        assert_eq!(block_sums.len(), self.counts.len());
        (1..=self.s)
            .map(|j| {
                let prefix = (1usize << j) - 1;
                block_sums
                    .iter()
                    .enumerate()
                    .map(|(mask, &sum)| {
                        if (mask & prefix).count_ones() % 2 == 1 {
                            -sum
                        } else {
                            sum
                        }
                    })
                    .sum()
            })
            .collect()
    }
}

pub fn signature_counts(ledger: &ParityLedger) -> SignatureCounts {
    let s = ledger.intervals();
    let mut counts = vec![0u64; 1 << s];
    for w in 0..ledger.rows[0].len() {
        let width = if (w as u64 + 1) * 64 <= ledger.k {
            64
        } else {
            ledger.k % 64
        };
        for b in 0..width {
            let mut mask = 0usize;
            for (k, row) in ledger.rows.iter().enumerate() {
                mask |= ((row[w] >> b & 1) as usize) << k;
            }
            counts[mask] += 1;
        }
    }
    SignatureCounts { s, counts }
}

/// Samples the observable at the grid times from the partition sizes and
/// fresh block sums `S_J` of `|B(J)|` Rademacher signs.
pub fn reconstruct_fdl<R: Rng + ?Sized>(counts: &SignatureCounts, rng: &mut R) -> Vec<f64> {
    let sums: Vec<i64> = counts
        .counts
        .iter()
        .map(|&c| rademacher_sum(c, rng))
        .collect();
    counts
        .combine_block_sums(&sums)
        .into_iter()
        .map(|v| v as f64)
        .collect()
}

/// `T_K(s) = (K^{−1/2} Σ_{i ≤ ⌊K s_j⌋} ξ_i)_j` for one Rademacher sequence.
pub fn partial_sums_at_random_times<R: Rng + ?Sized>(
    k: u64,
    times: &[f64],
    rng: &mut R,
) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(Error::Validation("dimension must be positive".into()));
    }
    let mut lengths = Vec::with_capacity(times.len());
    for &t in times {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::Domain(format!("time {t} is not a nonnegative real")));
        }
        lengths.push(crate::grid::floor_index(k, t)?);
    }
    let mut order: Vec<usize> = (0..times.len()).collect();
    order.sort_by_key(|&j| lengths[j]);
    let scale = (k as f64).sqrt();
    let mut out = vec![0.0; times.len()];
    let (mut done, mut sum) = (0u64, 0i64);
    for j in order {
        sum += rademacher_sum(lengths[j] - done, rng);
        done = lengths[j];
        out[j] = sum as f64 / scale;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn no_draws_no_parities() {
        let mut rng = RngStream::new(1, 0);
        let grid = IntervalGrid::new(10, vec![0.05]).unwrap();
        let ledger = accumulate_parities(7, &grid, &mut rng).unwrap();
        assert_eq!(ledger.odd_in_interval(1), 0);
        let counts = signature_counts(&ledger);
        assert_eq!(counts.counts(), &[7, 0]);
    }

    #[test]
    fn single_coordinate_three_draws() {
        let mut rng = RngStream::new(1, 0);
        let grid = IntervalGrid::new(3, vec![1.0]).unwrap();
        let ledger = accumulate_parities(1, &grid, &mut rng).unwrap();
        assert!(ledger.parity(0, 1));
    }

    #[test]
    fn k2_two_draws_parity_law() {
        let grid = IntervalGrid::new(2, vec![1.0]).unwrap();
        let mut rng = RngStream::new(8, 0);
        let reps = 40_000;
        let mut both_odd = 0;
        for _ in 0..reps {
            let l = accumulate_parities(2, &grid, &mut rng).unwrap();
            match (l.parity(0, 1), l.parity(1, 1)) {
                (true, true) => both_odd += 1,
                (false, false) => {}
                other => panic!("impossible parity pattern {other:?}"),
            }
        }
        let p = both_odd as f64 / reps as f64;
        assert!((p - 0.5).abs() < 0.01, "{p}");
    }

    #[test]
    fn bucketing_example() {
        // p = ((1,0),(1,1),(0,0)) for coordinates 0,1,2 over intervals 1,2.
        let ledger = ParityLedger::from_draws(3, &[2, 1], [0, 1, 1]).unwrap();
        let c = signature_counts(&ledger);
        assert_eq!(c.counts(), &[1, 1, 0, 1]);
        assert_eq!(c.odd_set_union(1).unwrap(), 2);
        assert_eq!(c.odd_set_union(2).unwrap(), c.get(0b01) + c.get(0b10));
        assert!(c.odd_set_union(3).is_err());
    }

    #[test]
    fn reconstruct_trivial_partitions() {
        let mut rng = RngStream::new(2, 0);
        let all_even = SignatureCounts::new(1, vec![9, 0]).unwrap();
        let all_odd = SignatureCounts::new(1, vec![0, 9]).unwrap();
        for _ in 0..100 {
            let a = reconstruct_fdl(&all_even, &mut rng)[0];
            let b = reconstruct_fdl(&all_odd, &mut rng)[0];
            assert!(a.abs() <= 9.0 && (a as i64).rem_euclid(2) == 1);
            assert!(b.abs() <= 9.0 && (b as i64).rem_euclid(2) == 1);
        }
        assert_eq!(all_odd.combine_block_sums(&[0, 5]), vec![-5]);
    }

    #[test]
    fn partial_sums_examples() {
        let mut rng = RngStream::new(3, 0);
        assert_eq!(partial_sums_at_random_times(10, &[0.0], &mut rng).unwrap(), vec![0.0]);
        let v = partial_sums_at_random_times(10, &[0.7, 0.7], &mut rng).unwrap();
        assert_eq!(v[0], v[1]);
        let mut freq = [0usize; 3];
        for _ in 0..40_000 {
            let v = partial_sums_at_random_times(4, &[0.5], &mut rng).unwrap()[0];
            freq[(v + 1.0) as usize] += 1;
        }
        for (f, p) in freq.iter().zip([0.25, 0.5, 0.25]) {
            assert!((*f as f64 / 40_000.0 - p).abs() < 0.01);
        }
        assert!(partial_sums_at_random_times(4, &[-1.0], &mut rng).is_err());
    }

    #[test]
    fn partial_sums_are_prefixes() {
        let mut rng = RngStream::new(4, 0);
        let v = partial_sums_at_random_times(100, &[0.9, 0.1, 0.5], &mut rng).unwrap();
        for (x, len) in v.iter().zip([90.0, 10.0, 50.0]) {
            assert!(x.abs() * 10.0 <= len);
        }
    }

    proptest! {
        #[test]
        fn partition_and_union_identity(
            k in 1u64..200,
            deltas in proptest::collection::vec(0u64..300, 1..5),
            seed in any::<u64>(),
        ) {
            let mut rng = RngStream::new(seed, 0);
            let total: u64 = deltas.iter().sum();
            let draws: Vec<u64> = (0..total).map(|_| rng.random_range(0..k)).collect();
            let ledger = ParityLedger::from_draws(k, &deltas, draws).unwrap();
            for (j, &d) in deltas.iter().enumerate() {
                prop_assert_eq!(ledger.odd_in_interval(j + 1) % 2, d % 2);
            }
            let counts = signature_counts(&ledger);
            prop_assert_eq!(counts.total(), k);
            for j in 1..=deltas.len() {
                prop_assert_eq!(counts.odd_set_union(j).unwrap(), ledger.odd_through(j));
            }
        }
    }
}
