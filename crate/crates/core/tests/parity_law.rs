//! Parity representation of the walk observable and the B(J) sets.

use hsl_core::analytics::{ehrenfest_moments, exact_chain_distribution};
use hsl_core::harness::signature_fraction_samples;
use hsl_core::parity::{accumulate_parities, reconstruct_fdl, signature_counts};
use hsl_core::pmf::UrnPmf;
use hsl_core::stats::chi_square_gof;
use hsl_core::{IntervalGrid, RngStream};

#[test]
fn reconstruction_matches_two_time_walk_law() {
    // K = 12, uniform start, grid with Δ = (5, 9).
    let k = 12u64;
    let grid = IntervalGrid::new(10, vec![0.5, 1.4]).unwrap();
    let init = UrnPmf::uniform_vertices(k);
    let side = k as usize + 1;
    let mut expected = vec![0.0; side * side];
    let at1 = exact_chain_distribution(k, 5, &init).unwrap();
    for a in 0..side {
        let m = 2 * a as i64 - k as i64;
        let next = exact_chain_distribution(k, 9, &UrnPmf::point(k, m).unwrap()).unwrap();
        for (b, q) in next.probs().iter().enumerate() {
            expected[a * side + b] = at1.probs()[a] * q;
        }
    }
    let r = 50_000u64;
    let mut counts = vec![0u64; side * side];
    for rep in 0..r {
        let mut rng = RngStream::new(2024, rep);
        let ledger = accumulate_parities(k, &grid, &mut rng).unwrap();
        let x = reconstruct_fdl(&signature_counts(&ledger), &mut rng);
        let a = ((x[0] as i64 + k as i64) / 2) as usize;
        let b = ((x[1] as i64 + k as i64) / 2) as usize;
        counts[a * side + b] += 1;
    }
    let out = chi_square_gof(&counts, &expected, 5.0).unwrap();
    assert!(out.p_value > 1e-3, "{out:?}");
}

#[test]
fn single_interval_count_follows_urn_moments() {
    // |B({1})| is the number of odd-parity coordinates after Δ draws.
    let (k, n, r) = (64u64, 100u64, 4000u64);
    let grid = IntervalGrid::new(n, vec![0.4]).unwrap();
    let rows = signature_fraction_samples(k, &grid, r, 9).unwrap();
    let xs: Vec<f64> = rows.iter().map(|row| row[1]).collect();
    let mean = xs.iter().sum::<f64>() / r as f64;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (r - 1) as f64;
    let m = ehrenfest_moments(k, 40).unwrap();
    let se = (var / r as f64).sqrt();
    assert!((mean - m.mean_fraction).abs() <= 3.0 * se, "{mean} vs {}", m.mean_fraction);
    // variance within 4 standard errors of its Gaussian-approximation SE
    let var_se = m.variance_fraction * (2.0 / (r - 1) as f64).sqrt();
    assert!((var - m.variance_fraction).abs() <= 4.0 * var_se + 1e-6, "{var} vs {}", m.variance_fraction);
}

#[test]
fn complement_count_has_the_same_variance() {
    // Interval 2 of an s = 2 grid: the odd set is masks {2} ∪ {1,2}, its
    // complement masks ∅ ∪ {1}. Both variances against the urn formula.
    let (k, r) = (128u64, 4000u64);
    let grid = IntervalGrid::new(1000, vec![0.05, 0.2]).unwrap();
    let rows = signature_fraction_samples(k, &grid, r, 31).unwrap();
    let var_of = |idx: &[usize]| {
        let xs: Vec<f64> = rows.iter().map(|row| idx.iter().map(|&i| row[i]).sum()).collect();
        let mean = xs.iter().sum::<f64>() / r as f64;
        xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (r - 1) as f64
    };
    let target = ehrenfest_moments(k, 150).unwrap().variance_fraction;
    let se = target * (2.0 / (r - 1) as f64).sqrt();
    for (name, idx) in [("odd", [2usize, 3]), ("even", [0, 1])] {
        let v = var_of(&idx);
        assert!((v - target).abs() <= 4.0 * se, "{name}: {v} vs {target}");
    }
}
