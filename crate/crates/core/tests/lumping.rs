//! The magnetization of the full walk is itself a Markov chain with the urn kernel.

use hsl_core::analytics::exact_chain_distribution;
use hsl_core::pmf::UrnPmf;
use hsl_core::stats::chi_square_gof;
use hsl_core::walk::{run_full, run_urn, CoordinateState, Recording, UrnState};
use hsl_core::{IntervalGrid, RngStream};

fn magnetization(v: usize, k: usize) -> i64 {
    2 * v.count_ones() as i64 - k as i64
}

/// One step of the full walk on a vertex distribution.
fn full_step(p: &[f64], k: usize) -> Vec<f64> {
    let mut out = vec![0.0; p.len()];
    for (v, &mass) in p.iter().enumerate() {
        if mass == 0.0 {
            continue;
        }
        for i in 0..k {
            out[v ^ (1 << i)] += mass / k as f64;
        }
    }
    out
}

fn full_steps(mut p: Vec<f64>, k: usize, steps: u64) -> Vec<f64> {
    for _ in 0..steps {
        p = full_step(&p, k);
    }
    p
}

/// Joint law of `(m(L1), m(L1 + d))` from a vertex distribution, by enumerating `2^K` vertices.
fn full_joint(p0: Vec<f64>, k: usize, l1: u64, d: u64) -> Vec<Vec<f64>> {
    let at1 = full_steps(p0, k, l1);
    let mut joint = vec![vec![0.0; k + 1]; k + 1];
    for (a, row) in joint.iter_mut().enumerate() {
        let restricted: Vec<f64> = at1
            .iter()
            .enumerate()
            .map(|(v, &q)| if v.count_ones() as usize == a { q } else { 0.0 })
            .collect();
        for (v, q) in full_steps(restricted, k, d).into_iter().enumerate() {
            row[v.count_ones() as usize] += q;
        }
    }
    joint
}

fn urn_joint(init: &UrnPmf, k: u64, l1: u64, d: u64) -> Vec<Vec<f64>> {
    let at1 = exact_chain_distribution(k, l1, init).unwrap();
    (0..=k as usize)
        .map(|a| {
            let m = 2 * a as i64 - k as i64;
            let next = exact_chain_distribution(k, d, &UrnPmf::point(k, m).unwrap()).unwrap();
            next.probs().iter().map(|q| at1.probs()[a] * q).collect()
        })
        .collect()
}

fn tv(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    0.5 * a
        .iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).abs())
        .sum::<f64>()
}

#[test]
fn two_time_law_of_full_walk_equals_urn_chain() {
    for k in 1..=8usize {
        let size = 1usize << k;
        for &(l1, d) in &[(0u64, 1u64), (3, 4), (7, 13), (12, 8)] {
            let uniform = vec![1.0 / size as f64; size];
            let full = full_joint(uniform, k, l1, d);
            let urn = urn_joint(&UrnPmf::uniform_vertices(k as u64), k as u64, l1, d);
            assert!(tv(&full, &urn) <= 1e-12, "K={k} uniform L1={l1} d={d}");

            // point start at an arbitrary vertex
            let v0 = (0x5a5a_usize) & (size - 1);
            let mut point = vec![0.0; size];
            point[v0] = 1.0;
            let full = full_joint(point, k, l1, d);
            let m0 = magnetization(v0, k);
            let urn = urn_joint(&UrnPmf::point(k as u64, m0).unwrap(), k as u64, l1, d);
            assert!(tv(&full, &urn) <= 1e-12, "K={k} m0={m0} L1={l1} d={d}");
        }
    }
}

#[test]
fn simulated_engines_agree_in_law_on_two_times() {
    // K = 10 from all-plus, joint law of (X(t1), X(t2)) against the exact chain.
    let k = 10u64;
    let grid = IntervalGrid::new(10, vec![0.3, 1.1]).unwrap();
    let exact = urn_joint(&UrnPmf::point(k, 10).unwrap(), k, 3, 8);
    let r = 40_000u64;
    for engine in ["full", "urn"] {
        let mut counts = vec![0u64; (k as usize + 1).pow(2)];
        for rep in 0..r {
            let mut rng = RngStream::new(77, rep);
            let path = if engine == "full" {
                run_full(CoordinateState::all_plus(k), &grid, &mut rng, Recording::GridOnly)
            } else {
                run_urn(UrnState::new(k, 10).unwrap(), &grid, &mut rng, Recording::GridOnly)
            };
            let a = ((path.values[0] + k as i64) / 2) as usize;
            let b = ((path.values[1] + k as i64) / 2) as usize;
            counts[a * (k as usize + 1) + b] += 1;
        }
        let expected: Vec<f64> = exact.iter().flatten().copied().collect();
        let out = chi_square_gof(&counts, &expected, 5.0).unwrap();
        assert!(out.p_value > 1e-3, "{engine}: {out:?}");
    }
}
