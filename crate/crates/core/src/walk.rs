//! Simple random walk on the hypercube `{−1, +1}^K` and its magnetization.
//!
//! The magnetization `m = f_K(y)` of the walk is itself a birth–death chain
//! (an affine image of the Ehrenfest urn), so paths of `m` can be produced
//! either by flipping coordinates of a full state or by stepping the urn
//! directly. Both engines give identically distributed observables.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::grid::IntervalGrid;
use crate::pmf::{check_magnetization, plus_count, CompensatedSum, UrnPmf};

/// Full position on the hypercube, one bit per coordinate (bit `b` ↦ `2b − 1`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoordinateState {
    k: u64,
    words: Vec<u64>,
    plus: u64,
}

impl CoordinateState {
    pub fn all_plus(k: u64) -> Self {
        assert!(k > 0, "dimension must be positive");
        let mut words = vec![u64::MAX; k.div_ceil(64) as usize];
        let tail = k % 64;
        if tail != 0 {
            *words.last_mut().unwrap() = (1u64 << tail) - 1;
        }
        Self { k, words, plus: k }
    }

    /// Builds a state from explicit `±1` coordinates.
    pub fn from_signs(signs: &[i8]) -> Result<Self> {
        if signs.is_empty() {
            return Err(Error::Validation("dimension must be positive".into()));
        }
        let k = signs.len() as u64;
        let mut words = vec![0u64; k.div_ceil(64) as usize];
        let mut plus = 0;
        for (i, &s) in signs.iter().enumerate() {
            match s {
                1 => {
                    words[i / 64] |= 1 << (i % 64);
                    plus += 1;
                }
                -1 => {}
                other => {
                    return Err(Error::Validation(format!("coordinate value {other} is not ±1")))
                }
            }
        }
        Ok(Self { k, words, plus })
    }

    /// Uniformly random vertex.
    pub fn uniform<R: Rng + ?Sized>(k: u64, rng: &mut R) -> Self {
        assert!(k > 0, "dimension must be positive");
        let mut words: Vec<u64> = (0..k.div_ceil(64)).map(|_| rng.next_u64()).collect();
        let tail = k % 64;
        if tail != 0 {
            *words.last_mut().unwrap() &= (1u64 << tail) - 1;
        }
        let plus = words.iter().map(|w| u64::from(w.count_ones())).sum();
        Self { k, words, plus }
    }

    /// Vertex with the given magnetization; the first `(K + m)/2` coordinates are `+1`.
    pub fn with_magnetization(k: u64, m: i64) -> Result<Self> {
        check_magnetization(k, m)?;
        let plus = plus_count(k, m);
        let mut words = vec![0u64; k.div_ceil(64) as usize];
        for i in 0..plus as usize {
            words[i / 64] |= 1 << (i % 64);
        }
        Ok(Self { k, words, plus })
    }

    pub fn dimension(&self) -> u64 {
        self.k
    }

    pub fn coord(&self, i: usize) -> i8 {
        assert!((i as u64) < self.k, "coordinate {i} out of range");
        if self.words[i / 64] >> (i % 64) & 1 == 1 {
            1
        } else {
            -1
        }
    }

    pub fn signs(&self) -> Vec<i8> {
        (0..self.k as usize).map(|i| self.coord(i)).collect()
    }

    /// Number of `+1` coordinates recounted from the bits.
    pub fn popcount(&self) -> u64 {
        self.words.iter().map(|w| u64::from(w.count_ones())).sum()
    }

    /// `f_K(y) = #{+1} − #{−1}`.
    pub fn magnetization(&self) -> i64 {
        2 * self.plus as i64 - self.k as i64
    }

    pub fn flip(&mut self, i: usize) {
        assert!((i as u64) < self.k, "coordinate {i} out of range");
        let mask = 1u64 << (i % 64);
        let w = &mut self.words[i / 64];
        if *w & mask != 0 {
            self.plus -= 1;
        } else {
            self.plus += 1;
        }
        *w ^= mask;
    }

    /// One step of the walk: flips a uniformly chosen coordinate and returns its index.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> usize {
        let i = rng.random_range(0..self.k) as usize;
        self.flip(i);
        i
    }
}

/// Magnetization-only state of the walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UrnState {
    k: u64,
    plus: u64,
}

impl UrnState {
    pub fn new(k: u64, m: i64) -> Result<Self> {
        if k == 0 {
            return Err(Error::Validation("dimension must be positive".into()));
        }
        check_magnetization(k, m)?;
        Ok(Self {
            k,
            plus: plus_count(k, m),
        })
    }

    pub fn dimension(&self) -> u64 {
        self.k
    }

    pub fn magnetization(&self) -> i64 {
        2 * self.plus as i64 - self.k as i64
    }

    /// Probability of moving to `m − 2`, i.e. `1/2 + m/(2K)`.
    pub fn p_down(&self) -> f64 {
        self.plus as f64 / self.k as f64
    }

    /// One urn step: a `+1` coordinate is flipped with probability `#{+1}/K`.
    #[inline]
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        if rng.random_range(0..self.k) < self.plus {
            self.plus -= 1;
        } else {
            self.plus += 1;
        }
    }
}

impl From<&CoordinateState> for UrnState {
    fn from(s: &CoordinateState) -> Self {
        Self {
            k: s.k,
            plus: s.plus,
        }
    }
}

/// Law `μ_K` of the starting vertex, described through its magnetization.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialLaw {
    UniformOnVertices,
    AllPlus,
    /// Point mass at the admissible `m` nearest to `C·K` (ties toward 0).
    FixedMagnetizationFraction(f64),
    ExplicitPmf(BTreeMap<i64, f64>),
}

const PMF_SUM_TOL: f64 = 1e-12;

impl InitialLaw {
    pub fn validate(&self, k: u64) -> Result<()> {
        if k == 0 {
            return Err(Error::Validation("dimension must be positive".into()));
        }
        match self {
            InitialLaw::UniformOnVertices | InitialLaw::AllPlus => Ok(()),
            InitialLaw::FixedMagnetizationFraction(c) => {
                if !c.is_finite() || c.abs() > 1.0 {
                    return Err(Error::Domain(format!(
                        "magnetization fraction {c} lies outside [-1, 1]"
                    )));
                }
                Ok(())
            }
            InitialLaw::ExplicitPmf(map) => {
                if map.is_empty() {
                    return Err(Error::Validation("explicit pmf is empty".into()));
                }
                for (&m, &p) in map {
                    check_magnetization(k, m)?;
                    if !(p >= 0.0) || !p.is_finite() {
                        return Err(Error::Validation(format!("probability {p} at m = {m}")));
                    }
                }
                let total = map.values().copied().collect::<CompensatedSum>().value();
                if (total - 1.0).abs() > PMF_SUM_TOL {
                    return Err(Error::Validation(format!(
                        "explicit pmf sums to {total}, not 1"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Exact law of the initial magnetization.
    pub fn pmf(&self, k: u64) -> Result<UrnPmf> {
        self.validate(k)?;
        match self {
            InitialLaw::UniformOnVertices => Ok(UrnPmf::uniform_vertices(k)),
            InitialLaw::AllPlus => UrnPmf::point(k, k as i64),
            InitialLaw::FixedMagnetizationFraction(c) => {
                UrnPmf::point(k, nearest_admissible_magnetization(k, *c)?)
            }
            InitialLaw::ExplicitPmf(map) => {
                let mut probs = vec![0.0; k as usize + 1];
                for (&m, &p) in map {
                    probs[plus_count(k, m) as usize] = p;
                }
                UrnPmf::from_plus_counts(k, probs)
            }
        }
    }

    /// `E|m|` under the law.
    pub fn mean_abs_magnetization(&self, k: u64) -> Result<f64> {
        self.validate(k)?;
        Ok(match self {
            InitialLaw::UniformOnVertices => crate::pmf::rademacher_mean_abs(k),
            InitialLaw::AllPlus => k as f64,
            InitialLaw::FixedMagnetizationFraction(c) => {
                nearest_admissible_magnetization(k, *c)?.unsigned_abs() as f64
            }
            InitialLaw::ExplicitPmf(map) => map
                .iter()
                .map(|(&m, &p)| m.unsigned_abs() as f64 * p)
                .collect::<CompensatedSum>()
                .value(),
        })
    }

    pub fn is_uniform(&self) -> bool {
        matches!(self, InitialLaw::UniformOnVertices)
    }
}

/// Admissible magnetization nearest to `c·K`, ties broken toward 0 (and toward +1
/// between ±1 for odd `K` at `c = 0`).
pub fn nearest_admissible_magnetization(k: u64, c: f64) -> Result<i64> {
    if !c.is_finite() || c.abs() > 1.0 {
        return Err(Error::Domain(format!("magnetization fraction {c} lies outside [-1, 1]")));
    }
    let ki = k as i64;
    let target = c * k as f64;
    // Admissible values are K − 2j; bracket the target between two of them.
    let j_hi = (((k as f64 - target) / 2.0).floor() as i64).clamp(0, ki);
    let upper = ki - 2 * j_hi;
    let lower = (upper - 2).max(-ki);
    let du = (upper as f64 - target).abs();
    let dl = (target - lower as f64).abs();
    let tie = (du - dl).abs() <= 1e-9 * (k as f64).max(1.0);
    Ok(if tie {
        if upper.abs() <= lower.abs() {
            upper
        } else {
            lower
        }
    } else if du < dl {
        upper
    } else {
        lower
    })
}

fn sample_from_pmf<R: Rng + ?Sized>(pmf: &UrnPmf, rng: &mut R) -> i64 {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = None;
    for (m, p) in pmf.iter() {
        if p <= 0.0 {
            continue;
        }
        acc += p;
        last = Some(m);
        if u < acc {
            return m;
        }
    }
    last.expect("pmf has positive mass")
}

/// Draws the initial magnetization from `law`.
pub fn sample_initial<R: Rng + ?Sized>(law: &InitialLaw, k: u64, rng: &mut R) -> Result<UrnState> {
    law.validate(k)?;
    let m = match law {
        InitialLaw::UniformOnVertices => {
            let b = Binomial::new(k, 0.5).expect("valid binomial parameters").sample(rng);
            2 * b as i64 - k as i64
        }
        InitialLaw::AllPlus => k as i64,
        InitialLaw::FixedMagnetizationFraction(c) => nearest_admissible_magnetization(k, *c)?,
        InitialLaw::ExplicitPmf(_) => sample_from_pmf(&law.pmf(k)?, rng),
    };
    UrnState::new(k, m)
}

/// Draws a full starting vertex whose magnetization follows `law`.
pub fn sample_initial_coordinates<R: Rng + ?Sized>(
    law: &InitialLaw,
    k: u64,
    rng: &mut R,
) -> Result<CoordinateState> {
    if law.is_uniform() {
        law.validate(k)?;
        return Ok(CoordinateState::uniform(k, rng));
    }
    let urn = sample_initial(law, k, rng)?;
    CoordinateState::with_magnetization(k, urn.magnetization())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Engine {
    Full,
    #[default]
    Urn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Recording {
    #[default]
    GridOnly,
    /// Also keep `f_K` at every step index `0..=⌊n t_s⌋`.
    Dense,
}

/// `X_{n,K}(t_j) = f_K(Y_K(⌊n t_j⌋))` on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservablePath {
    pub k: u64,
    pub grid: IntervalGrid,
    pub initial_value: i64,
    pub values: Vec<i64>,
    pub dense: Option<Vec<i64>>,
}

impl ObservablePath {
    /// `X(t_j) / c`.
    pub fn scaled(&self, c: f64) -> Vec<f64> {
        self.values.iter().map(|&v| v as f64 / c).collect()
    }

    /// `(X(t_j) − X(0)) / c`.
    pub fn increments(&self, c: f64) -> Vec<f64> {
        self.values
            .iter()
            .map(|&v| (v - self.initial_value) as f64 / c)
            .collect()
    }
}

/// Simulates the observable from an initial law on the grid's step indices.
pub fn simulate_observable_path<R: Rng + ?Sized>(
    k: u64,
    grid: &IntervalGrid,
    law: &InitialLaw,
    rng: &mut R,
    engine: Engine,
    recording: Recording,
) -> Result<ObservablePath> {
    match engine {
        Engine::Urn => {
            let start = sample_initial(law, k, rng)?;
            Ok(run_urn(start, grid, rng, recording))
        }
        Engine::Full => {
            let start = sample_initial_coordinates(law, k, rng)?;
            Ok(run_full(start, grid, rng, recording))
        }
    }
}

/// Path of the urn engine from a given state.
pub fn run_urn<R: Rng + ?Sized>(
    mut state: UrnState,
    grid: &IntervalGrid,
    rng: &mut R,
    recording: Recording,
) -> ObservablePath {
    let initial_value = state.magnetization();
    let mut dense = match recording {
        Recording::Dense => {
            let mut d = Vec::with_capacity(grid.last_index() as usize + 1);
            d.push(initial_value);
            Some(d)
        }
        Recording::GridOnly => None,
    };
    let mut values = Vec::with_capacity(grid.len());
    let mut at = 0u64;
    for &target in grid.indices() {
        match dense.as_mut() {
            Some(d) => {
                for _ in at..target {
                    state.step(rng);
                    d.push(state.magnetization());
                }
            }
            None => {
                for _ in at..target {
                    state.step(rng);
                }
            }
        }
        at = target;
        values.push(state.magnetization());
    }
    ObservablePath {
        k: state.dimension(),
        grid: grid.clone(),
        initial_value,
        values,
        dense,
    }
}

/// Path of the full-coordinate engine from a given vertex.
pub fn run_full<R: Rng + ?Sized>(
    mut state: CoordinateState,
    grid: &IntervalGrid,
    rng: &mut R,
    recording: Recording,
) -> ObservablePath {
    let initial_value = state.magnetization();
    let mut dense = (recording == Recording::Dense).then(|| vec![initial_value]);
    let mut values = Vec::with_capacity(grid.len());
    let mut at = 0u64;
    for &target in grid.indices() {
        for _ in at..target {
            state.step(rng);
            if let Some(d) = dense.as_mut() {
                d.push(state.magnetization());
            }
        }
        at = target;
        values.push(state.magnetization());
    }
    ObservablePath {
        k: state.dimension(),
        grid: grid.clone(),
        initial_value,
        values,
        dense,
    }
}
