#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Random walk on the hypercube `{−1, 1}^K`, its magnetization chain, and
//! Monte Carlo checks of the scaling limits of `f_K(Y_K(⌊nt⌋))` as `n, K → ∞`.

pub mod analytics;
pub mod error;
pub mod grid;
pub mod harness;
pub mod parity;
pub mod pmf;
pub mod rng;
pub mod stats;
pub mod walk;

pub use error::{Error, Result};
pub use grid::IntervalGrid;
pub use rng::RngStream;
pub use walk::{Engine, InitialLaw, ObservablePath, Recording};
