//! Closed-form finite-size quantities and exact oracles.

mod chain;
mod compensator;
mod lclt;
mod limit;
mod moments;
mod quadrature;

pub use chain::{
    exact_chain_distribution, local_characteristics, transition_kernel, urn_transition_matrix,
    LocalCharacteristics, MAX_EXACT_DIMENSION,
};
pub use compensator::{compensators, CompensatorPath};
pub use lclt::local_clt_gap;
pub use limit::{
    limit_covariance, ou_exact_transition, sample_ou_transition, LimitLaw, OuStart,
};
pub use moments::{ehrenfest_moments, EhrenfestMoments};
pub use quadrature::{adaptive_simpson, Bump, BUMP_UNIT_INTEGRAL};
