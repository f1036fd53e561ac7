//! Numerical laboratory for nonsingular Poisson suspensions built over an
//! atomic intensity `a_n = a * exp(eps_n)` on the integers.
//!
//! * [`dist`]: Poisson, Bessel and Skellam kernels, Hellinger distances.
//! * [`intensity`]: profiles, their condition system, `chi` and limit sets.
//! * [`criteria`]: analytic certificates for conservativity and
//!   dissipativity, slope fits and bifurcation bracketing.
//! * [`simulate`]: Monte Carlo experiments over sampled configurations.
//! * [`cli`]: configuration, dispatch and report serialization.

pub mod cli;
pub mod criteria;
pub mod dist;
pub mod intensity;
pub mod numeric;
pub mod simulate;

use thiserror::Error;

pub use dist::{DistError, PoissonLaw, SkellamLaw};
pub use intensity::{EpsilonFamily, IntensityProfile, ProfileError, Tri};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("window [{lo}, {hi}) does not cover the required range [{need_lo}, {need_hi}]")]
    Coverage {
        lo: i64,
        hi: i64,
        need_lo: i64,
        need_hi: i64,
    },
    #[error("monotonicity violated: {0}")]
    MonotonicityViolated(String),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
