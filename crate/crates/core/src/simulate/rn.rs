//! Configuration windows and the Radon-Nikodym cocycle of the suspension.
//!
//! For a configuration `omega`, the density of `mu* o T^-n` against `mu*` is
//! a product of per-atom Poisson pmf ratios:
//!
//! `log R_n(omega) = sum_k (a_k - a_{k-n}) + omega_k (eps_{k-n} - eps_k)`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::rng::PoissonSampler;
use crate::criteria::cutoff_index;
use crate::criteria::series::eps_diff;
use crate::intensity::IntensityProfile;
use crate::numeric::NeumaierSum;
use crate::{Error, Result};

/// Counts `omega_k` for `k` in `[offset, offset + counts.len())`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigurationWindow {
    pub offset: i64,
    pub counts: Vec<u64>,
}

impl ConfigurationWindow {
    pub fn end(&self) -> i64 {
        self.offset + self.counts.len() as i64
    }

    pub fn get(&self, k: i64) -> Option<u64> {
        if k < self.offset {
            return None;
        }
        self.counts.get((k - self.offset) as usize).copied()
    }

    /// The configuration `j -> omega_{j+n}`: same counts, offset moved by
    /// `-n`.
    pub fn shifted(&self, n: i64) -> Self {
        Self {
            offset: self.offset - n,
            counts: self.counts.clone(),
        }
    }
}

/// Inclusive index range a window must cover for a shift by `n`: every
/// index with a nonzero term up to the series cutoff.
pub fn required_range(profile: &IntensityProfile, n: u64) -> (i64, i64) {
    let layout = profile.epsilon.layout();
    (layout.left_const_until + 1, cutoff_index(&layout, n))
}

/// Independent draws `omega_k ~ Poisson(a_k)` for `k` in `[lo, hi)`.
pub fn sample_configuration<R: Rng + ?Sized>(
    profile: &IntensityProfile,
    lo: i64,
    hi: i64,
    rng: &mut R,
) -> Result<ConfigurationWindow> {
    if lo >= hi {
        return Err(Error::InvalidArgument(format!("empty window [{lo}, {hi})")));
    }
    let counts = (lo..hi)
        .map(|k| PoissonSampler::new(profile.intensity(k)).sample(rng))
        .collect();
    Ok(ConfigurationWindow { offset: lo, counts })
}

/// Fails unless `window` covers [`required_range`] for shift `n`.
pub fn check_coverage(
    profile: &IntensityProfile,
    window: &ConfigurationWindow,
    n: u64,
) -> Result<()> {
    let (need_lo, need_hi) = required_range(profile, n);
    if window.offset > need_lo || window.end() <= need_hi {
        return Err(Error::Coverage {
            lo: window.offset,
            hi: window.end(),
            need_lo,
            need_hi,
        });
    }
    Ok(())
}

/// `log R_n(omega)` summed over the whole window.
pub fn log_rn_derivative(
    profile: &IntensityProfile,
    window: &ConfigurationWindow,
    n: u64,
) -> Result<f64> {
    if n == 0 {
        return Ok(0.0);
    }
    check_coverage(profile, window, n)?;
    let layout = profile.epsilon.layout();
    let a = profile.total();
    let ni = n as i64;
    let mut acc = NeumaierSum::new();
    for (i, &w) in window.counts.iter().enumerate() {
        let k = window.offset + i as i64;
        let d = eps_diff(&profile.epsilon, &layout, k, ni);
        if d == 0.0 {
            continue;
        }
        let eps_prev = profile.eps(k - ni);
        // a_k - a_{k-n} = a e^{eps_{k-n}} (e^d - 1)
        acc.add(a * eps_prev.exp() * d.exp_m1());
        acc.add(-(w as f64) * d);
    }
    Ok(acc.value())
}
