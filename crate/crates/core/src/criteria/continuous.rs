//! Translation of `Z x [0, 1)` with a density that is piecewise constant on a
//! uniform partition of each fibre and constant in `k` outside a finite
//! window.

use serde::{Deserialize, Serialize};

use crate::intensity::Tri;
use crate::numeric::NeumaierSum;
use crate::{Error, Result};

/// Densities `f_k` on `[0, 1)` for `k` in `[offset, offset + window.len())`,
/// with `left_tail` for every smaller `k` and `right_tail` for every larger
/// one. Every vector has the same number of cells.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PiecewiseDensity {
    #[serde(default)]
    pub offset: i64,
    #[serde(default)]
    pub window: Vec<Vec<f64>>,
    pub left_tail: Vec<f64>,
    pub right_tail: Vec<f64>,
}

impl PiecewiseDensity {
    pub fn validate(&self) -> Result<usize> {
        let cells = self.left_tail.len();
        if cells == 0 {
            return Err(Error::InvalidArgument(
                "densities need at least one cell".into(),
            ));
        }
        for v in std::iter::once(&self.left_tail)
            .chain(std::iter::once(&self.right_tail))
            .chain(self.window.iter())
        {
            if v.len() != cells {
                return Err(Error::InvalidArgument(
                    "all density vectors must share one partition".into(),
                ));
            }
            if let Some(x) = v.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
                return Err(Error::InvalidArgument(format!(
                    "density entries must be positive and finite, got {x}"
                )));
            }
        }
        Ok(cells)
    }

    pub fn at(&self, k: i64) -> &[f64] {
        if k < self.offset {
            &self.left_tail
        } else if k >= self.offset + self.window.len() as i64 {
            &self.right_tail
        } else {
            &self.window[(k - self.offset) as usize]
        }
    }

    /// `sum_m || sqrt f_m - sqrt f_{m-n} ||_2^2`.
    pub fn hellinger_growth(&self, n: u64) -> Result<f64> {
        let cells = self.validate()? as f64;
        let n = n as i64;
        let mut acc = NeumaierSum::new();
        let hi = self.offset + self.window.len() as i64 + n;
        for m in self.offset..=hi {
            for (x, y) in self.at(m).iter().zip(self.at(m - n)) {
                acc.add((x.sqrt() - y.sqrt()).powi(2) / cells);
            }
        }
        Ok(acc.value())
    }
}

fn l1(v: &[f64]) -> f64 {
    v.iter().copied().collect::<NeumaierSum>().value() / v.len() as f64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuousBound {
    pub chi: f64,
    pub d: f64,
    pub n: u64,
    /// `sum_{n' <= N} exp(-n' chi^2 / (216 D^2))`.
    pub series_partial: f64,
    /// Ratio of the geometric series above.
    pub ratio: f64,
    pub dissipative: Tri,
}

/// `chi = ||a||_1 - ||b||_1`, `D = sup_k ||f_k||_1` and the dissipativity
/// series bounding `sum_n exp(-H(n)/2)` through `H(n) >= n chi^2 / (108 D^2)`.
pub fn continuous_base_bound(density: &PiecewiseDensity, n: u64) -> Result<ContinuousBound> {
    density.validate()?;
    if n == 0 {
        return Err(Error::InvalidArgument("N must be positive".into()));
    }
    let chi = l1(&density.right_tail) - l1(&density.left_tail);
    let d = std::iter::once(&density.left_tail)
        .chain(std::iter::once(&density.right_tail))
        .chain(density.window.iter())
        .map(|v| l1(v))
        .fold(0.0, f64::max);
    let ratio = (-chi * chi / (216.0 * d * d)).exp();
    let mut partial = NeumaierSum::new();
    let mut term = 1.0;
    for _ in 0..n {
        term *= ratio;
        partial.add(term);
    }
    Ok(ContinuousBound {
        chi,
        d,
        n,
        series_partial: partial.value(),
        ratio,
        dissipative: if chi != 0.0 {
            Tri::Yes
        } else {
            Tri::Undetermined
        },
    })
}

/// Lower bound `n chi^2 / (108 D^2)` on the Hellinger growth.
pub fn hellinger_lower_bound(bound: &ContinuousBound, n: u64) -> f64 {
    n as f64 * bound.chi * bound.chi / (108.0 * bound.d * bound.d)
}
