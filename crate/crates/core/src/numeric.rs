//! Small numerical building blocks shared by the kernels: compensated
//! summation, straight-line least squares and adaptive Gauss-Legendre
//! quadrature on the unit interval.

use std::num::NonZeroUsize;
use std::ops::AddAssign;
use std::sync::OnceLock;

use gauss_quad::GaussLegendre;
use serde::{Deserialize, Serialize};

/// Kahan-Babuska-Neumaier running sum.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub const fn new() -> Self {
        Self {
            sum: 0.0,
            compensation: 0.0,
        }
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl AddAssign<f64> for NeumaierSum {
    #[inline]
    fn add_assign(&mut self, rhs: f64) {
        self.add(rhs);
    }
}

impl Extend<f64> for NeumaierSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = NeumaierSum::new();
        s.extend(iter);
        s
    }
}

/// Compensated sum of an iterator.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<NeumaierSum>().value()
}

/// Ordinary least-squares line `y = intercept + slope * x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square deviation of the points from the line.
    pub residual: f64,
    /// Standard error of the slope estimate (zero for an exact fit).
    pub slope_stderr: f64,
}

impl LineFit {
    /// Fits a line through `(x, y)` pairs. Returns `None` with fewer than two
    /// points or when all abscissae coincide.
    pub fn fit(points: &[(f64, f64)]) -> Option<Self> {
        let m = points.len();
        if m < 2 {
            return None;
        }
        let mf = m as f64;
        let x_mean = neumaier_sum(points.iter().map(|p| p.0)) / mf;
        let y_mean = neumaier_sum(points.iter().map(|p| p.1)) / mf;
        let sxx = neumaier_sum(points.iter().map(|p| (p.0 - x_mean).powi(2)));
        if sxx <= 0.0 {
            return None;
        }
        let sxy = neumaier_sum(points.iter().map(|p| (p.0 - x_mean) * (p.1 - y_mean)));
        let slope = sxy / sxx;
        let intercept = y_mean - slope * x_mean;
        let sse = neumaier_sum(
            points
                .iter()
                .map(|p| (p.1 - intercept - slope * p.0).powi(2)),
        );
        let residual = (sse / mf).sqrt();
        let slope_stderr = if m > 2 {
            (sse / (mf - 2.0) / sxx).sqrt()
        } else {
            0.0
        };
        Some(Self {
            slope,
            intercept,
            residual,
            slope_stderr,
        })
    }

    pub fn predict(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }

    /// The fit obtained when every ordinate is multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            slope: self.slope * c,
            intercept: self.intercept * c,
            residual: self.residual * c.abs(),
            slope_stderr: self.slope_stderr * c.abs(),
        }
    }
}

const GL_NODES: usize = 24;

fn gauss_legendre() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(NonZeroUsize::new(GL_NODES).unwrap()))
}

/// Adaptive Gauss-Legendre integral of `f` over `[lo, hi]`.
///
/// A panel is accepted when the single-panel rule and the two-half-panel rule
/// agree to `tol` (absolute, scaled by the panel width fraction).
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, tol: f64) -> f64 {
    let rule = gauss_legendre();
    let whole = rule.integrate(lo, hi, f);
    let mut acc = NeumaierSum::new();
    refine(f, rule, lo, hi, whole, tol.max(f64::EPSILON), 0, &mut acc);
    acc.value()
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(
    f: &F,
    rule: &GaussLegendre,
    lo: f64,
    hi: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    acc: &mut NeumaierSum,
) {
    let mid = 0.5 * (lo + hi);
    let left = rule.integrate(lo, mid, f);
    let right = rule.integrate(mid, hi, f);
    let split = left + right;
    if (split - whole).abs() <= tol || depth >= 40 {
        acc.add(split);
    } else {
        refine(f, rule, lo, mid, left, 0.5 * tol, depth + 1, acc);
        refine(f, rule, mid, hi, right, 0.5 * tol, depth + 1, acc);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neumaier_recovers_cancelled_mass() {
        let xs = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(neumaier_sum(xs), 2.0);
        let naive: f64 = xs.iter().sum();
        assert_eq!(naive, 0.0);
    }

    #[test]
    fn exact_line_has_zero_residual() {
        let pts: Vec<_> = (0..10).map(|i| (i as f64, 3.0 - 0.5 * i as f64)).collect();
        let fit = LineFit::fit(&pts).unwrap();
        assert!((fit.slope + 0.5).abs() < 1e-14);
        assert!((fit.intercept - 3.0).abs() < 1e-13);
        assert!(fit.residual < 1e-13);
        assert!(fit.slope_stderr < 1e-13);
    }

    #[test]
    fn degenerate_fits_are_rejected() {
        assert!(LineFit::fit(&[(1.0, 2.0)]).is_none());
        assert!(LineFit::fit(&[(1.0, 2.0), (1.0, 3.0)]).is_none());
    }

    #[test]
    fn adaptive_quadrature_handles_sqrt_endpoint() {
        // integral of sqrt(x) over [0, 1] is 2/3
        let v = integrate_adaptive(&|x: f64| x.sqrt(), 0.0, 1.0, 1e-14);
        assert!((v - 2.0 / 3.0).abs() < 1e-12, "{v}");
    }
}
