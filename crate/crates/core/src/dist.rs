//! Poisson and Skellam laws, the modified Bessel function of the first kind
//! for integer order, and Hellinger distances between Poisson laws.
//!
//! Everything here is a pure function of its arguments. Probabilities that
//! feed long products are handled in log space; `LogProb::Zero` stands for
//! `log 0` so that an impossible outcome never masquerades as an overflow.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_factorial;
use thiserror::Error;

use crate::numeric::NeumaierSum;

/// Relative size at which the Bessel series is truncated.
pub const BESSEL_REL_TOL: f64 = 1e-18;
/// Hard cap on the number of Bessel series terms.
pub const BESSEL_MAX_TERMS: usize = 10_000;
/// A tail term below this value counts as negligible.
pub const TAIL_TERM_EPS: f64 = 1e-18;
/// Consecutive negligible terms needed before a tail sum stops.
pub const TAIL_QUIET_RUN: usize = 50;
const TAIL_MAX_TERMS: i64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DistError {
    #[error("rate must be a finite nonnegative number, got {0}")]
    InvalidRate(f64),
    #[error("degenerate atom: a Poisson law with rate 0 gives count {k} probability zero")]
    DegenerateAtom { k: u64 },
    #[error("tail index must be at least 1")]
    ZeroTailIndex,
}

/// A log-probability with an explicit representation of `log 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LogProb {
    Zero,
    Finite(f64),
}

impl LogProb {
    pub fn exp(self) -> f64 {
        match self {
            LogProb::Zero => 0.0,
            LogProb::Finite(v) => v.exp(),
        }
    }

    /// The value as an `f64`, mapping the sentinel to negative infinity.
    pub fn to_f64(self) -> f64 {
        match self {
            LogProb::Zero => f64::NEG_INFINITY,
            LogProb::Finite(v) => v,
        }
    }

    pub fn is_zero(self) -> bool {
        matches!(self, LogProb::Zero)
    }
}

fn check_rate(rate: f64) -> Result<f64, DistError> {
    if rate.is_finite() && rate >= 0.0 {
        Ok(rate)
    } else {
        Err(DistError::InvalidRate(rate))
    }
}

/// Poisson law on the nonnegative integers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoissonLaw {
    rate: f64,
}

impl PoissonLaw {
    pub fn new(rate: f64) -> Result<Self, DistError> {
        Ok(Self {
            rate: check_rate(rate)?,
        })
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn log_pmf(&self, k: u64) -> LogProb {
        if self.rate == 0.0 {
            return if k == 0 {
                LogProb::Finite(0.0)
            } else {
                LogProb::Zero
            };
        }
        LogProb::Finite(-self.rate + k as f64 * self.rate.ln() - ln_factorial(k))
    }

    pub fn pmf(&self, k: u64) -> f64 {
        self.log_pmf(k).exp()
    }
}

/// `log P(N = k)` for `N ~ Poisson(rate)`.
///
/// A zero rate with a positive count is reported as
/// [`DistError::DegenerateAtom`] instead of returning negative infinity.
pub fn poisson_log_pmf(rate: f64, k: u64) -> Result<f64, DistError> {
    match PoissonLaw::new(rate)?.log_pmf(k) {
        LogProb::Finite(v) => Ok(v),
        LogProb::Zero => Err(DistError::DegenerateAtom { k }),
    }
}

/// Natural log of `I_|k|(z)` for `z >= 0`. Returns negative infinity when
/// `z = 0` and `k != 0`.
pub fn log_bessel_i(k: i64, z: f64) -> f64 {
    debug_assert!(z >= 0.0);
    let order = k.unsigned_abs();
    if z == 0.0 {
        return if order == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    // I_k(z) = (z/2)^k / k! * sum_j r_j with r_0 = 1 and
    // r_{j+1} = r_j * (z^2/4) / ((j+1)(j+1+k)).
    let log_lead = order as f64 * (0.5 * z).ln() - ln_factorial(order);
    let q = 0.25 * z * z;
    let mut ratio = 1.0f64;
    let mut sum = NeumaierSum::new();
    sum.add(1.0);
    let kf = order as f64;
    for j in 0..BESSEL_MAX_TERMS {
        let jf = j as f64;
        ratio *= q / ((jf + 1.0) * (jf + 1.0 + kf));
        sum.add(ratio);
        if ratio < BESSEL_REL_TOL * sum.value() {
            break;
        }
    }
    log_lead + sum.value().ln()
}

/// Modified Bessel function of the first kind `I_k(z)`, integer order.
/// `I_k = I_{-k}`.
pub fn bessel_i(k: i64, z: f64) -> f64 {
    log_bessel_i(k, z).exp()
}

/// Law of `X - Y` for independent `X ~ Poisson(a)`, `Y ~ Poisson(b)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkellamLaw {
    a: f64,
    b: f64,
}

/// Exact two-sided tail mass together with the analytic upper bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkellamTail {
    pub l: u32,
    pub exact: f64,
    pub bound: f64,
}

impl SkellamLaw {
    pub fn new(a: f64, b: f64) -> Result<Self, DistError> {
        Ok(Self {
            a: check_rate(a)?,
            b: check_rate(b)?,
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn log_pmf(&self, k: i64) -> LogProb {
        let (a, b) = (self.a, self.b);
        if b == 0.0 {
            return if k < 0 {
                LogProb::Zero
            } else {
                PoissonLaw { rate: a }.log_pmf(k as u64)
            };
        }
        if a == 0.0 {
            return if k > 0 {
                LogProb::Zero
            } else {
                PoissonLaw { rate: b }.log_pmf(k.unsigned_abs())
            };
        }
        let z = 2.0 * (a * b).sqrt();
        LogProb::Finite(-(a + b) + 0.5 * k as f64 * (a.ln() - b.ln()) + log_bessel_i(k, z))
    }

    /// `e^{-(a+b)} (a/b)^{k/2} I_k(2 sqrt(ab))`.
    pub fn pmf(&self, k: i64) -> f64 {
        self.log_pmf(k).exp()
    }

    /// Characteristic function `exp(-(a+b) + a e^{it} + b e^{-it})`.
    pub fn cf(&self, t: f64) -> Complex64 {
        let eit = Complex64::from_polar(1.0, t);
        (-(self.a + self.b) + self.a * eit + self.b * eit.conj()).exp()
    }

    /// `(mean, variance) = (a - b, a + b)`.
    pub fn moments(&self) -> (f64, f64) {
        (self.a - self.b, self.a + self.b)
    }

    /// Mass of `{k >= l}` summed outward until the terms are negligible.
    fn one_sided_tail(&self, l: i64, sign: i64) -> f64 {
        // past the mode of the dominant Poisson component terms only decrease
        let mode = if sign > 0 { self.a } else { self.b }.ceil() as i64 + 1;
        let mut sum = NeumaierSum::new();
        let mut quiet = 0usize;
        let mut k = l;
        while k - l < TAIL_MAX_TERMS {
            let p = self.pmf(sign * k);
            sum.add(p);
            if p < TAIL_TERM_EPS {
                quiet += 1;
                if quiet >= TAIL_QUIET_RUN && k > mode {
                    break;
                }
            } else {
                quiet = 0;
            }
            k += 1;
        }
        sum.value()
    }

    /// `sum_{|k| >= l} pmf(k)` and the bound
    /// `e^{-(a+b)+ab} (a^l e^a + b^l e^b) / l!`.
    pub fn tail(&self, l: u32) -> Result<SkellamTail, DistError> {
        if l == 0 {
            return Err(DistError::ZeroTailIndex);
        }
        let li = l as i64;
        let exact = self.one_sided_tail(li, 1) + self.one_sided_tail(li, -1);
        Ok(SkellamTail {
            l,
            exact,
            bound: self.tail_bound(l),
        })
    }

    fn tail_bound(&self, l: u32) -> f64 {
        let (a, b) = (self.a, self.b);
        let lf = l as f64;
        let log_term = |r: f64| {
            if r == 0.0 {
                f64::NEG_INFINITY
            } else {
                lf * r.ln() + r
            }
        };
        let (ta, tb) = (log_term(a), log_term(b));
        let hi = ta.max(tb);
        if hi == f64::NEG_INFINITY {
            return 0.0;
        }
        let lse = hi + ((ta - hi).exp() + (tb - hi).exp()).ln();
        (-(a + b) + a * b + lse - ln_factorial(l as u64)).exp()
    }
}

/// Functional form of [`SkellamLaw::pmf`].
pub fn skellam_pmf(law: &SkellamLaw, k: i64) -> f64 {
    law.pmf(k)
}

pub fn skellam_cf(law: &SkellamLaw, t: f64) -> Complex64 {
    law.cf(t)
}

pub fn skellam_moments(law: &SkellamLaw) -> (f64, f64) {
    law.moments()
}

pub fn skellam_tail(law: &SkellamLaw, l: u32) -> Result<SkellamTail, DistError> {
    law.tail(l)
}

/// Squared Hellinger distance `1 - exp(-(sqrt a - sqrt b)^2 / 2)` between
/// Poisson laws with rates `a` and `b`.
pub fn hellinger_sq_poisson(a: f64, b: f64) -> Result<f64, DistError> {
    let (a, b) = (check_rate(a)?, check_rate(b)?);
    let d = a.sqrt() - b.sqrt();
    Ok(-(-0.5 * d * d).exp_m1())
}

/// Outcome of the uniform tail-decay search over a parameter grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformTailDecay {
    pub upper: f64,
    pub step: f64,
    /// Grid supremum of the exact tail for `l = 1..=l_max`.
    pub sup_tails: Vec<f64>,
    /// Smallest `l` such that the supremum stays below `l'^-8` for every
    /// `l'` in `l..=l_max`.
    pub threshold: Option<u32>,
}

/// Scans `0 < a, b < upper` on a grid with spacing `step` and finds the
/// smallest index from which the worst tail mass decays like `l^-8`.
pub fn uniform_tail_decay(
    upper: f64,
    step: f64,
    l_max: u32,
) -> Result<UniformTailDecay, DistError> {
    let mut grid = Vec::new();
    let mut v = step;
    while v < upper - 1e-12 {
        grid.push(v);
        v += step;
    }
    let mut sup_tails = vec![0.0f64; l_max as usize];
    for &a in &grid {
        for &b in &grid {
            let law = SkellamLaw::new(a, b)?;
            for l in 1..=l_max {
                let t = law.tail(l)?.exact;
                let slot = &mut sup_tails[(l - 1) as usize];
                *slot = slot.max(t);
            }
        }
    }
    let mut threshold = None;
    for l in (1..=l_max).rev() {
        if sup_tails[(l - 1) as usize] <= (l as f64).powi(-8) {
            threshold = Some(l);
        } else {
            break;
        }
    }
    Ok(UniformTailDecay {
        upper,
        step,
        sup_tails,
        threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Poisson pmf by the recurrence p_{j+1} = p_j * rate / (j+1); no
    /// factorial or Bessel machinery involved.
    fn poisson_table(rate: f64, len: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(len);
        let mut p = (-rate).exp();
        for j in 0..len {
            out.push(p);
            p *= rate / (j as f64 + 1.0);
        }
        out
    }

    /// P(X - Y = k) by direct convolution over j <= 60.
    fn convolution_pmf(a: f64, b: f64, k: i64) -> f64 {
        let (pa, pb) = (poisson_table(a, 200), poisson_table(b, 200));
        let mut s = NeumaierSum::new();
        for j in 0..=60i64 {
            let x = j + k.max(0);
            let y = j + (-k).max(0);
            s.add(pa[x as usize] * pb[y as usize]);
        }
        s.value()
    }

    const GRID: [f64; 5] = [0.1, 0.5, 1.0, 2.0, 5.0];

    #[test]
    fn poisson_log_pmf_examples() {
        assert_eq!(poisson_log_pmf(1.0, 0).unwrap(), -1.0);
        let v = poisson_log_pmf(2.0, 2).unwrap();
        assert!((v - (2f64.ln() - 2.0)).abs() < 1e-15);
        // 40-digit evaluation of -0.1 + 7 ln 0.1 - ln 7!
        let oracle = -24.743_257_012_023_734_088_291_47;
        assert!((poisson_log_pmf(0.1, 7).unwrap() - oracle).abs() < 1e-13);
    }

    #[test]
    fn poisson_log_pmf_against_exact_factorial() {
        use num_bigint::BigUint;
        for k in [0u64, 1, 5, 12, 25, 60] {
            let fact: BigUint = (1..=k).map(BigUint::from).product();
            let ln_fact: f64 = if k == 0 {
                0.0
            } else {
                // split into f64-safe digits: ln(m * 10^e)
                let s = fact.to_string();
                let lead: f64 = s[..s.len().min(17)].parse().unwrap();
                lead.ln() + (s.len().saturating_sub(17)) as f64 * 10f64.ln()
            };
            let expect = -0.7 + k as f64 * 0.7f64.ln() - ln_fact;
            let got = poisson_log_pmf(0.7, k).unwrap();
            assert!(
                (got - expect).abs() < 1e-12 * expect.abs().max(1.0),
                "k={k}"
            );
        }
    }

    #[test]
    fn degenerate_atom_is_explicit() {
        assert_eq!(poisson_log_pmf(0.0, 0).unwrap(), 0.0);
        assert_eq!(
            poisson_log_pmf(0.0, 3),
            Err(DistError::DegenerateAtom { k: 3 })
        );
        assert!(PoissonLaw::new(0.0).unwrap().log_pmf(3).is_zero());
        assert!(matches!(
            poisson_log_pmf(-1.0, 0),
            Err(DistError::InvalidRate(_))
        ));
    }

    #[test]
    fn poisson_pmf_sums_to_one() {
        for rate in [0.05, 1.0, 7.5, 30.0] {
            let law = PoissonLaw::new(rate).unwrap();
            let total: f64 = (0..400).map(|k| law.pmf(k)).sum();
            assert!((total - 1.0).abs() < 1e-13, "rate={rate}");
        }
    }

    #[test]
    fn bessel_examples() {
        assert_eq!(bessel_i(0, 0.0), 1.0);
        assert_eq!(bessel_i(3, 0.0), 0.0);
        // 40-digit term-by-term summation of sum_j 1/(j!)^2
        assert!((bessel_i(0, 2.0) - 2.279_585_302_336_067_267_437_204).abs() < 1e-13);
        assert!((bessel_i(5, 3.7) - 0.312_729_641_613_486_887_366_355_4).abs() < 1e-13);
        let big = 3.112_769_776_267_509_174_344_11;
        assert!((bessel_i(12, 10.0) - big).abs() < 1e-13 * big);
        assert_eq!(bessel_i(-5, 3.7), bessel_i(5, 3.7));
    }

    #[test]
    fn skellam_examples() {
        let law = SkellamLaw::new(1.0, 0.0).unwrap();
        let mut fact = 1.0;
        for m in 0..10i64 {
            if m > 0 {
                fact *= m as f64;
            }
            assert!((law.pmf(m) - (-1f64).exp() / fact).abs() < 1e-15);
        }
        assert_eq!(law.pmf(-1), 0.0);
        let sym = SkellamLaw::new(2.5, 2.5).unwrap();
        for k in 0..20 {
            assert_eq!(sym.pmf(k), sym.pmf(-k));
        }
        let unit = SkellamLaw::new(1.0, 1.0).unwrap();
        assert!((unit.pmf(0) - convolution_pmf(1.0, 1.0, 0)).abs() < 1e-14);
        let reflected = SkellamLaw::new(0.0, 2.0).unwrap();
        assert!((reflected.pmf(-3) - PoissonLaw::new(2.0).unwrap().pmf(3)).abs() < 1e-16);
        assert!(SkellamLaw::new(-0.1, 1.0).is_err());
    }

    #[test]
    fn skellam_matches_convolution_on_grid() {
        for &a in &GRID {
            for &b in &GRID {
                let law = SkellamLaw::new(a, b).unwrap();
                for k in -30..=30 {
                    let d = (law.pmf(k) - convolution_pmf(a, b, k)).abs();
                    assert!(d < 1e-12, "a={a} b={b} k={k} diff={d}");
                }
                let total: f64 = crate::numeric::neumaier_sum((-200..=200).map(|k| law.pmf(k)));
                assert!((total - 1.0).abs() < 1e-12, "a={a} b={b} total={total}");
            }
        }
    }

    #[test]
    fn cf_examples() {
        let unit = SkellamLaw::new(1.0, 1.0).unwrap();
        assert!((unit.cf(0.0) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let at_pi = unit.cf(std::f64::consts::PI);
        assert!((at_pi - Complex64::new((-4f64).exp(), 0.0)).norm() < 1e-15);
        let law = SkellamLaw::new(0.5, 2.0).unwrap();
        let mut re = NeumaierSum::new();
        let mut im = NeumaierSum::new();
        for k in -60..=60i64 {
            let p = convolution_pmf(0.5, 2.0, k);
            re.add(p * (k as f64).cos());
            im.add(p * (k as f64).sin());
        }
        let oracle = Complex64::new(re.value(), im.value());
        assert!((law.cf(1.0) - oracle).norm() < 1e-10);
    }

    #[test]
    fn cf_matches_fourier_sum_on_grid() {
        for &a in &GRID {
            for &b in &GRID {
                let law = SkellamLaw::new(a, b).unwrap();
                for j in 0..=31 {
                    let t = 0.1 * j as f64;
                    let mut re = NeumaierSum::new();
                    let mut im = NeumaierSum::new();
                    for k in -80..=80i64 {
                        let p = law.pmf(k);
                        re.add(p * (k as f64 * t).cos());
                        im.add(p * (k as f64 * t).sin());
                    }
                    let d = (law.cf(t) - Complex64::new(re.value(), im.value())).norm();
                    assert!(d < 1e-10, "a={a} b={b} t={t} diff={d}");
                }
            }
        }
    }

    #[test]
    fn moments_examples() {
        assert_eq!(SkellamLaw::new(1.0, 1.0).unwrap().moments(), (0.0, 2.0));
        assert_eq!(SkellamLaw::new(3.0, 0.0).unwrap().moments(), (3.0, 3.0));
        let (m, v) = SkellamLaw::new(0.2, 0.7).unwrap().moments();
        assert!((m + 0.5).abs() < 1e-15 && (v - 0.9).abs() < 1e-15);
        let (mut s1, mut s2) = (NeumaierSum::new(), NeumaierSum::new());
        for k in -60..=60i64 {
            let p = convolution_pmf(0.2, 0.7, k);
            s1.add(p * k as f64);
            s2.add(p * (k * k) as f64);
        }
        let emp_var = s2.value() - s1.value().powi(2);
        assert!((s1.value() - m).abs() < 1e-10);
        assert!((emp_var - v).abs() < 1e-10);
    }

    #[test]
    fn tail_examples() {
        let unit = SkellamLaw::new(1.0, 1.0).unwrap();
        let t1 = unit.tail(1).unwrap();
        assert!((t1.exact - (1.0 - unit.pmf(0))).abs() < 1e-14);
        let half = SkellamLaw::new(0.5, 0.5).unwrap().tail(10).unwrap();
        assert!(half.exact < 1e-8);
        assert!(half.exact <= half.bound);
        assert_eq!(unit.tail(0), Err(DistError::ZeroTailIndex));
    }

    #[test]
    fn tails_are_monotone_and_bounded_on_grid() {
        for &a in &GRID {
            for &b in &GRID {
                let law = SkellamLaw::new(a, b).unwrap();
                let mut prev = f64::INFINITY;
                for l in 1..=31 {
                    let t = law.tail(l).unwrap();
                    assert!(t.exact <= prev, "a={a} b={b} l={l}");
                    assert!(t.exact <= t.bound, "a={a} b={b} l={l} {t:?}");
                    prev = t.exact;
                }
            }
        }
    }

    #[test]
    fn hellinger_examples() {
        assert_eq!(hellinger_sq_poisson(2.0, 2.0).unwrap(), 0.0);
        let v = hellinger_sq_poisson(1.0, 4.0).unwrap();
        assert!((v - (1.0 - (-0.5f64).exp())).abs() < 1e-15);
        assert!(hellinger_sq_poisson(-1.0, 1.0).is_err());
    }

    fn definitional_hellinger(a: f64, b: f64) -> f64 {
        let (pa, pb) = (poisson_table(a, 81), poisson_table(b, 81));
        0.5 * crate::numeric::neumaier_sum(
            pa.iter()
                .zip(&pb)
                .map(|(x, y)| (x.sqrt() - y.sqrt()).powi(2)),
        )
    }

    #[test]
    fn hellinger_closed_form_matches_definition() {
        let v = hellinger_sq_poisson(0.3, 2.7).unwrap();
        assert!((v - definitional_hellinger(0.3, 2.7)).abs() < 1e-10);
        for &a in &GRID {
            for &b in &GRID {
                let h = hellinger_sq_poisson(a, b).unwrap();
                assert!((h - definitional_hellinger(a, b)).abs() < 1e-10);
                assert_eq!(h, hellinger_sq_poisson(b, a).unwrap());
                assert_eq!(h == 0.0, a == b);
            }
        }
    }

    #[test]
    fn uniform_tail_decay_threshold_exists() {
        for upper in [1.0, 2.0, 5.0] {
            let scan = uniform_tail_decay(upper, 0.25, 50).unwrap();
            let l = scan.threshold.expect("threshold within 50");
            assert!(l <= 50);
        }
    }

    proptest! {
        #[test]
        fn pmf_is_a_probability(a in 0.0f64..8.0, b in 0.0f64..8.0, k in -40i64..40) {
            let p = SkellamLaw::new(a, b).unwrap().pmf(k);
            prop_assert!((0.0..=1.0).contains(&p));
        }

        #[test]
        fn cf_is_bounded(a in 0.0f64..8.0, b in 0.0f64..8.0, t in -10.0f64..10.0) {
            let law = SkellamLaw::new(a, b).unwrap();
            prop_assert!(law.cf(t).norm() <= 1.0 + 1e-15);
        }

        #[test]
        fn swapping_rates_reflects_pmf(a in 0.01f64..6.0, b in 0.01f64..6.0, k in -25i64..25) {
            let p = SkellamLaw::new(a, b).unwrap().pmf(k);
            let q = SkellamLaw::new(b, a).unwrap().pmf(-k);
            prop_assert!((p - q).abs() <= 1e-14 * p.max(1e-300) + 1e-300);
        }

        #[test]
        fn hellinger_in_unit_interval(a in 0.0f64..50.0, b in 0.0f64..50.0) {
            let h = hellinger_sq_poisson(a, b).unwrap();
            prop_assert!((0.0..=1.0).contains(&h));
        }
    }
}
