//! The two growth series attached to a shift `T^n` of the base:
//!
//! * `I(n) = sum_m (a_m^3 / a_{m-n}^2 - a_m)`, the exponent of the second
//!   moment of the inverse Radon-Nikodym derivative;
//! * `H(n) = sum_m (sqrt a_m - sqrt a_{m-n})^2`, the squared L2 distance of
//!   `sqrt(d mu o T^n / d mu)` from 1.
//!
//! Both are linear in the total intensity `scale * base`. Terms vanish
//! wherever `eps_m = eps_{m-n}`; for a power tail the sum is taken directly up
//! to a cutoff `K(n)` and the remainder is an Euler-Maclaurin corrected
//! integral of the exact summand, evaluated by adaptive quadrature after a
//! substitution that makes the integrand bounded.

use serde::{Deserialize, Serialize};

use crate::dist::hellinger_sq_poisson;
use crate::intensity::{chi, EpsilonFamily, IntensityProfile, Layout, RightTail};
use crate::numeric::{integrate_adaptive, LineFit, NeumaierSum};
use crate::{Error, Result};

/// Default absolute tolerance of the tail quadrature, at unit intensity.
pub const DEFAULT_TOL: f64 = 1e-13;

/// Default slope-fit grid: `n = 2^4, ..., 2^17`.
pub const DEFAULT_FIT_EXPONENTS: (u32, u32) = (4, 17);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesKind {
    RnSquareIntegral,
    HellingerGrowth,
}

/// Last index at which a summand of either series can be nonzero, or where
/// direct summation hands over to the tail integral.
pub fn cutoff_index(layout: &Layout, n: u64) -> i64 {
    let n = n as i64;
    match layout.right {
        RightTail::ConstantFrom(from) => from - 1 + n,
        RightTail::Power { from, .. } => from + n + 8 * (n + from.abs()) + 64,
    }
}

/// `eps_m - eps_{m-n}`, evaluated without cancellation deep in a power tail.
pub(crate) fn eps_diff(family: &EpsilonFamily, layout: &Layout, m: i64, n: i64) -> f64 {
    match layout.right {
        RightTail::Power { from, gamma, sign } if m - n >= from => {
            power_diff(m as f64, n as f64, gamma, sign)
        }
        _ => family.eps(m) - family.eps(m - n),
    }
}

#[inline]
fn power_diff(x: f64, n: f64, gamma: f64, sign: f64) -> f64 {
    -sign * x.powf(-gamma) * (-gamma * (-n / x).ln_1p()).exp_m1()
}

/// Summand at unit intensity given `eps_m` and `d = eps_m - eps_{m-n}`.
#[inline]
fn summand(kind: SeriesKind, eps_m: f64, d: f64) -> f64 {
    match kind {
        SeriesKind::RnSquareIntegral => eps_m.exp() * (2.0 * d).exp_m1(),
        SeriesKind::HellingerGrowth => (eps_m - d).exp() * (0.5 * d).exp_m1().powi(2),
    }
}

/// Value of a series at unit intensity (`scale * base = 1`).
pub fn unit_series(family: &EpsilonFamily, kind: SeriesKind, n: u64, tol: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let layout = family.layout();
    let k_max = cutoff_index(&layout, n);
    let ni = n as i64;
    let mut acc = NeumaierSum::new();
    for m in (layout.left_const_until + 1)..=k_max {
        acc.add(summand(
            kind,
            family.eps(m),
            eps_diff(family, &layout, m, ni),
        ));
    }
    if let RightTail::Power { gamma, sign, .. } = layout.right {
        acc.add(power_tail(kind, k_max, n as f64, gamma, sign, tol));
    }
    acc.value()
}

/// `sum_{m > k} phi(m)` for a pure power tail, as the midpoint integral
/// `int_{k+1/2}^inf phi` plus `phi'(k+1/2) / 24`.
fn power_tail(kind: SeriesKind, k: i64, n: f64, gamma: f64, sign: f64, tol: f64) -> f64 {
    let phi = |x: f64| summand(kind, sign * x.powf(-gamma), power_diff(x, n, gamma, sign));
    // phi decays like x^-d; x = x0 u^-p with p = 1/(d-1) gives a bounded integrand
    let d = match kind {
        SeriesKind::RnSquareIntegral => 1.0 + gamma,
        SeriesKind::HellingerGrowth => 2.0 + 2.0 * gamma,
    };
    let p = 1.0 / (d - 1.0);
    let x0 = k as f64 + 0.5;
    let integrand = |u: f64| {
        if u <= 0.0 {
            return 0.0;
        }
        let x = x0 * u.powf(-p);
        phi(x) * p * x / u
    };
    let integral = integrate_adaptive(&integrand, 0.0, 1.0, tol);
    let slope = phi(k as f64 + 1.0) - phi(k as f64);
    integral + slope / 24.0
}

fn require_chi_zero(profile: &IntensityProfile) -> Result<()> {
    match chi(profile) {
        Some(0.0) => Ok(()),
        Some(c) => Err(Error::Precondition(format!(
            "the second-moment series needs chi = 0, profile has chi = {c}"
        ))),
        None => Err(Error::Precondition(
            "chi is undetermined for this profile".into(),
        )),
    }
}

/// `int ((d mu / d mu o T^-n)^2 - 1) d mu = a sum_m (e^{3 eps_m - 2 eps_{m-n}} - e^{eps_m})`.
pub fn rn_square_integral(profile: &IntensityProfile, n: u64, tol: f64) -> Result<f64> {
    require_chi_zero(profile)?;
    if n == 0 {
        return Err(Error::InvalidArgument("shift n must be positive".into()));
    }
    let a = profile.total();
    Ok(a * unit_series(&profile.epsilon, SeriesKind::RnSquareIntegral, n, tol / a))
}

/// `|| sqrt(d mu o T^n / d mu) - 1 ||_2^2 = sum_m (sqrt a_m - sqrt a_{m-n})^2`.
pub fn hellinger_growth(profile: &IntensityProfile, n: u64, tol: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("shift n must be positive".into()));
    }
    let a = profile.total();
    Ok(a * unit_series(&profile.epsilon, SeriesKind::HellingerGrowth, n, tol / a))
}

/// `sum_{|k| <= N} 2 H^2(kappa_k, kappa_{k+1})`.
pub fn nonsingularity_deficit(profile: &IntensityProfile, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be positive".into()));
    }
    let n = n as i64;
    let mut acc = NeumaierSum::new();
    for k in -n..=n {
        acc.add(2.0 * hellinger_sq_poisson(profile.intensity(k), profile.intensity(k + 1))?);
    }
    Ok(acc.value())
}

/// Least-squares fit of a series against `ln n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub kind: SeriesKind,
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
    pub slope_stderr: f64,
    pub n_range: (u64, u64),
    pub points: Vec<(u64, f64)>,
}

impl SlopeFit {
    fn from_points(kind: SeriesKind, points: Vec<(u64, f64)>) -> Result<Self> {
        let xy: Vec<_> = points.iter().map(|&(n, y)| ((n as f64).ln(), y)).collect();
        let fit = LineFit::fit(&xy)
            .ok_or_else(|| Error::InvalidArgument("slope fit needs two distinct n".into()))?;
        Ok(Self {
            kind,
            slope: fit.slope,
            intercept: fit.intercept,
            residual: fit.residual,
            slope_stderr: fit.slope_stderr,
            n_range: (points[0].0, points[points.len() - 1].0),
            points,
        })
    }

    /// The fit of the same series at `c` times the intensity.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            kind: self.kind,
            slope: self.slope * c,
            intercept: self.intercept * c,
            residual: self.residual * c,
            slope_stderr: self.slope_stderr * c,
            n_range: self.n_range,
            points: self.points.iter().map(|&(n, y)| (n, y * c)).collect(),
        }
    }
}

pub fn dyadic_grid(exponents: (u32, u32)) -> Vec<u64> {
    (exponents.0..=exponents.1).map(|e| 1u64 << e).collect()
}

/// Slope of `kind` against `ln n` over `n = 2^lo, ..., 2^hi`.
pub fn fit_slope(
    profile: &IntensityProfile,
    kind: SeriesKind,
    exponents: (u32, u32),
    tol: f64,
) -> Result<SlopeFit> {
    if kind == SeriesKind::RnSquareIntegral {
        require_chi_zero(profile)?;
    }
    let unit = UnitFits::fit_one(&profile.epsilon, kind, exponents, tol / profile.total())?;
    Ok(unit.scaled(profile.total()))
}

/// Both fits at unit intensity; every scale of a family reuses them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitFits {
    pub rn: Option<SlopeFit>,
    pub hellinger: SlopeFit,
}

impl UnitFits {
    fn fit_one(
        family: &EpsilonFamily,
        kind: SeriesKind,
        exponents: (u32, u32),
        tol: f64,
    ) -> Result<SlopeFit> {
        let pts: Vec<_> = dyadic_grid(exponents)
            .into_iter()
            .map(|n| (n, unit_series(family, kind, n, tol)))
            .collect();
        SlopeFit::from_points(kind, pts)
    }

    /// The rn fit is omitted when `chi != 0`.
    pub fn compute(profile: &IntensityProfile, exponents: (u32, u32), tol: f64) -> Result<Self> {
        let rn = match chi(profile) {
            Some(0.0) => Some(Self::fit_one(
                &profile.epsilon,
                SeriesKind::RnSquareIntegral,
                exponents,
                tol,
            )?),
            _ => None,
        };
        let hellinger = Self::fit_one(
            &profile.epsilon,
            SeriesKind::HellingerGrowth,
            exponents,
            tol,
        )?;
        Ok(Self { rn, hellinger })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intensity::Sign;

    fn example(a: f64) -> IntensityProfile {
        IntensityProfile::inverse_sqrt(a).unwrap()
    }

    // Reference values at unit intensity for eps_n = -n^{-1/2}, from a
    // 40-digit evaluation with a wide direct sum and an Euler-Maclaurin tail.
    const RN_UNIT: [(u64, f64); 3] = [
        (1, 0.6977034014724896),
        (10, 4.543884124817218),
        (100, 14.401423866633936),
    ];
    const HG_UNIT: [(u64, f64); 3] = [
        (1, 0.09308748085274061),
        (10, 0.47752890413541383),
        (100, 1.261363803468072),
    ];

    #[test]
    fn zero_family_series_vanish() {
        let p = IntensityProfile::new(1.0, EpsilonFamily::Zero).unwrap();
        for n in [1, 7, 100] {
            assert_eq!(rn_square_integral(&p, n, DEFAULT_TOL).unwrap(), 0.0);
            assert_eq!(hellinger_growth(&p, n, DEFAULT_TOL).unwrap(), 0.0);
        }
        assert_eq!(nonsingularity_deficit(&p, 50).unwrap(), 0.0);
    }

    #[test]
    fn matches_high_precision_reference() {
        let p = example(1.0);
        for (n, v) in RN_UNIT {
            let got = rn_square_integral(&p, n, DEFAULT_TOL).unwrap();
            assert!((got - v).abs() < 1e-10, "rn({n}) = {got}, want {v}");
        }
        for (n, v) in HG_UNIT {
            let got = hellinger_growth(&p, n, DEFAULT_TOL).unwrap();
            assert!((got - v).abs() < 1e-10, "H({n}) = {got}, want {v}");
        }
        let small = rn_square_integral(&example(0.1), 10, DEFAULT_TOL).unwrap();
        assert!((small - 0.4543884124817218).abs() < 1e-8);
    }

    #[test]
    fn cutoff_does_not_move_the_value() {
        // a brute-force sum over a much wider window plus the same tail
        // treatment has to agree with the default cutoff
        let fam = EpsilonFamily::inverse_sqrt();
        let layout = fam.layout();
        for kind in [SeriesKind::RnSquareIntegral, SeriesKind::HellingerGrowth] {
            let n = 10u64;
            let wide = 200_000i64;
            let mut acc = NeumaierSum::new();
            for m in 2..=wide {
                acc.add(summand(kind, fam.eps(m), fam.eps(m) - fam.eps(m - 10)));
            }
            acc.add(power_tail(kind, wide, n as f64, 0.5, -1.0, 1e-15));
            let direct = acc.value();
            let _ = layout;
            let engine = unit_series(&fam, kind, n, DEFAULT_TOL);
            assert!(
                (direct - engine).abs() < 1e-10,
                "{kind:?}: {direct} vs {engine}"
            );
        }
    }

    #[test]
    fn step_hellinger_growth_is_linear() {
        let p = IntensityProfile::new(
            1.0,
            EpsilonFamily::Step {
                left: 0.0,
                right: 2f64.ln(),
            },
        )
        .unwrap();
        let per_atom = (2f64.sqrt() - 1.0).powi(2);
        for n in [1u64, 5, 40] {
            let h = hellinger_growth(&p, n, DEFAULT_TOL).unwrap();
            assert!((h - n as f64 * per_atom).abs() < 1e-12);
        }
        assert!(matches!(
            rn_square_integral(&p, 3, DEFAULT_TOL),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn deficit_matches_definition() {
        let p = example(1.0);
        let mut prev = 0.0;
        for n in [10u64, 100, 1000] {
            let d = nonsingularity_deficit(&p, n).unwrap();
            let mut oracle = 0.0;
            for k in -(n as i64)..=(n as i64) {
                let (x, y) = (p.intensity(k).sqrt(), p.intensity(k + 1).sqrt());
                oracle += 2.0 * (1.0 - (-0.5 * (x - y).powi(2)).exp());
            }
            assert!((d - oracle).abs() < 1e-12);
            assert!(d >= prev);
            prev = d;
        }
        // (sqrt a_n - sqrt a_{n+1})^2 ~ n^-3 / 16: the series is bounded
        assert!(prev < 0.1);
    }

    #[test]
    fn series_are_nonnegative_and_nondecreasing() {
        let p = example(0.5);
        for kind in [SeriesKind::RnSquareIntegral, SeriesKind::HellingerGrowth] {
            let mut prev = 0.0;
            for n in dyadic_grid((0, 12)) {
                let v = 0.5 * unit_series(&p.epsilon, kind, n, DEFAULT_TOL);
                assert!(v >= prev, "{kind:?} at {n}");
                prev = v;
            }
        }
    }

    #[test]
    fn fits_scale_linearly() {
        let unit = UnitFits::compute(&example(1.0), (4, 10), DEFAULT_TOL).unwrap();
        let direct = fit_slope(
            &example(2.0),
            SeriesKind::HellingerGrowth,
            (4, 10),
            DEFAULT_TOL,
        )
        .unwrap();
        let scaled = unit.hellinger.scaled(2.0);
        assert!((direct.slope - scaled.slope).abs() < 1e-10);
        assert!((direct.intercept - scaled.intercept).abs() < 1e-10);
    }

    #[test]
    fn faster_power_decay_has_bounded_rn_integral() {
        let p = IntensityProfile::new(
            1.0,
            EpsilonFamily::Power {
                gamma: 1.0,
                sign: Sign::Minus,
            },
        )
        .unwrap();
        // increments of I along a dyadic grid shrink geometrically
        let vals: Vec<_> = dyadic_grid((10, 16))
            .into_iter()
            .map(|n| rn_square_integral(&p, n, DEFAULT_TOL).unwrap())
            .collect();
        let inc: Vec<_> = vals.windows(2).map(|w| w[1] - w[0]).collect();
        assert!(inc.windows(2).all(|w| w[1] < 0.75 * w[0]), "{vals:?}");
        assert!(inc[inc.len() - 1] < 1e-3);
    }
}
