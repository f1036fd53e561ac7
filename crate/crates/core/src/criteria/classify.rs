//! Verdicts on the Hopf decomposition of the suspension.
//!
//! Exact tests come first (`chi`, limit sets); the two fitted certificates
//! follow. A fitted certificate is issued only when its decisive inequality
//! holds with a margin of three slope standard errors.

use serde::{Deserialize, Serialize};

use super::series::{
    rn_square_integral, unit_series, SeriesKind, SlopeFit, UnitFits, DEFAULT_FIT_EXPONENTS,
    DEFAULT_TOL,
};
use crate::dist::hellinger_sq_poisson;
use crate::intensity::{
    check_condition, chi, limit_sets, ConditionId, ConditionVerdict, IntensityProfile, Interval,
    Tri,
};
use crate::numeric::NeumaierSum;
use crate::{Error, Result};

/// Number of slope standard errors required on the decisive inequality.
pub const MARGIN_SIGMAS: f64 = 3.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Conservative,
    TotallyDissipative,
    Inconclusive,
    NotNonsingular,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    ChiNonzero {
        chi: f64,
    },
    DisjointLimitSets {
        minus: Interval,
        plus: Interval,
    },
    /// `sum_n exp(-H(n)/2)` converges: `H(n) ~ s ln n` with `s/2 > 1`.
    HellingerSeries {
        slope: f64,
        slope_stderr: f64,
        /// `sum_n exp(-(intercept + s ln n)/2)` along the fitted line.
        fitted_sum: f64,
    },
    /// `sum_n n^{-2 beta} exp(I(n))` converges while `sum_n n^-beta` diverges.
    RnWeightedSeries {
        beta: f64,
        slope: f64,
        slope_stderr: f64,
        /// `2 beta - c`; the weighted series converges when it exceeds 1.
        exponent: f64,
        /// `sum_n n^{-2 beta} exp(intercept + c ln n)` along the fitted line.
        fitted_sum: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub verdict: Verdict,
    pub certificate: Option<Certificate>,
    pub profile: IntensityProfile,
    pub nonsingular: ConditionVerdict,
    pub chi: Option<f64>,
    pub fits: Vec<SlopeFit>,
}

/// `sum_{n >= 1} n^-s` for `s > 1`.
fn zeta(s: f64) -> f64 {
    let n0 = 64.0f64;
    let mut acc = NeumaierSum::new();
    for n in 1..64 {
        acc.add((n as f64).powf(-s));
    }
    // Euler-Maclaurin remainder from n0 on
    acc.add(n0.powf(1.0 - s) / (s - 1.0));
    acc.add(0.5 * n0.powf(-s));
    acc.add(s * n0.powf(-s - 1.0) / 12.0);
    acc.add(-s * (s + 1.0) * (s + 2.0) * n0.powf(-s - 3.0) / 720.0);
    acc.value()
}

/// The rn certificate for a fitted slope, if its margin holds.
pub fn rn_certificate(fit: &SlopeFit) -> Option<Certificate> {
    let c = fit.slope;
    let sigma = fit.slope_stderr;
    if c + MARGIN_SIGMAS * sigma >= 1.0 {
        return None;
    }
    let c_eff = c.max(0.0);
    let beta = ((1.0 + c_eff) / 2.0 + (1.0 - c_eff) / 4.0).min(1.0);
    let exponent = 2.0 * beta - c;
    if !(beta <= 1.0 && exponent > 1.0) {
        return None;
    }
    Some(Certificate::RnWeightedSeries {
        beta,
        slope: c,
        slope_stderr: sigma,
        exponent,
        fitted_sum: fit.intercept.exp() * zeta(exponent),
    })
}

/// The Hellinger-series certificate for a fitted slope, if its margin holds.
pub fn hellinger_certificate(fit: &SlopeFit) -> Option<Certificate> {
    let s = fit.slope;
    let sigma = fit.slope_stderr;
    if s - MARGIN_SIGMAS * sigma <= 2.0 {
        return None;
    }
    Some(Certificate::HellingerSeries {
        slope: s,
        slope_stderr: sigma,
        fitted_sum: (-0.5 * fit.intercept).exp() * zeta(0.5 * s),
    })
}

/// Conservativity certificate from the slope of `I(n)` against `ln n`.
pub fn conservativity_certificate(profile: &IntensityProfile) -> Result<ClassificationReport> {
    let fits = UnitFits::compute(profile, DEFAULT_FIT_EXPONENTS, DEFAULT_TOL)?;
    let rn = fits
        .rn
        .as_ref()
        .ok_or_else(|| Error::Precondition("conservativity certificate needs chi = 0".into()))?
        .scaled(profile.total());
    let nonsingular = check_condition(profile, ConditionId::Nonsingular);
    if nonsingular.holds != Tri::Yes {
        return Err(Error::Precondition(
            "the shift is not known to be nonsingular".into(),
        ));
    }
    let certificate = rn_certificate(&rn);
    Ok(ClassificationReport {
        verdict: if certificate.is_some() {
            Verdict::Conservative
        } else {
            Verdict::Inconclusive
        },
        certificate,
        profile: profile.clone(),
        nonsingular,
        chi: chi(profile),
        fits: vec![rn],
    })
}

/// Verdict for `profile` using precomputed unit-intensity fits.
pub fn classify_with(profile: &IntensityProfile, unit: &UnitFits) -> ClassificationReport {
    let nonsingular = check_condition(profile, ConditionId::Nonsingular);
    let chi_value = chi(profile);
    let a = profile.total();
    let fits: Vec<SlopeFit> = unit
        .rn
        .iter()
        .chain(std::iter::once(&unit.hellinger))
        .map(|f| f.scaled(a))
        .collect();
    let report = |verdict, certificate| ClassificationReport {
        verdict,
        certificate,
        profile: profile.clone(),
        nonsingular: nonsingular.clone(),
        chi: chi_value,
        fits: fits.clone(),
    };
    if nonsingular.holds != Tri::Yes {
        return report(Verdict::NotNonsingular, None);
    }
    if let Some(c) = chi_value {
        if c != 0.0 {
            return report(
                Verdict::TotallyDissipative,
                Some(Certificate::ChiNonzero { chi: c }),
            );
        }
    }
    if let Some(ls) = limit_sets(profile) {
        if ls.disjoint() {
            return report(
                Verdict::TotallyDissipative,
                Some(Certificate::DisjointLimitSets {
                    minus: ls.minus,
                    plus: ls.plus,
                }),
            );
        }
    }
    let hellinger = unit.hellinger.scaled(a);
    if let Some(cert) = hellinger_certificate(&hellinger) {
        return report(Verdict::TotallyDissipative, Some(cert));
    }
    if let Some(rn) = unit.rn.as_ref().map(|f| f.scaled(a)) {
        if let Some(cert) = rn_certificate(&rn) {
            return report(Verdict::Conservative, Some(cert));
        }
    }
    report(Verdict::Inconclusive, None)
}

pub fn classify(profile: &IntensityProfile) -> Result<ClassificationReport> {
    let unit = UnitFits::compute(profile, DEFAULT_FIT_EXPONENTS, DEFAULT_TOL)?;
    Ok(classify_with(profile, &unit))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DissipativitySeries {
    pub n: u64,
    pub partial: f64,
    pub convergent: Tri,
    pub fit: SlopeFit,
}

/// `sum_{n <= N} exp(-H(n)/2)` with a convergence verdict from the fitted
/// slope of `H`.
pub fn dissipativity_series(profile: &IntensityProfile, n: u64) -> Result<DissipativitySeries> {
    if check_condition(profile, ConditionId::Nonsingular).holds != Tri::Yes {
        return Err(Error::Precondition(
            "the shift is not known to be nonsingular".into(),
        ));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("N must be positive".into()));
    }
    let a = profile.total();
    let mut partial = NeumaierSum::new();
    let mut bounded = true;
    for k in 1..=n {
        let h = a * unit_series(
            &profile.epsilon,
            SeriesKind::HellingerGrowth,
            k,
            DEFAULT_TOL,
        );
        bounded &= h == 0.0;
        partial.add((-0.5 * h).exp());
    }
    let fit = UnitFits::compute(profile, DEFAULT_FIT_EXPONENTS, DEFAULT_TOL)?
        .hellinger
        .scaled(a);
    bounded &= fit.points.iter().all(|p| p.1 == 0.0);
    let convergent = if hellinger_certificate(&fit).is_some() {
        Tri::Yes
    } else if bounded && profile.epsilon.is_constant() {
        // every term equals 1
        Tri::No
    } else {
        Tri::Undetermined
    };
    Ok(DissipativitySeries {
        n,
        partial: partial.value(),
        convergent,
        fit,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BracketOptions {
    pub t_min: f64,
    pub t_max: f64,
    pub grid_points: usize,
    pub bisect_steps: u32,
}

impl Default for BracketOptions {
    fn default() -> Self {
        Self {
            t_min: 1e-3,
            t_max: 1e3,
            grid_points: 121,
            bisect_steps: 60,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BracketPoint {
    pub t: f64,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    /// Largest scale found with a conservativity certificate.
    pub t_lower: f64,
    /// Smallest scale found with a dissipativity certificate.
    pub t_upper: f64,
    pub lower_report: ClassificationReport,
    pub upper_report: ClassificationReport,
    pub scan: Vec<BracketPoint>,
}

/// Brackets the scale `t` at which the suspension of `t * mu` switches from
/// conservative to totally dissipative, as far as the certificates reach.
pub fn bifurcation_bracket(profile: &IntensityProfile, opts: &BracketOptions) -> Result<Bracket> {
    if !(opts.t_min > 0.0 && opts.t_max > opts.t_min && opts.grid_points >= 2) {
        return Err(Error::InvalidArgument("bad bracket grid".into()));
    }
    let unit = UnitFits::compute(profile, DEFAULT_FIT_EXPONENTS, DEFAULT_TOL)?;
    let at = |t: f64| -> Result<ClassificationReport> {
        let p = profile.clone().with_scale(t)?;
        Ok(classify_with(&p, &unit))
    };
    let ratio = (opts.t_max / opts.t_min).ln() / (opts.grid_points - 1) as f64;
    let mut scan = Vec::with_capacity(opts.grid_points);
    for i in 0..opts.grid_points {
        let t = opts.t_min * (ratio * i as f64).exp();
        scan.push(BracketPoint {
            t,
            verdict: at(t)?.verdict,
        });
    }
    // conservative*, then inconclusive*, then dissipative*
    let rank = |v: Verdict| match v {
        Verdict::Conservative => Some(0),
        Verdict::Inconclusive => Some(1),
        Verdict::TotallyDissipative => Some(2),
        Verdict::NotNonsingular => None,
    };
    let mut last = 0;
    for p in &scan {
        let r = rank(p.verdict).ok_or_else(|| {
            Error::Precondition("the shift is not known to be nonsingular".into())
        })?;
        if r < last {
            return Err(Error::MonotonicityViolated(format!(
                "verdict {:?} at t = {} follows a later regime",
                p.verdict, p.t
            )));
        }
        last = r;
    }
    let last_cons = scan
        .iter()
        .rposition(|p| p.verdict == Verdict::Conservative)
        .ok_or_else(|| Error::Precondition("no conservative scale on the grid".into()))?;
    let first_diss = scan
        .iter()
        .position(|p| p.verdict == Verdict::TotallyDissipative)
        .ok_or_else(|| Error::Precondition("no dissipative scale on the grid".into()))?;
    if last_cons + 1 >= scan.len() || first_diss == 0 {
        return Err(Error::Precondition(
            "the grid does not straddle the transition".into(),
        ));
    }
    let bisect = |mut inside: f64, mut outside: f64, target: Verdict| -> Result<f64> {
        for _ in 0..opts.bisect_steps {
            let mid = (inside * outside).sqrt();
            if at(mid)?.verdict == target {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        Ok(inside)
    };
    let t_lower = bisect(
        scan[last_cons].t,
        scan[last_cons + 1].t,
        Verdict::Conservative,
    )?;
    let t_upper = bisect(
        scan[first_diss].t,
        scan[first_diss - 1].t,
        Verdict::TotallyDissipative,
    )?;
    Ok(Bracket {
        t_lower,
        t_upper,
        lower_report: at(t_lower)?,
        upper_report: at(t_upper)?,
        scan,
    })
}

/// Hellinger-affinity product behind the limit-set criterion, for a shift by
/// `n`: `<U^n 1, 1> = prod_k (1 - H^2(kappa_{k-n}, kappa_k))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffinityBound {
    pub n: u64,
    /// Smallest Hellinger distance between an atom of one limit and an atom
    /// of the other.
    pub delta: f64,
    pub product: f64,
    /// `(1 - delta^2)^{n/3}`.
    pub bound: f64,
    /// Product over the middle third `n/3 < k < 2n/3` of the shifted block.
    pub middle_product: f64,
    pub middle_factors: u64,
    /// `(1 - delta^2)^{middle_factors}`.
    pub middle_bound: f64,
}

/// Evaluates the affinity product for a profile whose limit sets are
/// disjoint. Only atoms with `a_{k-n} != a_k` contribute.
pub fn affinity_bound(profile: &IntensityProfile, n: u64) -> Result<AffinityBound> {
    let ls = limit_sets(profile)
        .ok_or_else(|| Error::Precondition("limit sets are undetermined".into()))?;
    if !ls.disjoint() {
        return Err(Error::Precondition("limit sets are not disjoint".into()));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("shift n must be positive".into()));
    }
    let layout = profile.epsilon.layout();
    let hi = super::series::cutoff_index(&layout, n);
    let ni = n as i64;
    let delta =
        hellinger_sq_poisson(ls.minus.hi.min(ls.plus.lo), ls.minus.hi.max(ls.plus.lo))?.sqrt();
    let mut log_prod = NeumaierSum::new();
    let mut log_mid = NeumaierSum::new();
    let mut middle_factors = 0u64;
    for k in (layout.left_const_until + 1)..=hi {
        let h2 = hellinger_sq_poisson(profile.intensity(k - ni), profile.intensity(k))?;
        let l = (-h2).ln_1p();
        log_prod.add(l);
        if 3 * k > ni && 3 * k < 2 * ni {
            log_mid.add(l);
            middle_factors += 1;
        }
    }
    let log_one_minus = (-delta * delta).ln_1p();
    Ok(AffinityBound {
        n,
        delta,
        product: log_prod.value().exp(),
        bound: (log_one_minus * n as f64 / 3.0).exp(),
        middle_product: log_mid.value().exp(),
        middle_factors,
        middle_bound: (log_one_minus * middle_factors as f64).exp(),
    })
}

/// `rn_square_integral` on a grid, for reports.
pub fn rn_series(profile: &IntensityProfile, ns: &[u64]) -> Result<Vec<(u64, f64)>> {
    ns.iter()
        .map(|&n| Ok((n, rn_square_integral(profile, n, DEFAULT_TOL)?)))
        .collect()
}
