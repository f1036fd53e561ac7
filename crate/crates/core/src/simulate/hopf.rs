//! Hopf-sum diagnostics. Finite partial sums cannot certify conservativity,
//! so every output produced here carries the `HEURISTIC` label.

use std::sync::Arc;

use rand::Rng;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::rn::{log_rn_derivative, required_range, ConfigurationWindow};
use super::rng::{run_samples, PoissonSampler, RngSpec};
use crate::criteria::series::{unit_series, SeriesKind, DEFAULT_TOL};
use crate::criteria::DEFAULT_FIT_EXPONENTS;
use crate::criteria::{classify, classify_with, Certificate, UnitFits, Verdict};
use crate::intensity::{chi, IntensityProfile};
use crate::numeric::{LineFit, NeumaierSum};
use crate::{Error, Result};

pub const HEURISTIC: &str = "HEURISTIC";

/// Agreement required between the batched and the direct cocycle.
const BATCH_CHECK_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HopfCheckpoint {
    pub n: u64,
    pub mean: f64,
    pub q10: f64,
    pub median: f64,
    pub q90: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventRow {
    pub n: u64,
    /// Empirical frequency of `R_n < n^-beta`.
    pub frequency: f64,
    /// `n^{-2 beta} exp(I(n))`, when `I` is defined.
    pub bound: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HopfSummary {
    pub label: String,
    pub n: u64,
    pub samples: usize,
    pub beta: f64,
    pub window: (i64, i64),
    pub checkpoints: Vec<HopfCheckpoint>,
    /// Slope of `ln median S_n` against `ln n` over `[N/16, N]`.
    pub growth_exponent: f64,
    pub events: Vec<EventRow>,
    /// Number of `n` with frequency above its bound.
    pub bound_violations: Option<usize>,
    /// Largest gap between batched and direct `log R_n` on a probe sample.
    pub batch_check_error: f64,
}

/// Precomputed pieces shared by all samples of one run.
struct Plan {
    n_max: usize,
    lo: i64,
    samplers: Vec<PoissonSampler>,
    eps: Vec<f64>,
    det: Vec<f64>,
    len: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    eps_hat: Vec<Complex64>,
}

impl Plan {
    fn new(profile: &IntensityProfile, n_max: u64) -> Self {
        let (lo, hi) = required_range(profile, n_max);
        let n = n_max as usize;
        let width = (hi - lo + 1) as usize;
        let samplers = (lo..=hi)
            .map(|k| PoissonSampler::new(profile.intensity(k)))
            .collect();
        let eps: Vec<f64> = (lo..=hi).map(|k| profile.eps(k)).collect();
        // D_n = sum_{k in W} (a_k - a_{k-n}), updated one atom at a time
        let mut det = Vec::with_capacity(n + 1);
        let mut acc = NeumaierSum::new();
        det.push(0.0);
        for m in 1..=n_max as i64 {
            acc.add(profile.intensity(hi - m + 1));
            acc.add(-profile.intensity(lo - m));
            det.push(acc.value());
        }
        let len = (width + n).next_power_of_two();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(len);
        let inv = planner.plan_fft_inverse(len);
        // e[j] = eps_{lo - N + j}
        let mut eps_hat: Vec<Complex64> = (0..len)
            .map(|j| {
                if j < width + n {
                    Complex64::new(profile.eps(lo - n_max as i64 + j as i64), 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        fwd.process(&mut eps_hat);
        Self {
            n_max: n,
            lo,
            samplers,
            eps,
            det,
            len,
            fwd,
            inv,
            eps_hat,
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> ConfigurationWindow {
        ConfigurationWindow {
            offset: self.lo,
            counts: self.samplers.iter().map(|s| s.sample(rng)).collect(),
        }
    }

    /// `log R_n(omega)` for `n = 1..=N` through one cross-correlation.
    fn log_rn_all(&self, omega: &ConfigurationWindow) -> Vec<f64> {
        let mut buf = vec![Complex64::new(0.0, 0.0); self.len];
        let mut p = NeumaierSum::new();
        for (i, (&w, &e)) in omega.counts.iter().zip(&self.eps).enumerate() {
            buf[i].re = w as f64;
            p.add(w as f64 * e);
        }
        self.fwd.process(&mut buf);
        for (b, e) in buf.iter_mut().zip(&self.eps_hat) {
            *b = b.conj() * e;
        }
        self.inv.process(&mut buf);
        let scale = 1.0 / self.len as f64;
        let p = p.value();
        (1..=self.n_max)
            .map(|n| self.det[n] + buf[self.n_max - n].re * scale - p)
            .collect()
    }
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    if i + 1 < sorted.len() {
        sorted[i] + frac * (sorted[i + 1] - sorted[i])
    } else {
        sorted[i]
    }
}

fn checkpoints(n_max: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (0..)
        .map(|e| 1u64 << e)
        .take_while(|&c| c < n_max)
        .collect();
    out.push(n_max);
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HopfOptions {
    pub n: u64,
    pub samples: usize,
    /// Exponent of the event threshold `n^-beta`; taken from the
    /// conservativity certificate when absent, else 1.
    #[serde(default)]
    pub beta: Option<f64>,
}

impl Default for HopfOptions {
    fn default() -> Self {
        Self {
            n: 1024,
            samples: 1000,
            beta: None,
        }
    }
}

struct Run {
    checkpoints: Vec<HopfCheckpoint>,
    growth_exponent: f64,
    event_counts: Vec<u64>,
    batch_check_error: f64,
}

fn run(
    profile: &IntensityProfile,
    n_max: u64,
    samples: usize,
    beta: f64,
    rng: &RngSpec,
    workers: Option<usize>,
) -> Result<Run> {
    if n_max < 16 || samples == 0 {
        return Err(Error::InvalidArgument(
            "Hopf diagnostics need N >= 16 and at least one sample".into(),
        ));
    }
    let plan = Plan::new(profile, n_max);
    let cps = checkpoints(n_max);
    let thresholds: Vec<f64> = (1..=n_max).map(|n| -beta * (n as f64).ln()).collect();
    let per_sample = run_samples(rng, samples, workers, |r| {
        let omega = plan.sample(r);
        let logs = plan.log_rn_all(&omega);
        let mut s = NeumaierSum::new();
        let mut at = Vec::with_capacity(cps.len());
        let mut next = 0;
        let mut events = Vec::new();
        for (i, &l) in logs.iter().enumerate() {
            s.add(l.exp());
            if l < thresholds[i] {
                events.push(i as u32);
            }
            if next < cps.len() && cps[next] == (i + 1) as u64 {
                at.push(s.value());
                next += 1;
            }
        }
        (at, events)
    });

    let probe = plan.sample(&mut rng.chunk_rng(0));
    let batched = plan.log_rn_all(&probe);
    let mut batch_check_error: f64 = 0.0;
    for n in [1, n_max / 2, n_max] {
        let direct = log_rn_derivative(profile, &probe, n)?;
        batch_check_error = batch_check_error.max((direct - batched[n as usize - 1]).abs());
    }
    if batch_check_error > BATCH_CHECK_TOL {
        return Err(Error::Internal(format!(
            "batched log R_n differs from the direct sum by {batch_check_error}"
        )));
    }

    let mut event_counts = vec![0u64; n_max as usize];
    for (_, ev) in &per_sample {
        for &i in ev {
            event_counts[i as usize] += 1;
        }
    }
    let mut rows = Vec::with_capacity(cps.len());
    for (j, &n) in cps.iter().enumerate() {
        let mut v: Vec<f64> = per_sample.iter().map(|s| s.0[j]).collect();
        v.sort_by(|a, b| a.total_cmp(b));
        rows.push(HopfCheckpoint {
            n,
            mean: v.iter().copied().collect::<NeumaierSum>().value() / v.len() as f64,
            q10: quantile(&v, 0.1),
            median: quantile(&v, 0.5),
            q90: quantile(&v, 0.9),
        });
    }
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|c| 16 * c.n >= n_max)
        .map(|c| ((c.n as f64).ln(), c.median.ln()))
        .collect();
    let growth_exponent = LineFit::fit(&pts).map_or(f64::NAN, |f| f.slope);
    Ok(Run {
        checkpoints: rows,
        growth_exponent,
        event_counts,
        batch_check_error,
    })
}

/// Partial Hopf sums `sum_{n <= N} R_n(omega)` and the events `R_n < n^-beta`
/// over sampled configurations.
pub fn hopf_diagnostic(
    profile: &IntensityProfile,
    opts: &HopfOptions,
    rng: &RngSpec,
    workers: Option<usize>,
) -> Result<HopfSummary> {
    let beta = match opts.beta {
        Some(b) => b,
        None => match classify(profile)?.certificate {
            Some(Certificate::RnWeightedSeries { beta, .. }) => beta,
            _ => 1.0,
        },
    };
    let run = run(profile, opts.n, opts.samples, beta, rng, workers)?;
    let rn_defined = matches!(chi(profile), Some(c) if c == 0.0);
    let a = profile.total();
    let events: Vec<EventRow> = run
        .event_counts
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let n = i as u64 + 1;
            let bound = rn_defined.then(|| {
                let i_n = a * unit_series(
                    &profile.epsilon,
                    SeriesKind::RnSquareIntegral,
                    n,
                    DEFAULT_TOL,
                );
                (n as f64).powf(-2.0 * beta) * i_n.exp()
            });
            EventRow {
                n,
                frequency: c as f64 / opts.samples as f64,
                bound,
            }
        })
        .collect();
    let bound_violations = rn_defined.then(|| {
        events
            .iter()
            .filter(|e| e.bound.is_some_and(|b| e.frequency > b))
            .count()
    });
    Ok(HopfSummary {
        label: HEURISTIC.into(),
        n: opts.n,
        samples: opts.samples,
        beta,
        window: required_range(profile, opts.n),
        checkpoints: run.checkpoints,
        growth_exponent: run.growth_exponent,
        events,
        bound_violations,
        batch_check_error: run.batch_check_error,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub t: f64,
    pub growth_exponent: f64,
    pub median_final: f64,
    /// Certificate-backed verdict at this scale.
    pub certified: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub label: String,
    pub n: u64,
    pub samples: usize,
    pub rows: Vec<ScanRow>,
    /// True when the growth exponent never increases along the grid.
    pub monotone: bool,
    pub anomaly: bool,
    pub anomalies: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanOptions {
    pub t_grid: Vec<f64>,
    pub n: u64,
    pub samples: usize,
    /// Increase of the growth exponent tolerated before flagging an anomaly.
    pub tolerance: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            t_grid: vec![0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 4.0, 8.0],
            n: 1024,
            samples: 200,
            tolerance: 0.05,
        }
    }
}

/// Hopf growth exponent along a grid of scales. The same random stream is
/// used at every scale, so with inversion sampling the configurations are
/// coupled monotonically in `t`.
pub fn scan_intensity(
    profile: &IntensityProfile,
    opts: &ScanOptions,
    rng: &RngSpec,
    workers: Option<usize>,
) -> Result<ScanSummary> {
    if opts.t_grid.is_empty() || opts.t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "t_grid must be nonempty and strictly increasing".into(),
        ));
    }
    let unit = UnitFits::compute(profile, DEFAULT_FIT_EXPONENTS, DEFAULT_TOL)?;
    let mut rows = Vec::with_capacity(opts.t_grid.len());
    for &t in &opts.t_grid {
        let p = profile.clone().with_scale(t)?;
        let r = run(&p, opts.n, opts.samples, 1.0, rng, workers)?;
        rows.push(ScanRow {
            t,
            growth_exponent: r.growth_exponent,
            median_final: r.checkpoints.last().map_or(f64::NAN, |c| c.median),
            certified: classify_with(&p, &unit).verdict,
        });
    }
    let mut anomalies = Vec::new();
    let mut monotone = true;
    for w in rows.windows(2) {
        let rise = w[1].growth_exponent - w[0].growth_exponent;
        if rise > 0.0 {
            monotone = false;
        }
        if rise > opts.tolerance {
            anomalies.push(format!(
                "growth exponent rises from {} at t = {} to {} at t = {}",
                w[0].growth_exponent, w[0].t, w[1].growth_exponent, w[1].t
            ));
        }
    }
    Ok(ScanSummary {
        label: HEURISTIC.into(),
        n: opts.n,
        samples: opts.samples,
        rows,
        monotone,
        anomaly: !anomalies.is_empty(),
        anomalies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intensity::EpsilonFamily;

    #[test]
    fn zero_family_sums_equal_n() {
        let p = IntensityProfile::new(1.0, EpsilonFamily::Zero).unwrap();
        let opts = HopfOptions {
            n: 64,
            samples: 10,
            beta: Some(1.0),
        };
        let s = hopf_diagnostic(&p, &opts, &RngSpec::new(1, 0), Some(1)).unwrap();
        for c in &s.checkpoints {
            assert_eq!(c.median, c.n as f64);
            assert_eq!(c.q10, c.n as f64);
        }
        assert!((s.growth_exponent - 1.0).abs() < 1e-12);
        assert!(s.events.iter().all(|e| e.frequency == 0.0));
        assert_eq!(s.label, HEURISTIC);
    }

    #[test]
    fn batched_cocycle_matches_direct_sum() {
        let p = IntensityProfile::inverse_sqrt(0.7).unwrap();
        let plan = Plan::new(&p, 40);
        let omega = plan.sample(&mut RngSpec::new(3, 1).chunk_rng(0));
        let all = plan.log_rn_all(&omega);
        for n in 1..=40u64 {
            let direct = log_rn_derivative(&p, &omega, n).unwrap();
            assert!((direct - all[n as usize - 1]).abs() < 1e-9, "n = {n}");
        }
    }

    #[test]
    fn reproducible_for_fixed_stream() {
        let p = IntensityProfile::inverse_sqrt(1.0).unwrap();
        let opts = HopfOptions {
            n: 32,
            samples: 70,
            beta: Some(1.0),
        };
        let a = hopf_diagnostic(&p, &opts, &RngSpec::new(5, 2), Some(1)).unwrap();
        let b = hopf_diagnostic(&p, &opts, &RngSpec::new(5, 2), Some(3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn markov_events_respect_the_bound() {
        let p = IntensityProfile::inverse_sqrt(0.1).unwrap();
        let opts = HopfOptions {
            n: 64,
            samples: 2000,
            beta: None,
        };
        let s = hopf_diagnostic(&p, &opts, &RngSpec::new(12, 0), None).unwrap();
        assert!(s.beta > 0.5 && s.beta <= 1.0);
        assert_eq!(s.bound_violations, Some(0));
    }
}
