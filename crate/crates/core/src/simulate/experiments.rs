//! Monte Carlo experiments on the weighted differences
//! `X_j = (y_j - x_j) eps_j` with `x_j ~ Poisson(a_j)` and
//! `y_j ~ Poisson(a_0)`, all independent.

use serde::{Deserialize, Serialize};

use super::ks::{ks_normal, KsResult};
use super::rng::{run_samples, PoissonSampler, RngSpec};
use crate::dist::{uniform_tail_decay, SkellamLaw};
use crate::intensity::{check_condition, ConditionId, IntensityProfile, Tri};
use crate::numeric::NeumaierSum;
use crate::{Error, Result};

fn require_regime(profile: &IntensityProfile) -> Result<()> {
    match check_condition(profile, ConditionId::EpsilonRegime).holds {
        Tri::Yes => Ok(()),
        other => Err(Error::Precondition(format!(
            "the epsilon regime (eps vanishing on n <= 1, square-divergent, fourth-power summable) is {other:?}"
        ))),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CltOptions {
    pub checkpoints: Vec<u64>,
    pub samples: usize,
    /// Levels `p` of the events `S_n > -p`.
    pub thresholds: Vec<f64>,
    /// KS test level.
    pub level: f64,
}

impl Default for CltOptions {
    fn default() -> Self {
        Self {
            checkpoints: vec![100, 1_000, 10_000],
            samples: 10_000,
            thresholds: vec![1.0, 5.0, 10.0],
            level: 0.01,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdFrequency {
    pub p: f64,
    pub frequency: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CltRow {
    pub n: u64,
    /// `(sum_{j <= n} eps_j^2)^{-1/2}`.
    pub beta_n: f64,
    /// `beta_n sum_{j <= n} E X_j`.
    pub drift: f64,
    pub mean: f64,
    pub variance: f64,
    /// Monte Carlo standard error of `variance`.
    pub variance_stderr: f64,
    /// Limit variance `2 a`.
    pub limit_variance: f64,
    /// `beta_n^2 sum_{j <= n} eps_j^2 (a_j + a_0)`.
    pub exact_variance: f64,
    pub ks_limit: KsResult,
    pub ks_exact: KsResult,
    pub sum_above: Vec<ThresholdFrequency>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CltSummary {
    pub samples: usize,
    pub rows: Vec<CltRow>,
}

/// Samples `Y_n = beta_n sum_{j <= n} (X_j - E X_j)` at each checkpoint.
pub fn clt_experiment(
    profile: &IntensityProfile,
    opts: &CltOptions,
    rng: &RngSpec,
    workers: Option<usize>,
) -> Result<CltSummary> {
    require_regime(profile)?;
    if opts.checkpoints.is_empty()
        || opts.checkpoints[0] == 0
        || opts.checkpoints.windows(2).any(|w| w[1] <= w[0])
        || opts.samples < 2
    {
        return Err(Error::InvalidArgument(
            "checkpoints must be positive and increasing, samples >= 2".into(),
        ));
    }
    let n_max = *opts.checkpoints.last().unwrap();
    let a0 = profile.total();
    let y = PoissonSampler::new(a0);
    let atoms: Vec<(PoissonSampler, f64)> = (1..=n_max as i64)
        .map(|j| (PoissonSampler::new(profile.intensity(j)), profile.eps(j)))
        .collect();
    let sums = run_samples(rng, opts.samples, workers, |r| {
        let mut s = NeumaierSum::new();
        let mut out = Vec::with_capacity(opts.checkpoints.len());
        let mut next = 0;
        for (j, (x, e)) in atoms.iter().enumerate() {
            if *e != 0.0 {
                let d = y.sample(r) as f64 - x.sample(r) as f64;
                s.add(d * e);
            } else {
                // keep the stream aligned with the atom index
                y.sample(r);
                x.sample(r);
            }
            if (j + 1) as u64 == opts.checkpoints[next] {
                out.push(s.value());
                next += 1;
            }
        }
        out
    });

    let mut rows = Vec::with_capacity(opts.checkpoints.len());
    for (c, &n) in opts.checkpoints.iter().enumerate() {
        let (mut e2, mut mean_x, mut var_x) =
            (NeumaierSum::new(), NeumaierSum::new(), NeumaierSum::new());
        for j in 1..=n as i64 {
            let e = profile.eps(j);
            let aj = profile.intensity(j);
            e2.add(e * e);
            mean_x.add(e * (a0 - aj));
            var_x.add(e * e * (aj + a0));
        }
        let beta_n = e2.value().powf(-0.5);
        let centre = mean_x.value();
        let ys: Vec<f64> = sums.iter().map(|s| beta_n * (s[c] - centre)).collect();
        let m = ys.len() as f64;
        let mean = ys.iter().copied().collect::<NeumaierSum>().value() / m;
        let dev2: f64 = ys
            .iter()
            .map(|v| (v - mean).powi(2))
            .collect::<NeumaierSum>()
            .value();
        let dev4: f64 = ys
            .iter()
            .map(|v| (v - mean).powi(4))
            .collect::<NeumaierSum>()
            .value();
        let variance = dev2 / (m - 1.0);
        let m4 = dev4 / m;
        let variance_stderr = ((m4 - variance * variance).max(0.0) / m).sqrt();
        let exact_variance = beta_n * beta_n * var_x.value();
        let sum_above = opts
            .thresholds
            .iter()
            .map(|&p| ThresholdFrequency {
                p,
                frequency: sums.iter().filter(|s| s[c] > -p).count() as f64 / m,
            })
            .collect();
        rows.push(CltRow {
            n,
            beta_n,
            drift: beta_n * centre,
            mean,
            variance,
            variance_stderr,
            limit_variance: 2.0 * a0,
            exact_variance,
            ks_limit: ks_normal(&ys, 0.0, 2.0 * a0, opts.level),
            ks_exact: ks_normal(&ys, 0.0, exact_variance, opts.level),
            sum_above,
        });
    }
    Ok(CltSummary {
        samples: opts.samples,
        rows,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Claim2Options {
    /// Indices at which the exact tail is compared with `eps_n^4`.
    pub ns: Vec<u64>,
    /// Indices also estimated by Monte Carlo.
    pub mc_ns: Vec<u64>,
    pub samples: usize,
}

impl Default for Claim2Options {
    fn default() -> Self {
        Self {
            ns: vec![100, 1_000, 10_000, 100_000, 1_000_000],
            mc_ns: vec![10, 100],
            samples: 100_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloTail {
    pub frequency: f64,
    pub stderr: f64,
    /// `frequency <= exact + 3 stderr`.
    pub within: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Claim2Row {
    pub n: u64,
    pub eps: f64,
    /// Smallest `|k|` in the event `|y_n - x_n| > |eps_n|^{-1/2}`.
    pub threshold: u32,
    pub exact: f64,
    pub bound: f64,
    pub eps4: f64,
    pub exact_below_eps4: bool,
    pub monte_carlo: Option<MonteCarloTail>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Claim2Summary {
    pub rows: Vec<Claim2Row>,
    /// First tested `n` from which every tested index has `exact < eps^4`.
    pub holds_from: Option<u64>,
    /// Index `L*` from which the uniform tail decay `sup tail(L) <= L^-8`
    /// holds over rates up to the largest rate involved.
    pub uniform_decay_index: Option<u32>,
    /// `n` from which the threshold reaches `L*`, where `exact < eps^4`
    /// follows from the uniform decay.
    pub certified_from: Option<u64>,
}

/// Tail of `y_n - x_n` beyond `|eps_n|^{-1/2}`, exactly and by sampling.
pub fn claim2_decay(
    profile: &IntensityProfile,
    opts: &Claim2Options,
    rng: &RngSpec,
    workers: Option<usize>,
) -> Result<Claim2Summary> {
    require_regime(profile)?;
    let a0 = profile.total();
    let mut all: Vec<u64> = opts.ns.iter().chain(&opts.mc_ns).copied().collect();
    all.sort_unstable();
    all.dedup();
    let mut rows = Vec::with_capacity(all.len());
    let mut max_rate = a0;
    for (i, &n) in all.iter().enumerate() {
        let eps = profile.eps(n as i64);
        if eps == 0.0 {
            return Err(Error::InvalidArgument(format!("eps_{n} = 0")));
        }
        let an = profile.intensity(n as i64);
        max_rate = max_rate.max(an);
        let threshold = (eps.abs().powf(-0.5).floor() as u32) + 1;
        let tail = SkellamLaw::new(a0, an)?.tail(threshold)?;
        let monte_carlo = if opts.mc_ns.contains(&n) {
            let (x, y) = (PoissonSampler::new(an), PoissonSampler::new(a0));
            let stream = RngSpec::new(rng.seed, rng.stream.wrapping_add(i as u32 + 1));
            let hits = run_samples(&stream, opts.samples, workers, |r| {
                let d = y.sample(r) as i64 - x.sample(r) as i64;
                d.unsigned_abs() >= threshold as u64
            });
            let m = opts.samples as f64;
            let frequency = hits.iter().filter(|&&h| h).count() as f64 / m;
            let stderr = (tail.exact * (1.0 - tail.exact) / m).sqrt();
            Some(MonteCarloTail {
                frequency,
                stderr,
                within: frequency <= tail.exact + 3.0 * stderr,
            })
        } else {
            None
        };
        let eps4 = eps.powi(4);
        rows.push(Claim2Row {
            n,
            eps,
            threshold,
            exact: tail.exact,
            bound: tail.bound,
            eps4,
            exact_below_eps4: tail.exact < eps4,
            monte_carlo,
        });
    }
    let tested: Vec<&Claim2Row> = rows.iter().filter(|r| opts.ns.contains(&r.n)).collect();
    let holds_from = tested
        .iter()
        .rposition(|r| !r.exact_below_eps4)
        .map_or(Some(0), |i| Some(i + 1))
        .and_then(|i| tested.get(i).map(|r| r.n));
    let decay = uniform_tail_decay(max_rate.ceil() + 1.0, 0.25, 50)?;
    let certified_from = decay.threshold.and_then(|l| {
        // threshold(n) >= L* once |eps_n|^{-1/2} >= L* - 1
        (1u64..=1u64 << 40).find(|&n| {
            let e = profile.eps(n as i64).abs();
            e > 0.0 && (e.powf(-0.5).floor() as u32) + 1 >= l && n > 1
        })
    });
    Ok(Claim2Summary {
        rows,
        holds_from,
        uniform_decay_index: decay.threshold,
        certified_from,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StoppingOptions {
    pub r: f64,
    pub eps: f64,
    pub m: u64,
    pub n: u64,
    pub samples: usize,
}

impl Default for StoppingOptions {
    fn default() -> Self {
        Self {
            r: -2.0,
            eps: 0.1,
            m: 10_000,
            n: 1_000_000,
            samples: 1_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StoppingSummary {
    pub r: f64,
    pub eps: f64,
    pub m: u64,
    pub n: u64,
    pub samples: usize,
    /// Fraction of samples whose partial sums drop below `r` by `N`.
    pub success_frequency: f64,
    /// Fraction with `max_{M < j <= N} |X_j| < eps`.
    pub small_steps_frequency: f64,
    /// Fraction with crossing, small steps and `S_N < r` together.
    pub all_conditions_frequency: f64,
    /// Successes whose overshoot `|S_l - r|` exceeds `|X_l|`.
    pub overshoot_exceeds_step: usize,
    /// Successes with small steps.
    pub conditional_successes: usize,
    /// Among those, the fraction with overshoot below `eps`.
    pub conditional_overshoot_below_eps: f64,
    pub overshoot_mean: f64,
    pub overshoot_max: f64,
    pub first_crossing_median: Option<f64>,
}

struct Path {
    crossing: Option<(u64, f64, f64)>,
    max_step: f64,
    final_sum: f64,
}

/// First index `l > M` with `sum_{j=M+1}^l X_j < r`, per sample, with the
/// path continued to `N` and the outcome "no crossing by N" kept.
pub fn stopping_time_experiment(
    profile: &IntensityProfile,
    opts: &StoppingOptions,
    rng: &RngSpec,
    workers: Option<usize>,
) -> Result<StoppingSummary> {
    if !(opts.r < -1.0) {
        return Err(Error::InvalidArgument(format!(
            "level r must be below -1, got {}",
            opts.r
        )));
    }
    if !(opts.eps > 0.0) || opts.m >= opts.n || opts.samples == 0 {
        return Err(Error::InvalidArgument(
            "need eps > 0, M < N and at least one sample".into(),
        ));
    }
    require_regime(profile)?;
    let a0 = profile.total();
    let y = PoissonSampler::new(a0);
    let atoms: Vec<(PoissonSampler, f64)> = ((opts.m + 1) as i64..=opts.n as i64)
        .map(|j| (PoissonSampler::new(profile.intensity(j)), profile.eps(j)))
        .collect();
    let paths = run_samples(rng, opts.samples, workers, |r| {
        let mut s = 0.0;
        let mut crossing = None;
        let mut max_step: f64 = 0.0;
        for (i, (x, e)) in atoms.iter().enumerate() {
            let step = (y.sample(r) as f64 - x.sample(r) as f64) * e;
            s += step;
            max_step = max_step.max(step.abs());
            if crossing.is_none() && s < opts.r {
                crossing = Some((opts.m + 1 + i as u64, s, step));
            }
        }
        Path {
            crossing,
            max_step,
            final_sum: s,
        }
    });
    let m = opts.samples as f64;
    let successes: Vec<(&Path, (u64, f64, f64))> = paths
        .iter()
        .filter_map(|p| p.crossing.map(|c| (p, c)))
        .collect();
    let overshoots: Vec<f64> = successes
        .iter()
        .map(|(_, c)| (c.1 - opts.r).abs())
        .collect();
    let overshoot_exceeds_step = successes
        .iter()
        .filter(|(_, c)| (c.1 - opts.r).abs() > c.2.abs())
        .count();
    let conditional: Vec<f64> = successes
        .iter()
        .filter(|(p, _)| p.max_step < opts.eps)
        .map(|(_, c)| (c.1 - opts.r).abs())
        .collect();
    let all_conditions = paths
        .iter()
        .filter(|p| p.crossing.is_some() && p.max_step < opts.eps && p.final_sum < opts.r)
        .count();
    let mut times: Vec<f64> = successes.iter().map(|(_, c)| c.0 as f64).collect();
    times.sort_by(|a, b| a.total_cmp(b));
    Ok(StoppingSummary {
        r: opts.r,
        eps: opts.eps,
        m: opts.m,
        n: opts.n,
        samples: opts.samples,
        success_frequency: successes.len() as f64 / m,
        small_steps_frequency: paths.iter().filter(|p| p.max_step < opts.eps).count() as f64 / m,
        all_conditions_frequency: all_conditions as f64 / m,
        overshoot_exceeds_step,
        conditional_successes: conditional.len(),
        conditional_overshoot_below_eps: if conditional.is_empty() {
            f64::NAN
        } else {
            conditional.iter().filter(|&&o| o < opts.eps).count() as f64 / conditional.len() as f64
        },
        overshoot_mean: if overshoots.is_empty() {
            f64::NAN
        } else {
            overshoots.iter().sum::<f64>() / overshoots.len() as f64
        },
        overshoot_max: overshoots.iter().copied().fold(0.0, f64::max),
        first_crossing_median: (!times.is_empty()).then(|| times[times.len() / 2]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intensity::{EpsilonFamily, Sign};

    fn example() -> IntensityProfile {
        IntensityProfile::inverse_sqrt(1.0).unwrap()
    }

    #[test]
    fn regime_is_required() {
        let zero = IntensityProfile::new(1.0, EpsilonFamily::Zero).unwrap();
        let rng = RngSpec::default();
        assert!(matches!(
            clt_experiment(&zero, &CltOptions::default(), &rng, None),
            Err(Error::Precondition(_))
        ));
        let fast = IntensityProfile::new(
            1.0,
            EpsilonFamily::Power {
                gamma: 1.0,
                sign: Sign::Minus,
            },
        )
        .unwrap();
        assert!(claim2_decay(&fast, &Claim2Options::default(), &rng, None).is_err());
    }

    #[test]
    fn clt_drift_and_variance_are_exact() {
        let opts = CltOptions {
            checkpoints: vec![10, 100],
            samples: 4000,
            ..Default::default()
        };
        let s = clt_experiment(&example(), &opts, &RngSpec::new(2, 0), None).unwrap();
        for row in &s.rows {
            // the sample mean of Y_n is centred and its variance matches the
            // finite-n variance, not yet the limit
            assert!(row.mean.abs() < 4.0 * (row.exact_variance / 4000.0).sqrt());
            assert!((row.variance - row.exact_variance).abs() < 4.0 * row.variance_stderr);
            assert!(row.drift < 0.0);
        }
        assert!(s.rows[1].drift < s.rows[0].drift);
    }

    #[test]
    fn small_threshold_tail_matches_sampling() {
        let opts = Claim2Options {
            ns: vec![10_000],
            mc_ns: vec![10],
            samples: 20_000,
        };
        let s = claim2_decay(&example(), &opts, &RngSpec::new(4, 0), None).unwrap();
        let small = s.rows.iter().find(|r| r.n == 10).unwrap();
        let mc = small.monte_carlo.as_ref().unwrap();
        assert!((mc.frequency - small.exact).abs() < 4.0 * mc.stderr);
        let big = s.rows.iter().find(|r| r.n == 10_000).unwrap();
        assert_eq!(big.threshold, 11);
        assert!(big.exact < 1e-8);
        assert!(big.exact <= big.bound);
    }

    #[test]
    fn stopping_rejects_levels_above_minus_one() {
        let opts = StoppingOptions {
            r: -0.5,
            ..Default::default()
        };
        assert!(matches!(
            stopping_time_experiment(&example(), &opts, &RngSpec::default(), None),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn overshoot_never_exceeds_the_last_step() {
        let opts = StoppingOptions {
            r: -1.5,
            eps: 0.3,
            m: 100,
            n: 20_000,
            samples: 200,
        };
        let s = stopping_time_experiment(&example(), &opts, &RngSpec::new(6, 0), None).unwrap();
        assert!(s.success_frequency > 0.0);
        assert_eq!(s.overshoot_exceeds_step, 0);
        if s.conditional_successes > 0 {
            assert_eq!(s.conditional_overshoot_below_eps, 1.0);
        }
    }
}
