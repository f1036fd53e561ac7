//! Intensity profiles `a_n = scale * base * exp(eps_n)` on the integers.
//!
//! Convergence of the infinite series attached to a profile is never decided
//! from partial sums. Built-in families carry exact classifications; a
//! tabulated family inherits the classification of its declared tail, and is
//! `Undetermined` without one. Partial sums are still attached to every
//! verdict so that reports can be audited.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::NeumaierSum;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProfileError {
    #[error("base intensity must be positive and finite, got {0}")]
    InvalidBase(f64),
    #[error("scale must be positive and finite, got {0}")]
    InvalidScale(f64),
    #[error("power family exponent must be positive and finite, got {0}")]
    InvalidGamma(f64),
    #[error("epsilon value {value} at index {index} is not finite")]
    NonFiniteEpsilon { index: i64, value: f64 },
    #[error("index {0} appears twice in the explicit table")]
    DuplicateIndex(i64),
    #[error("the tail of an explicit family must be a zero, power or step family")]
    NestedExplicit,
    #[error("step levels must be finite")]
    InvalidStep,
}

/// Sign of a power family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

impl TryFrom<i8> for Sign {
    type Error = String;
    fn try_from(v: i8) -> Result<Self, Self::Error> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            other => Err(format!("sign must be 1 or -1, got {other}")),
        }
    }
}

impl From<Sign> for i8 {
    fn from(s: Sign) -> i8 {
        match s {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

/// The perturbation sequence `eps_n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EpsilonFamily {
    /// `eps_n = 0` everywhere.
    Zero,
    /// `eps_n = sign * n^-gamma` for `n > 1`, zero for `n <= 1`.
    Power { gamma: f64, sign: Sign },
    /// `eps_n = left` for `n <= 0` and `eps_n = right` for `n >= 1`.
    Step { left: f64, right: f64 },
    /// Finitely many tabulated values; every other index follows `tail`, or
    /// is zero when no tail is declared.
    Explicit {
        table: Vec<(i64, f64)>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tail: Option<Box<EpsilonFamily>>,
    },
}

/// How a family behaves to the right of its irregular part.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RightTail {
    /// `eps_n` equals its right limit for every `n >= from`.
    ConstantFrom(i64),
    /// `eps_n = sign * n^-gamma` for every `n >= from`.
    Power { from: i64, gamma: f64, sign: f64 },
}

/// Where a family deviates from its limits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Layout {
    /// `eps_n` equals its left limit for every `n <= left_const_until`.
    pub left_const_until: i64,
    pub right: RightTail,
}

impl EpsilonFamily {
    /// Example family `eps_n = -n^{-1/2}` for `n > 1`.
    pub fn inverse_sqrt() -> Self {
        EpsilonFamily::Power {
            gamma: 0.5,
            sign: Sign::Minus,
        }
    }

    pub fn validate(&self) -> Result<(), ProfileError> {
        match self {
            EpsilonFamily::Zero => Ok(()),
            EpsilonFamily::Power { gamma, .. } => {
                if gamma.is_finite() && *gamma > 0.0 {
                    Ok(())
                } else {
                    Err(ProfileError::InvalidGamma(*gamma))
                }
            }
            EpsilonFamily::Step { left, right } => {
                if left.is_finite() && right.is_finite() {
                    Ok(())
                } else {
                    Err(ProfileError::InvalidStep)
                }
            }
            EpsilonFamily::Explicit { table, tail } => {
                let mut seen = std::collections::BTreeSet::new();
                for &(index, value) in table {
                    if !value.is_finite() {
                        return Err(ProfileError::NonFiniteEpsilon { index, value });
                    }
                    if !seen.insert(index) {
                        return Err(ProfileError::DuplicateIndex(index));
                    }
                }
                match tail.as_deref() {
                    Some(EpsilonFamily::Explicit { .. }) => Err(ProfileError::NestedExplicit),
                    Some(t) => t.validate(),
                    None => Ok(()),
                }
            }
        }
    }

    pub fn eps(&self, n: i64) -> f64 {
        match self {
            EpsilonFamily::Zero => 0.0,
            EpsilonFamily::Power { gamma, sign } => {
                if n > 1 {
                    sign.as_f64() * (n as f64).powf(-gamma)
                } else {
                    0.0
                }
            }
            EpsilonFamily::Step { left, right } => {
                if n <= 0 {
                    *left
                } else {
                    *right
                }
            }
            EpsilonFamily::Explicit { table, tail } => table
                .iter()
                .find(|(i, _)| *i == n)
                .map(|(_, v)| *v)
                .unwrap_or_else(|| tail.as_ref().map_or(0.0, |t| t.eps(n))),
        }
    }

    /// Limits of `eps_n` as `n -> -inf` and `n -> +inf`, when declared.
    pub fn limits(&self) -> Option<(f64, f64)> {
        match self {
            EpsilonFamily::Zero | EpsilonFamily::Power { .. } => Some((0.0, 0.0)),
            EpsilonFamily::Step { left, right } => Some((*left, *right)),
            EpsilonFamily::Explicit { tail, .. } => tail.as_ref().and_then(|t| t.limits()),
        }
    }

    /// True when `eps_n` takes one value for every `n`.
    pub fn is_constant(&self) -> bool {
        match self {
            EpsilonFamily::Zero => true,
            EpsilonFamily::Power { .. } => false,
            EpsilonFamily::Step { left, right } => left == right,
            EpsilonFamily::Explicit { table, tail } => match tail.as_deref() {
                Some(t) if t.is_constant() => {
                    let v = t.eps(0);
                    table.iter().all(|e| e.1 == v)
                }
                _ => false,
            },
        }
    }

    pub fn layout(&self) -> Layout {
        match self {
            EpsilonFamily::Zero => Layout {
                left_const_until: 0,
                right: RightTail::ConstantFrom(1),
            },
            EpsilonFamily::Power { gamma, sign } => Layout {
                left_const_until: 1,
                right: RightTail::Power {
                    from: 2,
                    gamma: *gamma,
                    sign: sign.as_f64(),
                },
            },
            EpsilonFamily::Step { .. } => Layout {
                left_const_until: 0,
                right: RightTail::ConstantFrom(1),
            },
            EpsilonFamily::Explicit { table, tail } => {
                let base = tail.as_ref().map_or(
                    Layout {
                        left_const_until: 0,
                        right: RightTail::ConstantFrom(1),
                    },
                    |t| t.layout(),
                );
                let lo = table.iter().map(|e| e.0).min();
                let hi = table.iter().map(|e| e.0).max();
                match (lo, hi) {
                    (Some(lo), Some(hi)) => Layout {
                        left_const_until: base.left_const_until.min(lo - 1),
                        right: match base.right {
                            RightTail::ConstantFrom(f) => RightTail::ConstantFrom(f.max(hi + 1)),
                            RightTail::Power { from, gamma, sign } => RightTail::Power {
                                from: from.max(hi + 1),
                                gamma,
                                sign,
                            },
                        },
                    },
                    _ => base,
                }
            }
        }
    }
}

impl fmt::Display for EpsilonFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EpsilonFamily::Zero => write!(f, "zero"),
            EpsilonFamily::Power { gamma, sign } => {
                write!(f, "power(gamma={gamma}, sign={})", i8::from(*sign))
            }
            EpsilonFamily::Step { left, right } => write!(f, "step(left={left}, right={right})"),
            EpsilonFamily::Explicit { table, tail } => {
                write!(f, "explicit({} entries", table.len())?;
                match tail {
                    Some(t) => write!(f, ", tail={t})"),
                    None => write!(f, ", no tail)"),
                }
            }
        }
    }
}

fn default_scale() -> f64 {
    1.0
}

/// `a_n = scale * base * exp(eps_n)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntensityProfile {
    pub base: f64,
    #[serde(default = "default_scale")]
    pub scale: f64,
    pub epsilon: EpsilonFamily,
}

impl IntensityProfile {
    pub fn new(base: f64, epsilon: EpsilonFamily) -> Result<Self, ProfileError> {
        let p = Self {
            base,
            scale: 1.0,
            epsilon,
        };
        p.validate()?;
        Ok(p)
    }

    /// The worked example: `eps_n = -n^{-1/2}` for `n > 1`.
    pub fn inverse_sqrt(base: f64) -> Result<Self, ProfileError> {
        Self::new(base, EpsilonFamily::inverse_sqrt())
    }

    pub fn with_scale(mut self, scale: f64) -> Result<Self, ProfileError> {
        self.scale = scale;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), ProfileError> {
        if !(self.base.is_finite() && self.base > 0.0) {
            return Err(ProfileError::InvalidBase(self.base));
        }
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(ProfileError::InvalidScale(self.scale));
        }
        self.epsilon.validate()
    }

    /// `scale * base`, the intensity of an unperturbed atom.
    pub fn total(&self) -> f64 {
        self.scale * self.base
    }

    pub fn eps(&self, n: i64) -> f64 {
        self.epsilon.eps(n)
    }

    pub fn intensity(&self, n: i64) -> f64 {
        self.total() * self.epsilon.eps(n).exp()
    }

    /// Limits of `a_n` at `-inf` and `+inf`.
    pub fn intensity_limits(&self) -> Option<(f64, f64)> {
        self.epsilon
            .limits()
            .map(|(l, r)| (self.total() * l.exp(), self.total() * r.exp()))
    }
}

/// Functional form of [`IntensityProfile::intensity`].
pub fn eval_intensity(profile: &IntensityProfile, n: i64) -> f64 {
    profile.intensity(n)
}

/// Three-valued answer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tri {
    Yes,
    No,
    Undetermined,
}

impl Tri {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Tri::Yes
        } else {
            Tri::No
        }
    }

    pub fn and(self, other: Tri) -> Tri {
        match (self, other) {
            (Tri::No, _) | (_, Tri::No) => Tri::No,
            (Tri::Yes, Tri::Yes) => Tri::Yes,
            _ => Tri::Undetermined,
        }
    }
}

/// The conditions a profile can be checked against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionId {
    /// `sum_n (sqrt a_{n-1} - sqrt a_n)^2 < inf`: the shift of the suspension
    /// is nonsingular.
    Nonsingular,
    /// `sum_n |a_{n-1} - a_n| < inf`: the translation has an integrable
    /// derivative and the two limits of `a_n` exist.
    L1Increments,
    /// `eps_n = 0` for `n <= 1`, `eps_n -> 0`, `sum eps_n^2 = inf` and
    /// `sum eps_n^4 < inf`.
    EpsilonRegime,
    /// The two limits of `a_n` coincide.
    ChiZero,
}

impl ConditionId {
    pub const ALL: [ConditionId; 4] = [
        ConditionId::Nonsingular,
        ConditionId::L1Increments,
        ConditionId::EpsilonRegime,
        ConditionId::ChiZero,
    ];
}

/// One point of a partial-sum trace.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartialSum {
    pub n: u64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionVerdict {
    pub condition: ConditionId,
    pub holds: Tri,
    pub evidence: Vec<PartialSum>,
    /// Second trace where a condition has two parts (`sum eps^4` for the
    /// epsilon regime).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub aux_evidence: Vec<PartialSum>,
}

/// Partial-sum checkpoints attached to every verdict.
pub const EVIDENCE_POINTS: [u64; 4] = [100, 1_000, 10_000, 100_000];

fn symbolic(family: &EpsilonFamily, condition: ConditionId) -> Tri {
    use ConditionId::*;
    match family {
        EpsilonFamily::Zero => match condition {
            EpsilonRegime => Tri::No,
            _ => Tri::Yes,
        },
        // increments of sign * n^-gamma decay like n^{-gamma-1}; squares and
        // absolute values are summable for every gamma > 0
        EpsilonFamily::Power { gamma, .. } => match condition {
            Nonsingular | L1Increments | ChiZero => Tri::Yes,
            EpsilonRegime => Tri::from_bool(*gamma > 0.25 && *gamma <= 0.5),
        },
        EpsilonFamily::Step { left, right } => match condition {
            Nonsingular | L1Increments => Tri::Yes,
            // either eps does not vanish on n <= 1, or it tends to a nonzero
            // limit, or it is identically zero
            EpsilonRegime => Tri::No,
            ChiZero => Tri::from_bool(left == right),
        },
        EpsilonFamily::Explicit { table, tail } => match tail.as_deref() {
            None => Tri::Undetermined,
            Some(t) => {
                let tail_verdict = symbolic(t, condition);
                if condition == EpsilonRegime {
                    let prefix_ok = table.iter().all(|&(n, v)| n > 1 || v == 0.0);
                    Tri::from_bool(prefix_ok).and(tail_verdict)
                } else {
                    tail_verdict
                }
            }
        },
    }
}

/// Symbolic verdict for `condition`, with partial sums at
/// [`EVIDENCE_POINTS`].
pub fn check_condition(profile: &IntensityProfile, condition: ConditionId) -> ConditionVerdict {
    let holds = symbolic(&profile.epsilon, condition);
    let mut evidence = Vec::with_capacity(EVIDENCE_POINTS.len());
    let mut aux_evidence = Vec::new();
    let last = *EVIDENCE_POINTS.last().unwrap() as i64;
    let mut points = EVIDENCE_POINTS.iter().peekable();
    match condition {
        ConditionId::Nonsingular | ConditionId::L1Increments => {
            let term = |n: i64| {
                let (prev, cur) = (profile.intensity(n - 1), profile.intensity(n));
                if condition == ConditionId::Nonsingular {
                    (prev.sqrt() - cur.sqrt()).powi(2)
                } else {
                    (prev - cur).abs()
                }
            };
            let mut sum = NeumaierSum::new();
            sum.add(term(0));
            for m in 1..=last {
                sum.add(term(m));
                sum.add(term(-m));
                if points.peek().is_some_and(|&&p| p as i64 == m) {
                    evidence.push(PartialSum {
                        n: m as u64,
                        value: sum.value(),
                    });
                    points.next();
                }
            }
        }
        ConditionId::EpsilonRegime => {
            let (mut s2, mut s4) = (NeumaierSum::new(), NeumaierSum::new());
            for m in 1..=last {
                let e2 = profile.eps(m).powi(2);
                s2.add(e2);
                s4.add(e2 * e2);
                if points.peek().is_some_and(|&&p| p as i64 == m) {
                    evidence.push(PartialSum {
                        n: m as u64,
                        value: s2.value(),
                    });
                    aux_evidence.push(PartialSum {
                        n: m as u64,
                        value: s4.value(),
                    });
                    points.next();
                }
            }
        }
        ConditionId::ChiZero => {
            for &p in &EVIDENCE_POINTS {
                let n = p as i64;
                evidence.push(PartialSum {
                    n: p,
                    value: profile.intensity(n) - profile.intensity(-n),
                });
            }
        }
    }
    ConditionVerdict {
        condition,
        holds,
        evidence,
        aux_evidence,
    }
}

/// `lim_{n->+inf} a_n - lim_{n->-inf} a_n`, or `None` when the limits are not
/// guaranteed to exist.
pub fn chi(profile: &IntensityProfile) -> Option<f64> {
    if symbolic(&profile.epsilon, ConditionId::L1Increments) != Tri::Yes {
        return None;
    }
    profile.intensity_limits().map(|(minus, plus)| plus - minus)
}

/// Closed interval of limit points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    pub fn is_disjoint(&self, other: &Interval) -> bool {
        self.hi < other.lo || other.hi < self.lo
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitSets {
    pub minus: Interval,
    pub plus: Interval,
}

impl LimitSets {
    pub fn disjoint(&self) -> bool {
        self.minus.is_disjoint(&self.plus)
    }
}

/// Sets of limit points of `(a_n)_{n<0}` and `(a_n)_{n>0}`.
pub fn limit_sets(profile: &IntensityProfile) -> Option<LimitSets> {
    profile.intensity_limits().map(|(minus, plus)| LimitSets {
        minus: Interval::point(minus),
        plus: Interval::point(plus),
    })
}

/// All four verdicts keyed by condition.
pub fn check_all(profile: &IntensityProfile) -> BTreeMap<String, ConditionVerdict> {
    ConditionId::ALL
        .iter()
        .map(|&c| {
            let key = serde_json::to_value(c)
                .ok()
                .and_then(|v| v.as_str().map(str::to_owned))
                .unwrap_or_default();
            (key, check_condition(profile, c))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn power(gamma: f64) -> EpsilonFamily {
        EpsilonFamily::Power {
            gamma,
            sign: Sign::Minus,
        }
    }

    #[test]
    fn intensity_examples() {
        let zero = IntensityProfile::new(1.0, EpsilonFamily::Zero).unwrap();
        assert_eq!(eval_intensity(&zero, 5), 1.0);
        let p = IntensityProfile::new(2.0, power(0.5)).unwrap();
        assert!((eval_intensity(&p, 4) - 2.0 * (-0.5f64).exp()).abs() < 1e-15);
        let s = IntensityProfile::new(1.0, power(0.5))
            .unwrap()
            .with_scale(3.0)
            .unwrap();
        assert!((eval_intensity(&s, 9) - 3.0 * (-1.0f64 / 3.0).exp()).abs() < 1e-15);
        assert_eq!(eval_intensity(&p, 1), 2.0);
        assert_eq!(eval_intensity(&p, -7), 2.0);
    }

    #[test]
    fn invalid_profiles_are_rejected() {
        assert!(IntensityProfile::new(0.0, EpsilonFamily::Zero).is_err());
        assert!(IntensityProfile::new(1.0, power(0.0)).is_err());
        assert!(IntensityProfile::new(1.0, EpsilonFamily::Zero)
            .unwrap()
            .with_scale(-1.0)
            .is_err());
        let dup = EpsilonFamily::Explicit {
            table: vec![(3, 0.1), (3, 0.2)],
            tail: None,
        };
        assert_eq!(
            IntensityProfile::new(1.0, dup).unwrap_err(),
            ProfileError::DuplicateIndex(3)
        );
        let nested = EpsilonFamily::Explicit {
            table: vec![],
            tail: Some(Box::new(EpsilonFamily::Explicit {
                table: vec![],
                tail: None,
            })),
        };
        assert_eq!(
            IntensityProfile::new(1.0, nested).unwrap_err(),
            ProfileError::NestedExplicit
        );
    }

    #[test]
    fn condition_examples() {
        let ex = IntensityProfile::inverse_sqrt(1.0).unwrap();
        assert_eq!(
            check_condition(&ex, ConditionId::EpsilonRegime).holds,
            Tri::Yes
        );
        let zero = IntensityProfile::new(1.0, EpsilonFamily::Zero).unwrap();
        let v = check_condition(&zero, ConditionId::Nonsingular);
        assert_eq!(v.holds, Tri::Yes);
        assert_eq!(v.evidence.len(), 4);
        assert!(v.evidence.iter().all(|e| e.value == 0.0));
        let fast = IntensityProfile::new(1.0, power(1.0)).unwrap();
        assert_eq!(
            check_condition(&fast, ConditionId::EpsilonRegime).holds,
            Tri::No
        );
    }

    #[test]
    fn power_truth_table() {
        // sum n^{-2 gamma} diverges iff gamma <= 1/2, sum n^{-4 gamma}
        // converges iff gamma > 1/4; increments are summable for all gamma > 0
        let table = [
            (0.2, Tri::No),
            (0.26, Tri::Yes),
            (0.3, Tri::Yes),
            (0.5, Tri::Yes),
            (0.6, Tri::No),
            (1.0, Tri::No),
        ];
        for (gamma, regime) in table {
            let p = IntensityProfile::new(1.0, power(gamma)).unwrap();
            assert_eq!(
                check_condition(&p, ConditionId::EpsilonRegime).holds,
                regime,
                "{gamma}"
            );
            assert_eq!(
                check_condition(&p, ConditionId::Nonsingular).holds,
                Tri::Yes
            );
            assert_eq!(
                check_condition(&p, ConditionId::L1Increments).holds,
                Tri::Yes
            );
            assert_eq!(check_condition(&p, ConditionId::ChiZero).holds, Tri::Yes);
        }
    }

    #[test]
    fn evidence_traces_are_monotone() {
        let p = IntensityProfile::new(1.0, power(0.5)).unwrap();
        let v = check_condition(&p, ConditionId::EpsilonRegime);
        let sums: Vec<_> = v.evidence.iter().map(|e| e.value).collect();
        assert!(sums.windows(2).all(|w| w[1] > w[0]));
        // sum_{n=2}^{N} 1/n grows like log N
        assert!((sums[3] - sums[2] - 10f64.ln()).abs() < 1e-3);
        assert_eq!(v.aux_evidence.len(), 4);
    }

    #[test]
    fn explicit_family_follows_declared_tail() {
        let with_tail = EpsilonFamily::Explicit {
            table: vec![(2, -0.3), (5, 0.2)],
            tail: Some(Box::new(power(0.5))),
        };
        let p = IntensityProfile::new(1.0, with_tail).unwrap();
        assert_eq!(p.eps(2), -0.3);
        assert_eq!(p.eps(3), -(3f64).powf(-0.5));
        assert_eq!(
            check_condition(&p, ConditionId::EpsilonRegime).holds,
            Tri::Yes
        );
        assert_eq!(chi(&p), Some(0.0));

        let bad_prefix = EpsilonFamily::Explicit {
            table: vec![(0, 0.1)],
            tail: Some(Box::new(power(0.5))),
        };
        let p = IntensityProfile::new(1.0, bad_prefix).unwrap();
        assert_eq!(
            check_condition(&p, ConditionId::EpsilonRegime).holds,
            Tri::No
        );

        let no_tail = EpsilonFamily::Explicit {
            table: vec![(2, -0.3)],
            tail: None,
        };
        let p = IntensityProfile::new(1.0, no_tail).unwrap();
        for c in ConditionId::ALL {
            assert_eq!(check_condition(&p, c).holds, Tri::Undetermined);
        }
        assert_eq!(chi(&p), None);
        assert_eq!(limit_sets(&p), None);
    }

    #[test]
    fn chi_examples() {
        let ex = IntensityProfile::inverse_sqrt(1.0).unwrap();
        assert_eq!(chi(&ex), Some(0.0));
        let step = IntensityProfile::new(
            1.0,
            EpsilonFamily::Step {
                left: 0.0,
                right: 2f64.ln(),
            },
        )
        .unwrap();
        assert!((chi(&step).unwrap() - 1.0).abs() < 1e-15);
        let scaled = step.clone().with_scale(2.5).unwrap();
        assert!((chi(&scaled).unwrap() - 2.5).abs() < 1e-14);
    }

    #[test]
    fn limit_set_examples() {
        let ex = IntensityProfile::inverse_sqrt(1.0).unwrap();
        let ls = limit_sets(&ex).unwrap();
        assert_eq!(
            (ls.minus, ls.plus),
            (Interval::point(1.0), Interval::point(1.0))
        );
        assert!(!ls.disjoint());
        let step = IntensityProfile::new(
            1.0,
            EpsilonFamily::Step {
                left: 0.0,
                right: 2f64.ln(),
            },
        )
        .unwrap();
        let ls = limit_sets(&step).unwrap();
        assert_eq!(ls.minus, Interval::point(1.0));
        assert!((ls.plus.lo - 2.0).abs() < 1e-15);
        assert!(ls.disjoint());
        let zero = IntensityProfile::new(3.0, EpsilonFamily::Zero)
            .unwrap()
            .with_scale(2.0)
            .unwrap();
        let ls = limit_sets(&zero).unwrap();
        assert_eq!(
            (ls.minus, ls.plus),
            (Interval::point(6.0), Interval::point(6.0))
        );
    }

    #[test]
    fn config_shape_round_trips() {
        let json = r#"{"base": 0.1, "scale": 1.0, "epsilon": {"kind": "power", "gamma": 0.5, "sign": -1}}"#;
        let p: IntensityProfile = serde_json::from_str(json).unwrap();
        assert_eq!(p, IntensityProfile::inverse_sqrt(0.1).unwrap());
        let explicit = r#"{"base": 1, "epsilon": {"kind": "explicit", "table": [[2, -0.5]], "tail": {"kind": "zero"}}}"#;
        let p: IntensityProfile = serde_json::from_str(explicit).unwrap();
        assert_eq!(p.eps(2), -0.5);
        let bad_sign = r#"{"base": 1, "epsilon": {"kind": "power", "gamma": 0.5, "sign": 2}}"#;
        assert!(serde_json::from_str::<IntensityProfile>(bad_sign).is_err());
        let unknown =
            r#"{"base": 1, "epsilon": {"kind": "power", "gamma": 0.5, "sign": -1, "extra": 1}}"#;
        assert!(serde_json::from_str::<IntensityProfile>(unknown).is_err());
    }

    proptest! {
        #[test]
        fn scaling_is_multiplicative(t in 0.01f64..50.0, n in -1000i64..1000, base in 0.01f64..10.0) {
            let p = IntensityProfile::inverse_sqrt(base).unwrap();
            let scaled = p.clone().with_scale(t).unwrap();
            let lhs = eval_intensity(&scaled, n);
            let rhs = t * eval_intensity(&p, n);
            prop_assert!((lhs - rhs).abs() <= 1e-14 * rhs);
        }

        #[test]
        fn step_limit_sets_disjoint_iff_chi_nonzero(left in -2.0f64..2.0, right in -2.0f64..2.0, base in 0.1f64..5.0) {
            let p = IntensityProfile::new(base, EpsilonFamily::Step { left, right }).unwrap();
            prop_assert_eq!(limit_sets(&p).unwrap().disjoint(), chi(&p).unwrap() != 0.0);
        }

        #[test]
        fn power_families_have_zero_chi(gamma in 0.05f64..3.0, base in 0.01f64..10.0) {
            let p = IntensityProfile::new(base, power(gamma)).unwrap();
            prop_assert_eq!(chi(&p), Some(0.0));
        }
    }
}
