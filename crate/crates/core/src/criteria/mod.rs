//! Analytic classification: growth series, slope fits, certificates and the
//! continuous-base bound.

pub mod classify;
pub mod continuous;
pub mod series;

pub use classify::{
    affinity_bound, bifurcation_bracket, classify, classify_with, conservativity_certificate,
    dissipativity_series, AffinityBound, Bracket, BracketOptions, Certificate,
    ClassificationReport, DissipativitySeries, Verdict,
};
pub use continuous::{continuous_base_bound, ContinuousBound, PiecewiseDensity};
pub use series::{
    cutoff_index, fit_slope, hellinger_growth, nonsingularity_deficit, rn_square_integral,
    SeriesKind, SlopeFit, UnitFits, DEFAULT_FIT_EXPONENTS, DEFAULT_TOL,
};
