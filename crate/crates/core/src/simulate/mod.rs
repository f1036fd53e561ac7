//! Monte Carlo engine over configurations `omega` in `Z_+^Z`.

pub mod experiments;
pub mod hopf;
pub mod ks;
pub mod rn;
pub mod rng;

pub use experiments::{
    claim2_decay, clt_experiment, stopping_time_experiment, Claim2Options, Claim2Summary,
    CltOptions, CltSummary, StoppingOptions, StoppingSummary,
};
pub use hopf::{
    hopf_diagnostic, scan_intensity, HopfOptions, HopfSummary, ScanOptions, ScanSummary, HEURISTIC,
};
pub use rn::{
    check_coverage, log_rn_derivative, required_range, sample_configuration, ConfigurationWindow,
};
pub use rng::{run_samples, PoissonSampler, RngSpec};
