//! Run configuration: one JSON document per run. Every section except
//! `profile` is optional and falls back to the defaults listed here.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::criteria::{BracketOptions, DEFAULT_FIT_EXPONENTS, DEFAULT_TOL};
use crate::intensity::IntensityProfile;
use crate::simulate::{
    Claim2Options, CltOptions, HopfOptions, RngSpec, ScanOptions, StoppingOptions,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Check,
    Asymptotics,
    Classify,
    Bracket,
    Clt,
    Claim2,
    Stopping,
    Hopf,
    Scan,
    Tails,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Check => "check",
            Command::Asymptotics => "asymptotics",
            Command::Classify => "classify",
            Command::Bracket => "bracket",
            Command::Clt => "clt",
            Command::Claim2 => "claim2",
            Command::Stopping => "stopping",
            Command::Hopf => "hopf",
            Command::Scan => "scan",
            Command::Tails => "tails",
        }
    }

    /// Commands with a per-row series that can be written as CSV.
    pub fn has_csv(self) -> bool {
        matches!(
            self,
            Command::Asymptotics | Command::Scan | Command::Tails | Command::Hopf
        )
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    /// Report path; standard output when absent.
    pub path: Option<PathBuf>,
    pub format: Format,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CheckKnobs {
    /// Half-width of the window for the nonsingularity deficit.
    pub deficit_n: u64,
}

impl Default for CheckKnobs {
    fn default() -> Self {
        Self { deficit_n: 1000 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AsymptoticsKnobs {
    /// Shifts `n = 2^lo, ..., 2^hi`.
    pub n_exponents: (u32, u32),
    pub tol: f64,
}

impl Default for AsymptoticsKnobs {
    fn default() -> Self {
        Self {
            n_exponents: DEFAULT_FIT_EXPONENTS,
            tol: DEFAULT_TOL,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifyKnobs {
    /// Length of the partial dissipativity series reported alongside.
    pub series_n: u64,
}

impl Default for ClassifyKnobs {
    fn default() -> Self {
        Self { series_n: 200 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TailsKnobs {
    pub a: f64,
    pub b: f64,
    /// Index whose tail is singled out in the report.
    pub l: u32,
    /// Table of tails for `l = 1..=l_max`.
    pub l_max: u32,
}

impl Default for TailsKnobs {
    fn default() -> Self {
        Self {
            a: 0.5,
            b: 0.5,
            l: 10,
            l_max: 30,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub profile: IntensityProfile,
    #[serde(default)]
    pub rng: RngSpec,
    /// Worker threads for Monte Carlo runs; results do not depend on it.
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub check: CheckKnobs,
    #[serde(default)]
    pub asymptotics: AsymptoticsKnobs,
    #[serde(default)]
    pub classify: ClassifyKnobs,
    #[serde(default)]
    pub bracket: BracketOptions,
    #[serde(default)]
    pub clt: CltOptions,
    #[serde(default)]
    pub claim2: Claim2Options,
    #[serde(default)]
    pub stopping: StoppingOptions,
    #[serde(default)]
    pub hopf: HopfOptions,
    #[serde(default)]
    pub scan: ScanOptions,
    #[serde(default)]
    pub tails: TailsKnobs,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, String> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| e.to_string())?;
        cfg.profile.validate().map_err(|e| e.to_string())?;
        Ok(cfg)
    }

    pub fn new(profile: IntensityProfile) -> Self {
        Self {
            profile,
            rng: RngSpec::default(),
            workers: None,
            output: OutputSpec::default(),
            check: CheckKnobs::default(),
            asymptotics: AsymptoticsKnobs::default(),
            classify: ClassifyKnobs::default(),
            bracket: BracketOptions::default(),
            clt: CltOptions::default(),
            claim2: Claim2Options::default(),
            stopping: StoppingOptions::default(),
            hopf: HopfOptions::default(),
            scan: ScanOptions::default(),
            tails: TailsKnobs::default(),
        }
    }
}
