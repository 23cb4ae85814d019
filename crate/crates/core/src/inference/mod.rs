//! Energy minimization: greedy beam search and the comparison methods.

mod beam;
mod bp;
mod exhaustive;
mod icm;
mod padding;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potentials::{PotentialProvider, PotentialSource};
use crate::types::Selection;

pub use beam::{
    energy_combine, greedy_infer, join, prune, Beam, BeamConfig, BeamEntry, GreedyOutcome, Joined,
    JoinedEntry,
};
pub use bp::{loopy_bp_infer, BpConfig};
pub use exhaustive::{exhaustive_infer, search_space_size, DEFAULT_EXHAUSTIVE_CAP};
pub use icm::{icm_infer, icm_infer_traced, IcmConfig, IcmTrace};
pub use padding::pad_to_power_of_two;

/// A full selection with its directly evaluated energy.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub selection: Selection,
    pub energy: f64,
    /// Message sweeps (loopy BP) or coordinate sweeps (ICM).
    pub iterations: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Greedy,
    Exhaustive,
    LoopyBp,
    Icm,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Greedy => "greedy",
            Self::Exhaustive => "exhaustive",
            Self::LoopyBp => "loopy-bp",
            Self::Icm => "icm",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "greedy" => Ok(Self::Greedy),
            "exhaustive" => Ok(Self::Exhaustive),
            "loopy-bp" | "bp" => Ok(Self::LoopyBp),
            "icm" => Ok(Self::Icm),
            other => Err(Error::InvalidConfig(format!("unknown inference algorithm `{other}`"))),
        }
    }
}

/// Settings for every algorithm; each run reads the part it needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InferenceSettings {
    pub eta: f64,
    pub k: usize,
    pub bp: BpConfig,
    pub icm: IcmConfig,
    pub exhaustive_cap: u128,
}

impl Default for InferenceSettings {
    fn default() -> Self {
        Self {
            eta: 1.0,
            k: 300,
            bp: BpConfig::default(),
            icm: IcmConfig::default(),
            exhaustive_cap: DEFAULT_EXHAUSTIVE_CAP,
        }
    }
}

/// Result row written by `infer` and per-episode benchmark logs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InferenceRecord {
    pub method: String,
    pub selection: Vec<usize>,
    pub energy: f64,
    pub wall_time_secs: f64,
    pub pairwise_evaluated: usize,
    pub pairwise_total_possible: usize,
    pub iterations: Option<usize>,
}

impl InferenceRecord {
    pub fn pairwise_fraction(&self) -> f64 {
        if self.pairwise_total_possible == 0 {
            0.0
        } else {
            self.pairwise_evaluated as f64 / self.pairwise_total_possible as f64
        }
    }
}

pub fn solve<S: PotentialSource>(
    algorithm: Algorithm,
    provider: &PotentialProvider<S>,
    settings: &InferenceSettings,
) -> Result<Solution> {
    match algorithm {
        Algorithm::Greedy => {
            let out = greedy_infer(provider, BeamConfig::new(settings.k, settings.eta)?)?;
            Ok(Solution {
                selection: out.selection,
                energy: out.energy,
                iterations: None,
            })
        }
        Algorithm::Exhaustive => exhaustive_infer(provider, settings.eta, settings.exhaustive_cap),
        Algorithm::LoopyBp => loopy_bp_infer(provider, settings.eta, settings.bp),
        Algorithm::Icm => icm_infer(provider, settings.eta, settings.icm),
    }
}

/// Runs one algorithm on a fresh provider and records timing and
/// evaluation counts. The wall time covers inference including lazily
/// computed potentials.
pub fn run_timed<S: PotentialSource>(
    method: &str,
    algorithm: Algorithm,
    provider: &PotentialProvider<S>,
    settings: &InferenceSettings,
) -> Result<InferenceRecord> {
    let started = Instant::now();
    let solution = solve(algorithm, provider, settings)?;
    let wall_time_secs = started.elapsed().as_secs_f64();
    Ok(InferenceRecord {
        method: method.to_string(),
        selection: solution.selection.0,
        energy: solution.energy,
        wall_time_secs,
        pairwise_evaluated: provider.pairwise_evaluated(),
        pairwise_total_possible: provider.pairwise_total_possible(),
        iterations: solution.iterations,
    })
}
