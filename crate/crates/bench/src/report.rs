//! Success-rate benchmark over labeled episodes.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use bagsel::inference::{run_timed, search_space_size, Algorithm, InferenceSettings};
use bagsel::potentials::{
    ConstantScorer, EpisodePotentials, PotentialProvider, RelationModel, RelationScorer, UnaryMode,
};
use bagsel::{success_rate, Episode, Error, Result, Selection};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::stats::{confidence_interval, mean};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Greedy,
    Exhaustive,
    LoopyBp,
    Icm,
    /// Greedy with the pairwise term zeroed.
    UnaryOnly,
    /// Greedy with `eta = 0`.
    PairwiseOnly,
    /// Greedy over cosine-similarity potentials.
    CosineGreedy,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::Greedy,
        Method::Exhaustive,
        Method::LoopyBp,
        Method::Icm,
        Method::UnaryOnly,
        Method::PairwiseOnly,
        Method::CosineGreedy,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Greedy => "greedy",
            Self::Exhaustive => "exhaustive",
            Self::LoopyBp => "loopy-bp",
            Self::Icm => "icm",
            Self::UnaryOnly => "unary-only",
            Self::PairwiseOnly => "pairwise-only",
            Self::CosineGreedy => "cosine-greedy",
        }
    }

    pub fn algorithm(self) -> Algorithm {
        match self {
            Self::Exhaustive => Algorithm::Exhaustive,
            Self::LoopyBp => Algorithm::LoopyBp,
            Self::Icm => Algorithm::Icm,
            _ => Algorithm::Greedy,
        }
    }

    pub fn needs_models(self) -> bool {
        self != Self::CosineGreedy
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .or(match s {
                "bp" => Some(Method::LoopyBp),
                "cosine" | "cosine-baseline" => Some(Method::CosineGreedy),
                _ => None,
            })
            .ok_or_else(|| Error::InvalidConfig(format!("unknown method `{s}`")))
    }
}

/// Trained potentials; the unary model is optional.
#[derive(Debug, Clone)]
pub struct Models {
    pub pairwise: RelationModel,
    pub unary: Option<RelationModel>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchConfig {
    /// Beam width, BP/ICM settings, exhaustive cap and the learned-potential `eta`.
    pub inference: InferenceSettings,
    pub cosine_eta: f64,
    pub cosine_nu: f64,
    pub unary_mode: UnaryMode,
    /// Seeds ICM restarts; episode `i` uses `seed + i`.
    pub seed: u64,
    /// Process episodes on the rayon pool; wall times are then not comparable.
    pub parallel: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            inference: InferenceSettings::default(),
            cosine_eta: 1.0,
            cosine_nu: 1.0,
            unary_mode: UnaryMode::Softmax,
            seed: 0,
            parallel: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeResult {
    pub method: String,
    pub episode: usize,
    pub selection: Vec<usize>,
    pub success: f64,
    pub energy: f64,
    pub wall_time_secs: f64,
    pub pairwise_evaluated: usize,
    pub pairwise_total_possible: usize,
    pub iterations: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub method: String,
    pub episodes: usize,
    pub skipped: bool,
    pub mean_success: Option<f64>,
    pub ci_half_width: Option<f64>,
    pub mean_energy: Option<f64>,
    pub mean_time_secs: Option<f64>,
    pub mean_pairwise_fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub rows: Vec<ReportRow>,
    /// Always `"normal"`: half-widths use the normal approximation.
    pub ci_method: String,
    #[serde(skip)]
    pub episodes: Vec<EpisodeResult>,
}

impl BenchmarkReport {
    pub fn row(&self, method: Method) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.method == method.as_str())
    }
}

/// Potentials and inference settings a method uses on one episode.
pub fn method_potentials<'a>(
    method: Method,
    episode: &'a Episode,
    models: Option<&'a Models>,
    config: &BenchConfig,
) -> Result<(EpisodePotentials<'a>, InferenceSettings)> {
    let mut settings = config.inference;
    let need = |what: &'static str| Error::InvalidConfig(format!("method `{method}` needs {what}"));
    let unary_box = |m: &'a Models| m.unary.as_ref().map(|u| Box::new(u) as Box<dyn RelationScorer + 'a>);
    let potentials = match method {
        Method::CosineGreedy => {
            settings.eta = config.cosine_eta;
            EpisodePotentials::cosine(episode, config.unary_mode, config.cosine_nu)
        }
        Method::UnaryOnly => {
            let m = models.ok_or_else(|| need("trained models"))?;
            if m.unary.is_none() {
                return Err(need("a unary model"));
            }
            // Energy is then eta * unary; any positive eta gives the same argmin.
            settings.eta = 1.0;
            EpisodePotentials::new(episode, Box::new(ConstantScorer(0.0)), unary_box(m), config.unary_mode)
        }
        Method::PairwiseOnly => {
            let m = models.ok_or_else(|| need("trained models"))?;
            settings.eta = 0.0;
            EpisodePotentials::new(episode, Box::new(&m.pairwise), None, config.unary_mode)
        }
        _ => {
            let m = models.ok_or_else(|| need("trained models"))?;
            EpisodePotentials::new(episode, Box::new(&m.pairwise), unary_box(m), config.unary_mode)
        }
    };
    Ok((potentials, settings))
}

fn run_episode(
    method: Method,
    index: usize,
    episode: &Episode,
    models: Option<&Models>,
    config: &BenchConfig,
) -> Result<EpisodeResult> {
    let (potentials, mut settings) = method_potentials(method, episode, models, config)?;
    settings.icm.seed = config.seed.wrapping_add(index as u64);
    let provider = PotentialProvider::new(potentials);
    let record = run_timed(method.as_str(), method.algorithm(), &provider, &settings)?;
    let success = success_rate(&Selection(record.selection.clone()), episode)?;
    Ok(EpisodeResult {
        method: record.method,
        episode: index,
        selection: record.selection,
        success,
        energy: record.energy,
        wall_time_secs: record.wall_time_secs,
        pairwise_evaluated: record.pairwise_evaluated,
        pairwise_total_possible: record.pairwise_total_possible,
        iterations: record.iterations,
    })
}

fn summarize(method: Method, results: &[EpisodeResult]) -> Result<ReportRow> {
    let success: Vec<f64> = results.iter().map(|r| r.success).collect();
    let (mean_success, ci_half_width) = match results.len() {
        0 => (None, None),
        1 => (Some(success[0]), None),
        _ => {
            let (m, h) = confidence_interval(&success)?;
            (Some(m), Some(h))
        }
    };
    let fractions: Vec<f64> = results
        .iter()
        .map(|r| r.pairwise_evaluated as f64 / r.pairwise_total_possible.max(1) as f64)
        .collect();
    Ok(ReportRow {
        method: method.as_str().to_string(),
        episodes: results.len(),
        skipped: false,
        mean_success,
        ci_half_width,
        mean_energy: mean(&results.iter().map(|r| r.energy).collect::<Vec<_>>()),
        mean_time_secs: mean(&results.iter().map(|r| r.wall_time_secs).collect::<Vec<_>>()),
        mean_pairwise_fraction: mean(&fractions),
    })
}

/// Runs every method over every episode with a fresh provider per run.
///
/// Exhaustive search is skipped (row marked, no statistics) when any episode
/// exceeds its search-space cap.
pub fn run_benchmark(
    episodes: &[Episode],
    models: Option<&Models>,
    methods: &[Method],
    config: &BenchConfig,
) -> Result<BenchmarkReport> {
    for (i, ep) in episodes.iter().enumerate() {
        if ep.target_class.is_none() || !ep.is_labeled() {
            return Err(Error::InvalidEpisode(format!("episode {i} is not labeled")));
        }
    }
    let mut rows = Vec::with_capacity(methods.len());
    let mut all = Vec::new();
    for &method in methods {
        if method == Method::Exhaustive
            && episodes
                .iter()
                .any(|ep| search_space_size(&ep.bag_sizes()) > config.inference.exhaustive_cap)
        {
            rows.push(ReportRow {
                method: method.as_str().to_string(),
                episodes: 0,
                skipped: true,
                mean_success: None,
                ci_half_width: None,
                mean_energy: None,
                mean_time_secs: None,
                mean_pairwise_fraction: None,
            });
            continue;
        }
        let results: Vec<EpisodeResult> = if config.parallel {
            episodes
                .par_iter()
                .enumerate()
                .map(|(i, ep)| run_episode(method, i, ep, models, config))
                .collect::<Result<_>>()?
        } else {
            episodes
                .iter()
                .enumerate()
                .map(|(i, ep)| run_episode(method, i, ep, models, config))
                .collect::<Result<_>>()?
        };
        rows.push(summarize(method, &results)?);
        all.extend(results);
    }
    Ok(BenchmarkReport {
        rows,
        ci_method: "normal".into(),
        episodes: all,
    })
}

pub fn write_report_csv<W: Write>(report: &BenchmarkReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in &report.rows {
        w.serialize(row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_episodes_jsonl<W: Write>(report: &BenchmarkReport, mut out: W) -> Result<()> {
    for r in &report.episodes {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// `method,mean_time,mean_success` for a runtime-versus-accuracy plot.
pub fn write_runtime_csv<W: Write>(report: &BenchmarkReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["method", "mean_time", "mean_success"]).map_err(csv_err)?;
    for row in report.rows.iter().filter(|r| !r.skipped) {
        let fmt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        w.write_record([row.method.clone(), fmt(row.mean_time_secs), fmt(row.mean_success)])
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `report.csv`, `report.json`, `episodes.jsonl` and
/// `runtime_vs_accuracy.csv` into `dir`.
pub fn write_report_dir(report: &BenchmarkReport, dir: &Path) -> Result<()> {
    use std::fs::File;
    use std::io::BufWriter;
    std::fs::create_dir_all(dir)?;
    write_report_csv(report, BufWriter::new(File::create(dir.join("report.csv"))?))?;
    std::fs::write(dir.join("report.json"), serde_json::to_string_pretty(report)?)?;
    write_episodes_jsonl(report, BufWriter::new(File::create(dir.join("episodes.jsonl"))?))?;
    write_runtime_csv(report, BufWriter::new(File::create(dir.join("runtime_vs_accuracy.csv"))?))?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}
