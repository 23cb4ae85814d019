//! `bagsel` command line.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use bagsel::inference::{run_timed, InferenceSettings};
use bagsel::potentials::{PotentialProvider, RelationModel, UnaryMode};
use bagsel::synth::{load_dataset, save_dataset, Dataset, DatasetHeader, EpisodeGenerator, GeneratorConfig, Split};
use bagsel::training::{train, write_trace_csv, ModelRole, TrainConfig};
use bagsel::{io::read_episode, Episode};
use clap::{Args, Parser, Subcommand};

use crate::gridsearch::default_eta_grid;
use crate::oneshot::one_shot_eval;
use crate::pipeline::tune_eta;
use crate::report::{method_potentials, run_benchmark, write_report_dir, BenchConfig, Method, Models};

#[derive(Debug, Parser)]
#[command(name = "bagsel", version, about = "Select one common item per bag by energy minimization")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic JSON-lines dataset.
    Generate(GenerateArgs),
    /// Train a pairwise or unary relation model.
    Train(TrainArgs),
    /// Run inference on one episode file and print the result record.
    Infer(InferArgs),
    /// Benchmark methods over a labeled dataset.
    Bench(BenchArgs),
    /// Grid-search eta on a validation dataset.
    Gridsearch(GridArgs),
    /// 5-way 1-shot classification with a pairwise model.
    Oneshot(OneShotArgs),
}

#[derive(Debug, Args)]
pub struct GeneratorArgs {
    #[arg(long, default_value_t = 16)]
    pub dim: usize,
    /// Expected prototype norm in units of the noise standard deviation.
    #[arg(long, default_value_t = 3.0)]
    pub separation: f64,
    #[arg(long, default_value_t = 0.3)]
    pub noise_sigma: f64,
    #[arg(long = "num-bags", short = 'n', default_value_t = 8)]
    pub num_bags: usize,
    #[arg(long = "bag-size", short = 'b', default_value_t = 5)]
    pub bag_size: usize,
    #[arg(long = "negative-size", default_value_t = 10)]
    pub negative_size: usize,
    /// Class-count range `MIN..=MAX`; defaults follow the bag size.
    #[arg(long, num_args = 2, value_names = ["MIN", "MAX"])]
    pub classes: Option<Vec<usize>>,
    #[arg(long, default_value_t = 1000)]
    pub train_classes: usize,
    #[arg(long, default_value_t = 20)]
    pub val_classes: usize,
    #[arg(long, default_value_t = 20)]
    pub test_classes: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl GeneratorArgs {
    pub fn config(&self) -> GeneratorConfig {
        let mut c = GeneratorConfig {
            dim: self.dim,
            noise_sigma: self.noise_sigma,
            num_bags: self.num_bags,
            negative_size: self.negative_size,
            num_train_classes: self.train_classes,
            num_val_classes: self.val_classes,
            num_test_classes: self.test_classes,
            seed: self.seed,
            ..GeneratorConfig::default()
        }
        .with_bag_size(self.bag_size)
        .with_separation(self.separation);
        if let Some(r) = &self.classes {
            (c.classes_min, c.classes_max) = (r[0], r[1]);
        }
        c
    }
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub generator: GeneratorArgs,
    #[arg(long, default_value = "test")]
    pub split: String,
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    #[arg(long, short)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// `pairwise` or `unary`.
    #[arg(long, default_value = "pairwise")]
    pub role: String,
    /// Training episodes; cycled when shorter than the step count.
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long, default_value_t = 12_000)]
    pub steps: usize,
    #[arg(long, default_value_t = 4.0)]
    pub learning_rate: f64,
    #[arg(long, default_value_t = 4000)]
    pub decay_every: usize,
    #[arg(long, default_value_t = 0.5)]
    pub decay_factor: f64,
    #[arg(long, default_value_t = 4)]
    pub batch: usize,
    #[arg(long, default_value_t = 1.0)]
    pub init_scale: f64,
    #[arg(long, default_value = "softmax")]
    pub unary_mode: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, short)]
    pub output: PathBuf,
    /// Optional loss trace CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long)]
    pub pairwise_model: Option<PathBuf>,
    #[arg(long)]
    pub unary_model: Option<PathBuf>,
}

impl ModelArgs {
    fn load(&self) -> Result<Option<Models>> {
        let Some(p) = &self.pairwise_model else {
            if self.unary_model.is_some() {
                bail!("--unary-model needs --pairwise-model");
            }
            return Ok(None);
        };
        let pairwise = RelationModel::load(p).with_context(|| format!("loading {}", p.display()))?;
        let unary = self
            .unary_model
            .as_ref()
            .map(|u| RelationModel::load(u).with_context(|| format!("loading {}", u.display())))
            .transpose()?;
        Ok(Some(Models { pairwise, unary }))
    }
}

#[derive(Debug, Args)]
pub struct InferenceArgs {
    #[arg(long, default_value_t = 300)]
    pub k: usize,
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    #[arg(long, default_value = "softmax")]
    pub unary_mode: String,
    /// Cosine temperature for the baseline's unary term.
    #[arg(long, default_value_t = 1.0)]
    pub cosine_nu: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl InferenceArgs {
    fn bench_config(&self) -> Result<BenchConfig> {
        let mut config = BenchConfig {
            unary_mode: self.unary_mode.parse()?,
            cosine_nu: self.cosine_nu,
            cosine_eta: self.eta,
            seed: self.seed,
            ..BenchConfig::default()
        };
        config.inference = InferenceSettings {
            eta: self.eta,
            k: self.k,
            ..config.inference
        };
        config.inference.icm.seed = self.seed;
        Ok(config)
    }
}

#[derive(Debug, Args)]
pub struct InferArgs {
    #[arg(long)]
    pub episode: PathBuf,
    #[arg(long, default_value = "greedy")]
    pub method: String,
    #[command(flatten)]
    pub models: ModelArgs,
    #[command(flatten)]
    pub inference: InferenceArgs,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    /// Comma-separated method names.
    #[arg(long = "method", value_delimiter = ',', default_value = "greedy,loopy-bp,icm,cosine-greedy")]
    pub methods: Vec<String>,
    #[command(flatten)]
    pub models: ModelArgs,
    #[command(flatten)]
    pub inference: InferenceArgs,
    /// Tune eta on this validation dataset instead of using `--eta`.
    #[arg(long)]
    pub validation: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pub eta_grid: Option<Vec<f64>>,
    /// Process episodes in parallel; wall times are then not comparable.
    #[arg(long)]
    pub parallel: bool,
    /// Output directory.
    #[arg(long, short)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long, default_value = "greedy")]
    pub method: String,
    #[command(flatten)]
    pub models: ModelArgs,
    #[command(flatten)]
    pub inference: InferenceArgs,
    #[arg(long, value_delimiter = ',')]
    pub eta_grid: Option<Vec<f64>>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OneShotArgs {
    #[arg(long)]
    pub pairwise_model: PathBuf,
    #[command(flatten)]
    pub generator: GeneratorArgs,
    #[arg(long, default_value_t = 1000)]
    pub tasks: u64,
    #[arg(long, default_value_t = 5)]
    pub ways: usize,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

fn emit(value: &serde_json::Value, output: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match output {
        Some(p) => std::fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display()))?,
        None => println!("{text}"),
    }
    Ok(())
}

fn load(path: &Path) -> Result<Dataset> {
    load_dataset(path).with_context(|| format!("loading dataset {}", path.display()))
}

fn parse_methods(names: &[String]) -> Result<Vec<Method>> {
    names.iter().map(|n| Ok(n.parse::<Method>()?)).collect()
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate(a) => {
            let config = a.generator.config();
            let split: Split = a.split.parse()?;
            let gen = EpisodeGenerator::new(config.clone())?;
            let episodes = gen.episodes(split, a.count)?;
            let data = Dataset {
                header: DatasetHeader {
                    dim: config.dim,
                    split: Some(split),
                    generator: Some(config),
                },
                episodes,
            };
            save_dataset(&data, &a.output)?;
        }
        Command::Train(a) => {
            let role: ModelRole = a.role.parse()?;
            let data = load(&a.dataset)?;
            if data.episodes.is_empty() {
                bail!("training dataset {} is empty", a.dataset.display());
            }
            let config = TrainConfig {
                learning_rate: a.learning_rate,
                decay_every: a.decay_every,
                decay_factor: a.decay_factor,
                num_steps: a.steps,
                batch_episodes: a.batch,
                init_scale: a.init_scale,
                seed: a.seed,
                unary_mode: a.unary_mode.parse::<UnaryMode>()?,
                ..TrainConfig::default()
            };
            let stream = data.episodes.iter().cloned().cycle();
            let out = train(role, data.header.dim, stream, &config)?;
            out.model.save(&a.output)?;
            if let Some(t) = &a.trace {
                write_trace_csv(&out.trace, BufWriter::new(File::create(t)?))?;
            }
        }
        Command::Infer(a) => {
            let episode: Episode = read_episode(&a.episode)
                .with_context(|| format!("loading episode {}", a.episode.display()))?;
            let method: Method = a.method.parse()?;
            let models = a.models.load()?;
            let config = a.inference.bench_config()?;
            let (potentials, settings) = method_potentials(method, &episode, models.as_ref(), &config)?;
            let provider = PotentialProvider::new(potentials);
            let record = run_timed(method.as_str(), method.algorithm(), &provider, &settings)?;
            emit(&serde_json::to_value(&record)?, a.output.as_deref())?;
        }
        Command::Bench(a) => {
            let data = load(&a.dataset)?;
            let methods = parse_methods(&a.methods)?;
            let models = a.models.load()?;
            let mut config = a.inference.bench_config()?;
            config.parallel = a.parallel;
            if let Some(v) = &a.validation {
                let val = load(v)?;
                let grid = a.eta_grid.clone().unwrap_or_else(default_eta_grid);
                if methods.iter().any(|m| m.needs_models()) {
                    config.inference.eta = tune_eta(Method::Greedy, &val.episodes, models.as_ref(), &config, &grid)?.eta;
                }
                if methods.contains(&Method::CosineGreedy) {
                    config.cosine_eta = tune_eta(Method::CosineGreedy, &val.episodes, None, &config, &grid)?.eta;
                }
            }
            let report = run_benchmark(&data.episodes, models.as_ref(), &methods, &config)?;
            write_report_dir(&report, &a.output)?;
        }
        Command::Gridsearch(a) => {
            let data = load(&a.dataset)?;
            let method: Method = a.method.parse()?;
            let models = a.models.load()?;
            let config = a.inference.bench_config()?;
            let grid = a.eta_grid.clone().unwrap_or_else(default_eta_grid);
            let out = tune_eta(method, &data.episodes, models.as_ref(), &config, &grid)?;
            emit(
                &serde_json::json!({ "method": method.as_str(), "eta": out.eta, "scores": out.scores }),
                a.output.as_deref(),
            )?;
        }
        Command::Oneshot(a) => {
            let model = RelationModel::load(&a.pairwise_model)?;
            let gen = EpisodeGenerator::new(a.generator.config())?;
            let tasks = (0..a.tasks)
                .map(|i| gen.one_shot_task(Split::Test, a.ways, i))
                .collect::<bagsel::Result<Vec<_>>>()?;
            let r = one_shot_eval(&model, &tasks)?;
            emit(
                &serde_json::json!({ "accuracy": r.accuracy, "ci_half_width": r.ci_half_width, "tasks": r.tasks }),
                a.output.as_deref(),
            )?;
        }
    }
    Ok(())
}
