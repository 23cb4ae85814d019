use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::loss::{pairwise_grad, unary_grad, PairSample};
use crate::error::{Error, Result};
use crate::potentials::{RelationModel, UnaryMode};
use crate::types::{relation_label, Episode};

/// Default cap on training pairs drawn from one episode.
pub const DEFAULT_PAIR_BUDGET: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelRole {
    Pairwise,
    Unary,
}

impl fmt::Display for ModelRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pairwise => "pairwise",
            Self::Unary => "unary",
        })
    }
}

impl FromStr for ModelRole {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pairwise" => Ok(Self::Pairwise),
            "unary" => Ok(Self::Unary),
            other => Err(Error::InvalidConfig(format!("unknown model role `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub decay_factor: f64,
    pub decay_every: usize,
    pub num_steps: usize,
    pub batch_episodes: usize,
    pub seed: u64,
    pub init_scale: f64,
    pub pair_budget: usize,
    /// Aggregator used by the unary loss.
    pub unary_mode: UnaryMode,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.01,
            decay_factor: 0.5,
            decay_every: 2000,
            num_steps: 10_000,
            batch_episodes: 1,
            seed: 0,
            init_scale: 0.05,
            pair_budget: DEFAULT_PAIR_BUDGET,
            unary_mode: UnaryMode::Softmax,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidConfig("learning_rate must be > 0".into()));
        }
        if !(self.decay_factor > 0.0 && self.decay_factor <= 1.0) {
            return Err(Error::InvalidConfig("decay_factor must lie in (0, 1]".into()));
        }
        if self.decay_every == 0 || self.batch_episodes == 0 || self.pair_budget == 0 {
            return Err(Error::InvalidConfig(
                "decay_every, batch_episodes and pair_budget must be >= 1".into(),
            ));
        }
        if !(self.init_scale >= 0.0) {
            return Err(Error::InvalidConfig("init_scale must be >= 0".into()));
        }
        Ok(())
    }

    /// Settings calibrated on the synthetic generator's default feature
    /// scale. Small inputs need a large initial scale and step size before
    /// the gated units leave the near-linear regime.
    pub fn calibrated() -> Self {
        Self {
            learning_rate: 4.0,
            decay_factor: 0.5,
            decay_every: 4000,
            num_steps: 12_000,
            batch_episodes: 4,
            init_scale: 1.0,
            ..Self::default()
        }
    }

    /// Step-decayed learning rate at `step`.
    pub fn learning_rate_at(&self, step: usize) -> f64 {
        self.learning_rate * self.decay_factor.powi((step / self.decay_every) as i32)
    }
}

/// Cross-bag pairs from the positive bags, the higher-indexed bag first.
/// At most `budget` pairs are kept, subsampled uniformly without replacement.
pub fn sample_training_pairs<R: Rng + ?Sized>(
    episode: &Episode,
    budget: usize,
    rng: &mut R,
) -> Result<Vec<PairSample>> {
    let bags = episode.positive_bags();
    let mut keys = Vec::new();
    for (i, bag_i) in bags.iter().enumerate() {
        if bag_i.labels().is_none() {
            return Err(Error::Unlabeled("training pairs need labeled positive bags"));
        }
        for j in 0..i {
            for p in 0..bag_i.len() {
                for q in 0..bags[j].len() {
                    keys.push((i, p, j, q));
                }
            }
        }
    }
    let chosen: Vec<(usize, usize, usize, usize)> = if keys.len() > budget {
        let mut picked = sample(rng, keys.len(), budget).into_vec();
        picked.sort_unstable();
        picked.into_iter().map(|k| keys[k]).collect()
    } else {
        keys
    };
    Ok(chosen
        .into_iter()
        .map(|(i, p, j, q)| {
            let li = episode.label(i, p).expect("checked labeled");
            let lj = episode.label(j, q).expect("checked labeled");
            PairSample {
                f: bags[i].item(p).clone(),
                g: bags[j].item(q).clone(),
                label: relation_label(li, lj),
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub step: usize,
    pub loss: f64,
    pub learning_rate: f64,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: RelationModel,
    pub trace: Vec<TracePoint>,
}

/// Writes the loss trace as `step,loss,learning_rate` CSV.
pub fn write_trace_csv<W: Write>(trace: &[TracePoint], mut out: W) -> std::io::Result<()> {
    writeln!(out, "step,loss,learning_rate")?;
    for p in trace {
        writeln!(out, "{},{},{}", p.step, p.loss, p.learning_rate)?;
    }
    Ok(())
}

/// Initial parameters: weights uniform in `(-init_scale, init_scale)`,
/// biases zero, temperature 1 for unary models.
pub fn initial_model(role: ModelRole, dim: usize, config: &TrainConfig) -> RelationModel {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    RelationModel::random(dim, config.init_scale, role == ModelRole::Unary, &mut rng)
}

/// Plain SGD over episodes drawn from `episodes`, one batch per step.
///
/// The batch gradient is the mean of per-episode gradients, reduced in
/// episode order so that results do not depend on thread scheduling.
pub fn train<I>(
    role: ModelRole,
    dim: usize,
    episodes: I,
    config: &TrainConfig,
) -> Result<TrainOutcome>
where
    I: IntoIterator<Item = Episode>,
{
    config.validate()?;
    let mut model = initial_model(role, dim, config);
    let mut sampler = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(0x5eed));
    let mut episodes = episodes.into_iter();
    let mut trace = Vec::with_capacity(config.num_steps);

    for step in 0..config.num_steps {
        let batch: Vec<Episode> = episodes.by_ref().take(config.batch_episodes).collect();
        if batch.is_empty() {
            return Err(Error::InvalidConfig(format!(
                "episode stream ended after {step} steps"
            )));
        }
        for ep in &batch {
            if ep.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: ep.dim(),
                });
            }
        }
        let results: Vec<Result<(f64, RelationModel)>> = match role {
            ModelRole::Pairwise => {
                let pair_sets = batch
                    .iter()
                    .map(|ep| sample_training_pairs(ep, config.pair_budget, &mut sampler))
                    .collect::<Result<Vec<_>>>()?;
                pair_sets
                    .par_iter()
                    .map(|pairs| pairwise_grad(pairs, &model))
                    .collect()
            }
            ModelRole::Unary => batch
                .par_iter()
                .map(|ep| unary_grad(ep, &model, config.unary_mode))
                .collect(),
        };
        let mut loss = 0.0;
        let mut grad = model.zeros_like();
        for r in results {
            let (l, g) = r?;
            loss += l;
            grad.add_scaled(1.0, &g);
        }
        let scale = 1.0 / batch.len() as f64;
        loss *= scale;
        if !loss.is_finite() {
            return Err(Error::Diverged { step, loss });
        }
        let lr = config.learning_rate_at(step);
        model.add_scaled(-lr * scale, &grad);
        if let Some(nu) = model.nu.as_mut() {
            *nu = nu.max(0.0);
        }
        trace.push(TracePoint {
            step,
            loss,
            learning_rate: lr,
        });
    }
    Ok(TrainOutcome { model, trace })
}
