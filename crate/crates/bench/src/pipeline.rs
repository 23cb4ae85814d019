//! Train, tune and evaluate in one call, on generated episodes.

use bagsel::inference::Algorithm;
use bagsel::potentials::{EpisodePotentials, UnaryMode};
use bagsel::synth::{EpisodeGenerator, Split};
use bagsel::training::{train, ModelRole, TrainConfig};
use bagsel::{Episode, Result};

use crate::gridsearch::{grid_search_eta, GridSearchOutcome};
use crate::report::{method_potentials, BenchConfig, Method, Models};

/// Trains a pairwise model and, when `unary_mode` is not `None`, a unary
/// model on the generator's training split. The unary model sees a stream
/// offset from the pairwise one so the two never share episodes.
pub fn train_models(gen: &EpisodeGenerator, config: &TrainConfig, unary_mode: UnaryMode) -> Result<Models> {
    let dim = gen.config().dim;
    let pairwise = train(ModelRole::Pairwise, dim, gen.stream(Split::Train, 0), config)?.model;
    let unary = if unary_mode == UnaryMode::None {
        None
    } else {
        let config = TrainConfig {
            unary_mode,
            seed: config.seed.wrapping_add(1),
            ..*config
        };
        let start = 1 << 40;
        Some(train(ModelRole::Unary, dim, gen.stream(Split::Train, start), &config)?.model)
    };
    Ok(Models { pairwise, unary })
}

/// Grid-searches `eta` for one method on validation episodes.
pub fn tune_eta<'a>(
    method: Method,
    validation: &'a [Episode],
    models: Option<&'a Models>,
    config: &BenchConfig,
    grid: &[f64],
) -> Result<GridSearchOutcome> {
    let algorithm: Algorithm = method.algorithm();
    grid_search_eta(
        validation,
        |ep: &'a Episode| -> Result<EpisodePotentials<'a>> { Ok(method_potentials(method, ep, models, config)?.0) },
        algorithm,
        &config.inference,
        grid,
    )
}
