//! Logistic losses for the pairwise and unary relation models and their
//! hand-derived gradients.

use crate::error::{Error, Result};
use crate::potentials::{aggregate_with_grad, sigmoid, RelationModel, UnaryMode};
use crate::types::{relation_to_bag, Episode, FeatureVector};

/// A labeled training pair; `f` comes from the higher-indexed bag.
#[derive(Debug, Clone, PartialEq)]
pub struct PairSample {
    pub f: FeatureVector,
    pub g: FeatureVector,
    /// `+1` related, `-1` unrelated.
    pub label: i8,
}

/// `log(1 + exp(z))` without overflow.
pub fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Mean logistic loss of the relation scores against the pair labels.
pub fn pairwise_loss(samples: &[PairSample], model: &RelationModel) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InvalidConfig("pairwise loss needs at least one sample".into()));
    }
    let total: f64 = samples
        .iter()
        .map(|s| softplus(-f64::from(s.label) * model.score_unchecked(&s.f, &s.g)))
        .sum();
    Ok(total / samples.len() as f64)
}

/// Pairwise loss and its gradient with respect to every model parameter.
pub fn pairwise_grad(samples: &[PairSample], model: &RelationModel) -> Result<(f64, RelationModel)> {
    if samples.is_empty() {
        return Err(Error::InvalidConfig("pairwise loss needs at least one sample".into()));
    }
    let n = samples.len() as f64;
    let mut grad = model.zeros_like();
    let mut loss = 0.0;
    for s in samples {
        let y = f64::from(s.label);
        let acts = model.forward(&s.f, &s.g);
        loss += softplus(-y * acts.score);
        // d/dr log(1 + exp(-y r)) = -y * sigmoid(-y r)
        let upstream = -y * sigmoid(-y * acts.score) / n;
        model.backward(&acts, upstream, &mut grad);
    }
    Ok((loss / n, grad))
}

fn unary_targets(episode: &Episode) -> Result<(&crate::types::Bag, Vec<(&FeatureVector, f64)>)> {
    let negative = episode
        .negative_bag()
        .ok_or(Error::InvalidEpisode("unary loss needs a negative bag".into()))?;
    let mut items = Vec::new();
    for bag in episode.positive_bags() {
        let labels = bag
            .labels()
            .ok_or(Error::Unlabeled("unary loss needs labeled positive bags"))?;
        for (item, &label) in bag.items().iter().zip(labels) {
            items.push((item, f64::from(relation_to_bag(label, negative)?)));
        }
    }
    Ok((negative, items))
}

/// Mean logistic loss of each positive item's unary potential against its
/// relation to the negative bag.
pub fn unary_loss(episode: &Episode, model: &RelationModel, mode: UnaryMode) -> Result<f64> {
    let (negative, items) = unary_targets(episode)?;
    let nu = model.effective_nu();
    let mut total = 0.0;
    let mut u = vec![0.0; negative.len()];
    for &(e, target) in &items {
        for (slot, n) in u.iter_mut().zip(negative.items()) {
            *slot = model.score_unchecked(e, n);
        }
        let (psi, _) = aggregate_with_grad(&u, nu, mode, None);
        total += softplus(-target * psi);
    }
    Ok(total / items.len() as f64)
}

/// Unary loss and its gradient, including the temperature when the model has one.
pub fn unary_grad(
    episode: &Episode,
    model: &RelationModel,
    mode: UnaryMode,
) -> Result<(f64, RelationModel)> {
    let (negative, items) = unary_targets(episode)?;
    let n_items = items.len() as f64;
    let nu = model.effective_nu();
    let nu_active = model.nu.is_some_and(|v| v >= 0.0);
    let mut grad = model.zeros_like();
    let mut loss = 0.0;
    let mut du = vec![0.0; negative.len()];
    for &(e, target) in &items {
        let acts: Vec<_> = negative.items().iter().map(|n| model.forward(e, n)).collect();
        let u: Vec<f64> = acts.iter().map(|a| a.score).collect();
        let (psi, dpsi_dnu) = aggregate_with_grad(&u, nu, mode, Some(&mut du));
        loss += softplus(-target * psi);
        let dpsi = -target * sigmoid(-target * psi) / n_items;
        for (a, d) in acts.iter().zip(&du) {
            if *d != 0.0 {
                model.backward(a, dpsi * d, &mut grad);
            }
        }
        if nu_active {
            if let Some(g) = grad.nu.as_mut() {
                *g += dpsi * dpsi_dnu;
            }
        }
    }
    Ok((loss / n_items, grad))
}
