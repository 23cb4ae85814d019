use bagsel::inference::{solve, Algorithm, InferenceSettings};
use bagsel::potentials::{PotentialProvider, PotentialSource};
use bagsel::{success_rate, Episode, Error, Result};
use rayon::prelude::*;

/// `{0, 0.1, ..., 2.4}`.
pub fn default_eta_grid() -> Vec<f64> {
    (0..=24).map(|i| i as f64 / 10.0).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSearchOutcome {
    pub eta: f64,
    /// `(eta, mean success rate)` in grid order.
    pub scores: Vec<(f64, f64)>,
}

/// Picks the `eta` with the highest mean success rate on `episodes`; ties go
/// to the smaller `eta`.
///
/// Potentials do not depend on `eta`, so each episode gets one provider that
/// is reused across the whole grid.
pub fn grid_search_eta<'a, F, S>(
    episodes: &'a [Episode],
    provider_factory: F,
    algorithm: Algorithm,
    settings: &InferenceSettings,
    grid: &[f64],
) -> Result<GridSearchOutcome>
where
    F: Fn(&'a Episode) -> Result<S> + Sync,
    S: PotentialSource,
{
    if grid.is_empty() {
        return Err(Error::InvalidConfig("eta grid is empty".into()));
    }
    if let Some(bad) = grid.iter().find(|e| !(e.is_finite() && **e >= 0.0)) {
        return Err(Error::InvalidConfig(format!("eta grid value {bad} is not finite and >= 0")));
    }
    if episodes.is_empty() {
        return Err(Error::InvalidConfig("grid search needs at least one episode".into()));
    }
    let per_episode: Vec<Vec<f64>> = episodes
        .par_iter()
        .map(|ep| {
            let provider = PotentialProvider::new(provider_factory(ep)?);
            grid.iter()
                .map(|&eta| {
                    let s = solve(algorithm, &provider, &InferenceSettings { eta, ..*settings })?;
                    success_rate(&s.selection, ep)
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let n = episodes.len() as f64;
    let scores: Vec<(f64, f64)> = grid
        .iter()
        .enumerate()
        .map(|(g, &eta)| (eta, per_episode.iter().map(|s| s[g]).sum::<f64>() / n))
        .collect();
    let mut best = scores[0];
    for &(eta, score) in &scores[1..] {
        if score > best.1 || (score == best.1 && eta < best.0) {
            best = (eta, score);
        }
    }
    Ok(GridSearchOutcome { eta: best.0, scores })
}

#[cfg(test)]
mod tests {
    use super::*;
    use bagsel::potentials::{EpisodePotentials, TablePotentials, UnaryMode};
    use bagsel::types::{Bag, FeatureVector, ItemLabel};

    fn item(v: f64) -> FeatureVector {
        FeatureVector::new(vec![v]).unwrap()
    }

    fn bag(classes: &[i64]) -> Bag {
        Bag::new(
            classes.iter().map(|&c| item(c as f64)).collect(),
            Some(classes.iter().map(|&c| ItemLabel::new(c)).collect()),
        )
        .unwrap()
    }

    #[test]
    fn singleton_grid() {
        let eps = vec![Episode::new(vec![bag(&[1, 2]), bag(&[1])], None).unwrap().with_target(1).unwrap()];
        let out = grid_search_eta(
            &eps,
            |ep| Ok(EpisodePotentials::cosine(ep, UnaryMode::Softmax, 1.0)),
            Algorithm::Greedy,
            &InferenceSettings::default(),
            &[0.0],
        )
        .unwrap();
        assert_eq!(out.eta, 0.0);
    }

    #[test]
    fn no_negative_bags_returns_grid_minimum() {
        let eps = vec![Episode::new(vec![bag(&[1, 2]), bag(&[2, 1])], None).unwrap().with_target(1).unwrap()];
        let out = grid_search_eta(
            &eps,
            |ep| Ok(EpisodePotentials::cosine(ep, UnaryMode::Softmax, 1.0)),
            Algorithm::Greedy,
            &InferenceSettings::default(),
            &[1.5, 0.3, 2.0],
        )
        .unwrap();
        assert_eq!(out.eta, 0.3);
        assert!(out.scores.iter().all(|s| s.1 == out.scores[0].1));
    }

    #[test]
    fn picks_the_eta_that_helps() {
        // Pairwise prefers item 0 in both bags (wrong); unary strongly
        // penalizes item 0, so large eta selects the target items.
        let ep = Episode::new(vec![bag(&[2, 1]), bag(&[2, 1])], None).unwrap().with_target(1).unwrap();
        let eps = vec![ep];
        let out = grid_search_eta(
            &eps,
            |_| {
                let mut t = TablePotentials::zeros(&[2, 2]);
                t.set_pairwise(1, 0, 0, 0, -1.0)?;
                t.set_unary(0, 0, 1.0);
                t.set_unary(1, 0, 1.0);
                Ok(t)
            },
            Algorithm::Greedy,
            &InferenceSettings::default(),
            &default_eta_grid(),
        )
        .unwrap();
        // Energies: (0,0) = -1 + 2 eta, (1,1) = 0, mixed = eta; target wins once eta > 0.5.
        assert!((out.eta - 0.6).abs() < 1e-12);
        assert_eq!(out.scores.len(), 25);
    }

    #[test]
    fn rejects_empty_grid() {
        let eps = vec![Episode::new(vec![bag(&[1]), bag(&[1])], None).unwrap().with_target(1).unwrap()];
        let f = |ep| Ok(EpisodePotentials::cosine(ep, UnaryMode::Softmax, 1.0));
        assert!(grid_search_eta(&eps, f, Algorithm::Greedy, &InferenceSettings::default(), &[]).is_err());
        assert!(grid_search_eta(&eps, f, Algorithm::Greedy, &InferenceSettings::default(), &[-1.0]).is_err());
    }
}
