//! Iterated conditional modes with random restarts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::energy::energy_unchecked;
use crate::error::{Error, Result};
use crate::potentials::{PotentialProvider, PotentialSource};
use crate::types::Selection;

use super::Solution;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IcmConfig {
    pub restarts: usize,
    pub max_sweeps: usize,
    pub seed: u64,
}

impl Default for IcmConfig {
    fn default() -> Self {
        Self {
            restarts: 10,
            max_sweeps: 100,
            seed: 0,
        }
    }
}

/// Outcome plus, per restart, the starting energy followed by the energy
/// after every sweep.
#[derive(Debug, Clone)]
pub struct IcmTrace {
    pub solution: Solution,
    pub sweep_energies: Vec<Vec<f64>>,
}

pub fn icm_infer<S: PotentialSource>(
    provider: &PotentialProvider<S>,
    eta: f64,
    config: IcmConfig,
) -> Result<Solution> {
    icm_infer_traced(provider, eta, config).map(|t| t.solution)
}

/// Each restart starts from a uniformly random selection and sweeps the bags
/// in order, moving a bag to its conditional argmin only on strict
/// improvement, until a sweep changes nothing.
pub fn icm_infer_traced<S: PotentialSource>(
    provider: &PotentialProvider<S>,
    eta: f64,
    config: IcmConfig,
) -> Result<IcmTrace> {
    if config.restarts == 0 {
        return Err(Error::InvalidConfig("icm needs at least one restart".into()));
    }
    let sizes = provider.bag_sizes().to_vec();
    let n = sizes.len();
    if n < 2 {
        return Err(Error::InvalidEpisode(format!("need at least 2 bags, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut best: Option<(Vec<usize>, f64)> = None;
    let mut sweeps_total = 0;
    let mut traces = Vec::with_capacity(config.restarts);

    let local = |bag: usize, item: usize, current: &[usize]| -> f64 {
        let mut c = if eta == 0.0 { 0.0 } else { eta * provider.unary_potential(bag, item) };
        for (other, &q) in current.iter().enumerate() {
            if other != bag {
                c += provider.pairwise_between(bag, item, other, q);
            }
        }
        c
    };

    for _ in 0..config.restarts {
        let mut current: Vec<usize> = sizes.iter().map(|&s| rng.random_range(0..s)).collect();
        let mut trace = vec![energy_unchecked(&current, provider, eta)];
        for _ in 0..config.max_sweeps {
            sweeps_total += 1;
            let mut changed = false;
            for bag in 0..n {
                let mut best_item = current[bag];
                let mut best_cost = local(bag, best_item, &current);
                for item in 0..sizes[bag] {
                    let c = local(bag, item, &current);
                    if c < best_cost {
                        best_cost = c;
                        best_item = item;
                    }
                }
                if best_item != current[bag] {
                    current[bag] = best_item;
                    changed = true;
                }
            }
            trace.push(energy_unchecked(&current, provider, eta));
            if !changed {
                break;
            }
        }
        let e = energy_unchecked(&current, provider, eta);
        if best.as_ref().is_none_or(|(_, b)| e < *b) {
            best = Some((current, e));
        }
        traces.push(trace);
    }
    let (indices, energy) = best.expect("at least one restart");
    Ok(IcmTrace {
        solution: Solution {
            selection: Selection(indices),
            energy,
            iterations: Some(sweeps_total),
        },
        sweep_energies: traces,
    })
}
