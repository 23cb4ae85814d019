use crate::error::Result;
use crate::potentials::{PotentialProvider, PotentialSource};
use crate::types::{EnergyConfig, Selection};

/// Energy of a full selection: pairwise potentials over every pair of bags
/// (canonical order `i > j`) plus `eta` times the unary potentials.
pub fn energy<S: PotentialSource>(
    selection: &Selection,
    provider: &PotentialProvider<S>,
    config: EnergyConfig,
) -> Result<f64> {
    selection.validate(provider.bag_sizes())?;
    Ok(energy_unchecked(selection, provider, config.eta))
}

pub(crate) fn energy_unchecked<S: PotentialSource>(
    selection: &[usize],
    provider: &PotentialProvider<S>,
    eta: f64,
) -> f64 {
    let mut pairwise = 0.0;
    for i in 1..selection.len() {
        for j in 0..i {
            pairwise += provider.pairwise_canonical(i, selection[i], j, selection[j]);
        }
    }
    if eta == 0.0 {
        return pairwise;
    }
    let unary: f64 = selection
        .iter()
        .enumerate()
        .map(|(bag, &item)| provider.unary_potential(bag, item))
        .sum();
    pairwise + eta * unary
}
