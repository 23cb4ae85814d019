use crate::energy::energy_unchecked;
use crate::error::{Error, Result};
use crate::potentials::{PotentialProvider, PotentialSource};
use crate::types::Selection;

use super::Solution;

/// Default cap on the number of enumerated selections.
pub const DEFAULT_EXHAUSTIVE_CAP: u128 = 1_000_000;

/// Number of full selections, `prod_i |bag_i|`.
pub fn search_space_size(sizes: &[usize]) -> u128 {
    sizes.iter().map(|&s| s as u128).product()
}

/// Exact minimum by depth-first enumeration in lexicographic order.
///
/// Ties keep the lexicographically first selection. Every pairwise potential
/// is evaluated.
pub fn exhaustive_infer<S: PotentialSource>(
    provider: &PotentialProvider<S>,
    eta: f64,
    cap: u128,
) -> Result<Solution> {
    let sizes = provider.bag_sizes();
    let size = search_space_size(sizes);
    if size > cap {
        return Err(Error::SearchSpaceTooLarge { size, cap });
    }
    let n = sizes.len();
    let mut search = Search {
        provider,
        eta,
        current: Vec::with_capacity(n),
        best: None,
    };
    search.descend(0.0);
    let (indices, _) = search.best.expect("at least one selection");
    let energy = energy_unchecked(&indices, provider, eta);
    Ok(Solution {
        selection: Selection(indices),
        energy,
        iterations: None,
    })
}

struct Search<'a, S> {
    provider: &'a PotentialProvider<S>,
    eta: f64,
    current: Vec<usize>,
    best: Option<(Vec<usize>, f64)>,
}

impl<S: PotentialSource> Search<'_, S> {
    fn descend(&mut self, partial: f64) {
        let bag = self.current.len();
        let sizes = self.provider.bag_sizes();
        if bag == sizes.len() {
            if self.best.as_ref().is_none_or(|(_, e)| partial < *e) {
                self.best = Some((self.current.clone(), partial));
            }
            return;
        }
        for item in 0..sizes[bag] {
            let mut e = partial;
            if self.eta != 0.0 {
                e += self.eta * self.provider.unary_potential(bag, item);
            }
            for (j, &q) in self.current.iter().enumerate() {
                e += self.provider.pairwise_canonical(bag, item, j, q);
            }
            self.current.push(item);
            self.descend(e);
            self.current.pop();
        }
    }
}
