//! Loopy min-sum belief propagation on the complete graph of bags.

use crate::energy::energy_unchecked;
use crate::error::{Error, Result};
use crate::potentials::{PotentialProvider, PotentialSource};
use crate::types::Selection;

use super::Solution;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BpConfig {
    pub max_iters: usize,
    /// Weight of the previous message in each update.
    pub damping: f64,
    /// Convergence threshold on the largest message change.
    pub tol: f64,
}

impl Default for BpConfig {
    fn default() -> Self {
        Self {
            max_iters: 200,
            damping: 0.5,
            tol: 1e-6,
        }
    }
}

/// Runs synchronous damped min-sum and decodes each bag's belief argmin.
///
/// Messages are normalized so their minimum is 0. The reported iteration
/// count is the number of message sweeps performed.
pub fn loopy_bp_infer<S: PotentialSource>(
    provider: &PotentialProvider<S>,
    eta: f64,
    config: BpConfig,
) -> Result<Solution> {
    if !(0.0..1.0).contains(&config.damping) {
        return Err(Error::InvalidConfig(format!(
            "damping must lie in [0, 1), got {}",
            config.damping
        )));
    }
    let sizes = provider.bag_sizes().to_vec();
    let n = sizes.len();
    if n < 2 {
        return Err(Error::InvalidEpisode(format!("need at least 2 bags, got {n}")));
    }

    let unary: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..sizes[i])
                .map(|p| if eta == 0.0 { 0.0 } else { eta * provider.unary_potential(i, p) })
                .collect()
        })
        .collect();
    // tables[i * n + j] for i > j, row-major over (item of i, item of j).
    let mut tables = vec![Vec::new(); n * n];
    for i in 0..n {
        for j in 0..i {
            let mut t = Vec::with_capacity(sizes[i] * sizes[j]);
            for p in 0..sizes[i] {
                for q in 0..sizes[j] {
                    t.push(provider.pairwise_canonical(i, p, j, q));
                }
            }
            tables[i * n + j] = t;
        }
    }

    // messages[i * n + j]: message from bag i to bag j, indexed by items of j.
    let mut messages: Vec<Vec<f64>> = (0..n * n).map(|idx| vec![0.0; sizes[idx % n]]).collect();
    let mut incoming: Vec<Vec<f64>> = unary.clone();
    let mut iterations = 0;
    let mut h = Vec::new();
    for _ in 0..config.max_iters {
        iterations += 1;
        for (i, total) in incoming.iter_mut().enumerate() {
            total.copy_from_slice(&unary[i]);
            for k in (0..n).filter(|&k| k != i) {
                for (t, m) in total.iter_mut().zip(&messages[k * n + i]) {
                    *t += m;
                }
            }
        }
        let mut delta: f64 = 0.0;
        let mut next = messages.clone();
        for i in 0..n {
            for j in (0..n).filter(|&j| j != i) {
                h.clear();
                h.extend(
                    incoming[i]
                        .iter()
                        .zip(&messages[j * n + i])
                        .map(|(t, m)| t - m),
                );
                let out = &mut next[i * n + j];
                for (q, slot) in out.iter_mut().enumerate() {
                    let mut best = f64::INFINITY;
                    for (p, hp) in h.iter().enumerate() {
                        let pair = if i > j {
                            tables[i * n + j][p * sizes[j] + q]
                        } else {
                            tables[j * n + i][q * sizes[i] + p]
                        };
                        best = best.min(hp + pair);
                    }
                    *slot = best;
                }
                let min = out.iter().copied().fold(f64::INFINITY, f64::min);
                for (slot, old) in out.iter_mut().zip(&messages[i * n + j]) {
                    let damped = config.damping * old + (1.0 - config.damping) * (*slot - min);
                    delta = delta.max((damped - old).abs());
                    *slot = damped;
                }
            }
        }
        messages = next;
        if delta < config.tol {
            break;
        }
    }

    let indices: Vec<usize> = (0..n)
        .map(|i| {
            let mut belief = unary[i].clone();
            for k in (0..n).filter(|&k| k != i) {
                for (b, m) in belief.iter_mut().zip(&messages[k * n + i]) {
                    *b += m;
                }
            }
            belief
                .iter()
                .enumerate()
                .fold((0, f64::INFINITY), |best, (p, &v)| if v < best.1 { (p, v) } else { best })
                .0
        })
        .collect();
    let energy = energy_unchecked(&indices, provider, eta);
    Ok(Solution {
        selection: Selection(indices),
        energy,
        iterations: Some(iterations),
    })
}
