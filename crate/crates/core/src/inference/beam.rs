//! Greedy divide-and-conquer beam inference.
//!
//! Bags sit at the leaves of a full binary tree (padded to a power of two).
//! Each internal node joins its children's beams by Cartesian product, adds
//! the pairwise potentials on edges between the two halves, and keeps the
//! `k` lowest-energy partial selections. Pairwise potentials are only
//! requested for the candidates that reach a join, so most of them are
//! never evaluated when `k` is small.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::potentials::{PotentialProvider, PotentialSource};
use crate::types::Selection;

/// A partial selection over the contiguous bag range `start..start + indices.len()`.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamEntry {
    pub indices: Vec<usize>,
    pub energy: f64,
}

/// The beam kept at one tree node.
#[derive(Debug, Clone, PartialEq)]
pub struct Beam {
    pub start: usize,
    pub len: usize,
    pub entries: Vec<BeamEntry>,
}

impl Beam {
    pub fn end(&self) -> usize {
        self.start + self.len
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamConfig {
    /// Beam width.
    pub k: usize,
    pub eta: f64,
    /// Process the nodes of each tree level on the rayon pool.
    pub parallel: bool,
    /// Keep every node's beam in the outcome.
    pub record_levels: bool,
}

impl BeamConfig {
    pub fn new(k: usize, eta: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidConfig("beam width k must be >= 1".into()));
        }
        if !(eta >= 0.0 && eta.is_finite()) {
            return Err(Error::InvalidConfig(format!("eta must be finite and >= 0, got {eta}")));
        }
        Ok(Self {
            k,
            eta,
            parallel: false,
            record_levels: false,
        })
    }
}

/// Candidates produced by joining two adjacent beams, before pruning.
#[derive(Debug, Clone, PartialEq)]
pub struct Joined {
    pub start: usize,
    /// Number of bags covered by the left fragment.
    pub split: usize,
    pub len: usize,
    pub candidates: Vec<JoinedEntry>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JoinedEntry {
    pub indices: Vec<usize>,
    pub left_energy: f64,
    pub right_energy: f64,
}

/// Cartesian product of two adjacent beams, left-major.
pub fn join(left: &Beam, right: &Beam) -> Result<Joined> {
    if left.end() != right.start {
        return Err(Error::NonAdjacentBeams {
            left_start: left.start,
            left_end: left.end(),
            right_start: right.start,
        });
    }
    let mut candidates = Vec::with_capacity(left.entries.len() * right.entries.len());
    for l in &left.entries {
        for r in &right.entries {
            let mut indices = Vec::with_capacity(left.len + right.len);
            indices.extend_from_slice(&l.indices);
            indices.extend_from_slice(&r.indices);
            candidates.push(JoinedEntry {
                indices,
                left_energy: l.energy,
                right_energy: r.energy,
            });
        }
    }
    Ok(Joined {
        start: left.start,
        split: left.len,
        len: left.len + right.len,
        candidates,
    })
}

/// Energy of a joined candidate: both fragment energies plus every pairwise
/// potential on an edge crossing the split. Bags at or beyond the provider's
/// bag count are padding and contribute nothing.
pub fn energy_combine<S: PotentialSource>(
    joined: &Joined,
    entry: &JoinedEntry,
    provider: &PotentialProvider<S>,
) -> f64 {
    let n = provider.num_bags();
    let mut cross = 0.0;
    for b in joined.split..joined.len {
        let bag_b = joined.start + b;
        if bag_b >= n {
            break;
        }
        for a in 0..joined.split {
            cross += provider.pairwise_canonical(bag_b, entry.indices[b], joined.start + a, entry.indices[a]);
        }
    }
    entry.left_energy + entry.right_energy + cross
}

/// The `k` lowest-energy entries, ascending. Ties keep input order.
pub fn prune(mut entries: Vec<BeamEntry>, k: usize) -> Vec<BeamEntry> {
    entries.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    entries.truncate(k);
    entries
}

#[derive(Debug, Clone)]
pub struct GreedyOutcome {
    pub selection: Selection,
    pub energy: f64,
    /// Pruned root beam, restricted to real bags.
    pub root: Vec<BeamEntry>,
    /// Beams of every node, level by level from the leaves (only when recorded).
    pub levels: Vec<Vec<Beam>>,
}

fn leaf_beams<S: PotentialSource>(
    provider: &PotentialProvider<S>,
    padded: usize,
    eta: f64,
) -> Vec<Beam> {
    let n = provider.num_bags();
    (0..padded)
        .map(|bag| {
            // Leaves hold the whole bag; pruning starts at the first join.
            let entries = if bag < n {
                (0..provider.bag_sizes()[bag])
                    .map(|item| BeamEntry {
                        indices: vec![item],
                        energy: if eta == 0.0 {
                            0.0
                        } else {
                            eta * provider.unary_potential(bag, item)
                        },
                    })
                    .collect()
            } else {
                vec![BeamEntry {
                    indices: vec![0],
                    energy: 0.0,
                }]
            };
            Beam {
                start: bag,
                len: 1,
                entries,
            }
        })
        .collect()
}

fn join_node<S: PotentialSource>(
    left: &Beam,
    right: &Beam,
    provider: &PotentialProvider<S>,
    k: usize,
) -> Beam {
    let joined = join(left, right).expect("sibling beams are adjacent");
    let scored = joined
        .candidates
        .iter()
        .map(|c| BeamEntry {
            energy: energy_combine(&joined, c, provider),
            indices: c.indices.clone(),
        })
        .collect();
    Beam {
        start: joined.start,
        len: joined.len,
        entries: prune(scored, k),
    }
}

/// Runs the beam search and returns the minimum-energy root selection.
pub fn greedy_infer<S: PotentialSource>(
    provider: &PotentialProvider<S>,
    config: BeamConfig,
) -> Result<GreedyOutcome> {
    if config.k == 0 {
        return Err(Error::InvalidConfig("beam width k must be >= 1".into()));
    }
    let n = provider.num_bags();
    if n < 2 {
        return Err(Error::InvalidEpisode(format!("need at least 2 bags, got {n}")));
    }
    let padded = n.next_power_of_two();
    let mut level = leaf_beams(provider, padded, config.eta);
    let mut levels = Vec::new();
    while level.len() > 1 {
        let next: Vec<Beam> = if config.parallel {
            level
                .par_chunks(2)
                .map(|pair| join_node(&pair[0], &pair[1], provider, config.k))
                .collect()
        } else {
            level
                .chunks(2)
                .map(|pair| join_node(&pair[0], &pair[1], provider, config.k))
                .collect()
        };
        if config.record_levels {
            levels.push(std::mem::replace(&mut level, next));
        } else {
            level = next;
        }
    }
    let root = level.pop().expect("root beam");
    if config.record_levels {
        levels.push(vec![root.clone()]);
    }
    let root_entries: Vec<BeamEntry> = root
        .entries
        .into_iter()
        .map(|mut e| {
            e.indices.truncate(n);
            e
        })
        .collect();
    let best = root_entries.first().expect("non-empty root beam").clone();
    Ok(GreedyOutcome {
        selection: Selection(best.indices),
        energy: best.energy,
        root: root_entries,
        levels,
    })
}
