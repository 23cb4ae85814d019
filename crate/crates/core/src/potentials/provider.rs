//! Lazy, memoizing and instrumented access to unary and pairwise potentials.
//!
//! Pairwise potentials are keyed by `(bag_i, item_p, bag_j, item_q)` with
//! `bag_i > bag_j`. Each key is evaluated at most once; the counter of
//! evaluated keys backs the pairwise-fraction column of benchmark reports.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::OnceLock;

use rand::Rng;

use super::aggregate::{aggregate_unary, UnaryMode};
use super::relation::RelationScorer;
use super::scorers::CosineScorer;
use crate::error::{Error, Result};
use crate::types::{Episode, FeatureVector};

impl<T: RelationScorer + ?Sized> RelationScorer for &T {
    fn score(&self, f: &[f64], g: &[f64]) -> f64 {
        (**self).score(f, g)
    }

    fn temperature(&self) -> f64 {
        (**self).temperature()
    }
}

impl<T: RelationScorer + ?Sized> RelationScorer for Box<T> {
    fn score(&self, f: &[f64], g: &[f64]) -> f64 {
        (**self).score(f, g)
    }

    fn temperature(&self) -> f64 {
        (**self).temperature()
    }
}

/// Raw (uncached) potentials over a fixed bag structure.
pub trait PotentialSource: Send + Sync {
    fn bag_sizes(&self) -> &[usize];

    /// Pairwise potential for canonical `bag_i > bag_j`.
    fn pairwise(&self, bag_i: usize, item_p: usize, bag_j: usize, item_q: usize) -> f64;

    /// Unweighted unary potential of one positive-bag item.
    fn unary(&self, bag: usize, item: usize) -> f64;
}

impl<S: PotentialSource + ?Sized> PotentialSource for &S {
    fn bag_sizes(&self) -> &[usize] {
        (**self).bag_sizes()
    }

    fn pairwise(&self, bag_i: usize, item_p: usize, bag_j: usize, item_q: usize) -> f64 {
        (**self).pairwise(bag_i, item_p, bag_j, item_q)
    }

    fn unary(&self, bag: usize, item: usize) -> f64 {
        (**self).unary(bag, item)
    }
}

/// Relation scores of `e` against every item of the negative bag, in order.
pub fn unary_scores(
    e: &[f64],
    negatives: &[FeatureVector],
    scorer: &dyn RelationScorer,
) -> Result<Vec<f64>> {
    if negatives.is_empty() {
        return Err(Error::InvalidEpisode("negative bag is empty".into()));
    }
    Ok(negatives.iter().map(|n| scorer.score(e, n)).collect())
}

/// Potentials computed from an episode's features with relation scorers.
pub struct EpisodePotentials<'a> {
    episode: &'a Episode,
    sizes: Vec<usize>,
    pairwise: Box<dyn RelationScorer + 'a>,
    unary: Option<Box<dyn RelationScorer + 'a>>,
    mode: UnaryMode,
}

impl<'a> EpisodePotentials<'a> {
    pub fn new(
        episode: &'a Episode,
        pairwise: Box<dyn RelationScorer + 'a>,
        unary: Option<Box<dyn RelationScorer + 'a>>,
        mode: UnaryMode,
    ) -> Self {
        Self {
            episode,
            sizes: episode.bag_sizes(),
            pairwise,
            unary,
            mode,
        }
    }

    /// Separate pairwise and unary scorers, typically two trained models.
    pub fn learned<P, U>(episode: &'a Episode, pairwise: &'a P, unary: Option<&'a U>, mode: UnaryMode) -> Self
    where
        P: RelationScorer,
        U: RelationScorer,
    {
        Self::new(
            episode,
            Box::new(pairwise),
            unary.map(|u| Box::new(u) as Box<dyn RelationScorer + 'a>),
            mode,
        )
    }

    /// Cosine similarity for both potentials.
    pub fn cosine(episode: &'a Episode, mode: UnaryMode, nu: f64) -> Self {
        Self::new(
            episode,
            Box::new(CosineScorer { nu }),
            Some(Box::new(CosineScorer { nu })),
            mode,
        )
    }

    pub fn episode(&self) -> &Episode {
        self.episode
    }
}

impl PotentialSource for EpisodePotentials<'_> {
    fn bag_sizes(&self) -> &[usize] {
        &self.sizes
    }

    fn pairwise(&self, bag_i: usize, item_p: usize, bag_j: usize, item_q: usize) -> f64 {
        let f = self.episode.bag(bag_i).item(item_p);
        let g = self.episode.bag(bag_j).item(item_q);
        -self.pairwise.score(f, g)
    }

    fn unary(&self, bag: usize, item: usize) -> f64 {
        if self.mode == UnaryMode::None {
            return 0.0;
        }
        let (Some(scorer), Some(negative)) = (&self.unary, self.episode.negative_bag()) else {
            return 0.0;
        };
        let e = self.episode.bag(bag).item(item);
        let u: Vec<f64> = negative.items().iter().map(|n| scorer.score(e, n)).collect();
        aggregate_unary(&u, scorer.temperature(), self.mode)
    }
}

/// Offsets of canonical pair keys in a dense table.
#[derive(Debug, Clone)]
struct PairLayout {
    sizes: Vec<usize>,
    /// `base[i * n + j]` for `i > j`.
    base: Vec<usize>,
    total: usize,
    unary_base: Vec<usize>,
    unary_total: usize,
}

impl PairLayout {
    fn new(sizes: &[usize]) -> Self {
        let n = sizes.len();
        let mut base = vec![usize::MAX; n * n];
        let mut total = 0;
        for i in 0..n {
            for j in 0..i {
                base[i * n + j] = total;
                total += sizes[i] * sizes[j];
            }
        }
        let mut unary_base = Vec::with_capacity(n);
        let mut unary_total = 0;
        for &s in sizes {
            unary_base.push(unary_total);
            unary_total += s;
        }
        Self {
            sizes: sizes.to_vec(),
            base,
            total,
            unary_base,
            unary_total,
        }
    }

    #[inline]
    fn pair(&self, i: usize, p: usize, j: usize, q: usize) -> usize {
        debug_assert!(i > j && p < self.sizes[i] && q < self.sizes[j]);
        self.base[i * self.sizes.len() + j] + p * self.sizes[j] + q
    }

    #[inline]
    fn unary(&self, bag: usize, item: usize) -> usize {
        debug_assert!(item < self.sizes[bag]);
        self.unary_base[bag] + item
    }

    fn check(&self, i: usize, p: usize, j: usize, q: usize) -> Result<()> {
        if i <= j {
            return Err(Error::NonCanonicalPair { bag_i: i, bag_j: j });
        }
        let n = self.sizes.len();
        if i >= n || p >= self.sizes[i] || q >= self.sizes[j] {
            return Err(Error::InvalidSelection(format!(
                "pair key ({i}, {p}, {j}, {q}) out of bounds"
            )));
        }
        Ok(())
    }
}

/// Explicit potential tables, handy for random instances and hand-built examples.
#[derive(Debug, Clone)]
pub struct TablePotentials {
    layout: PairLayout,
    pairwise: Vec<f64>,
    unary: Vec<f64>,
}

impl TablePotentials {
    pub fn zeros(sizes: &[usize]) -> Self {
        let layout = PairLayout::new(sizes);
        Self {
            pairwise: vec![0.0; layout.total],
            unary: vec![0.0; layout.unary_total],
            layout,
        }
    }

    /// Pairwise values uniform in `[-1, 1)`, unaries uniform in `[0, 1)`.
    pub fn random<R: Rng + ?Sized>(sizes: &[usize], rng: &mut R) -> Self {
        let mut t = Self::zeros(sizes);
        t.pairwise.iter_mut().for_each(|v| *v = rng.random_range(-1.0..1.0));
        t.unary.iter_mut().for_each(|v| *v = rng.random_range(0.0..1.0));
        t
    }

    pub fn from_fn(
        sizes: &[usize],
        mut pairwise: impl FnMut(usize, usize, usize, usize) -> f64,
        mut unary: impl FnMut(usize, usize) -> f64,
    ) -> Self {
        let mut t = Self::zeros(sizes);
        for i in 0..sizes.len() {
            for p in 0..sizes[i] {
                t.unary[t.layout.unary(i, p)] = unary(i, p);
                for j in 0..i {
                    for q in 0..sizes[j] {
                        let k = t.layout.pair(i, p, j, q);
                        t.pairwise[k] = pairwise(i, p, j, q);
                    }
                }
            }
        }
        t
    }

    pub fn set_pairwise(&mut self, i: usize, p: usize, j: usize, q: usize, value: f64) -> Result<()> {
        self.layout.check(i, p, j, q)?;
        let k = self.layout.pair(i, p, j, q);
        self.pairwise[k] = value;
        Ok(())
    }

    pub fn set_unary(&mut self, bag: usize, item: usize, value: f64) {
        let k = self.layout.unary(bag, item);
        self.unary[k] = value;
    }

    /// Adds `delta` to every pairwise entry.
    pub fn shift_pairwise(&mut self, delta: f64) {
        self.pairwise.iter_mut().for_each(|v| *v += delta);
    }
}

impl PotentialSource for TablePotentials {
    fn bag_sizes(&self) -> &[usize] {
        &self.layout.sizes
    }

    fn pairwise(&self, bag_i: usize, item_p: usize, bag_j: usize, item_q: usize) -> f64 {
        self.pairwise[self.layout.pair(bag_i, item_p, bag_j, item_q)]
    }

    fn unary(&self, bag: usize, item: usize) -> f64 {
        self.unary[self.layout.unary(bag, item)]
    }
}

/// Zeroes every potential touching a bag whose mask entry is `false`.
pub struct Masked<S> {
    inner: S,
    real: Vec<bool>,
}

impl<S: PotentialSource> Masked<S> {
    pub fn new(inner: S, real: Vec<bool>) -> Result<Self> {
        if real.len() != inner.bag_sizes().len() {
            return Err(Error::DimensionMismatch {
                expected: inner.bag_sizes().len(),
                found: real.len(),
            });
        }
        Ok(Self { inner, real })
    }
}

impl<S: PotentialSource> PotentialSource for Masked<S> {
    fn bag_sizes(&self) -> &[usize] {
        self.inner.bag_sizes()
    }

    fn pairwise(&self, bag_i: usize, item_p: usize, bag_j: usize, item_q: usize) -> f64 {
        if self.real[bag_i] && self.real[bag_j] {
            self.inner.pairwise(bag_i, item_p, bag_j, item_q)
        } else {
            0.0
        }
    }

    fn unary(&self, bag: usize, item: usize) -> f64 {
        if self.real[bag] {
            self.inner.unary(bag, item)
        } else {
            0.0
        }
    }
}

/// Memoizing front-end over a [`PotentialSource`].
///
/// Safe for concurrent queries: each key is computed by exactly one caller
/// and every caller observes the same value.
pub struct PotentialProvider<S> {
    source: S,
    layout: PairLayout,
    pair_cache: Vec<OnceLock<f64>>,
    unary_cache: Vec<OnceLock<f64>>,
    evaluated: AtomicUsize,
}

impl<S: PotentialSource> PotentialProvider<S> {
    pub fn new(source: S) -> Self {
        let layout = PairLayout::new(source.bag_sizes());
        Self {
            pair_cache: (0..layout.total).map(|_| OnceLock::new()).collect(),
            unary_cache: (0..layout.unary_total).map(|_| OnceLock::new()).collect(),
            layout,
            source,
            evaluated: AtomicUsize::new(0),
        }
    }

    pub fn source(&self) -> &S {
        &self.source
    }

    pub fn num_bags(&self) -> usize {
        self.layout.sizes.len()
    }

    pub fn bag_sizes(&self) -> &[usize] {
        &self.layout.sizes
    }

    /// Pairwise potential for `bag_i > bag_j`; other orders are rejected.
    pub fn pairwise_potential(
        &self,
        bag_i: usize,
        item_p: usize,
        bag_j: usize,
        item_q: usize,
    ) -> Result<f64> {
        self.layout.check(bag_i, item_p, bag_j, item_q)?;
        Ok(self.pairwise_canonical(bag_i, item_p, bag_j, item_q))
    }

    #[inline]
    pub(crate) fn pairwise_canonical(&self, i: usize, p: usize, j: usize, q: usize) -> f64 {
        let key = self.layout.pair(i, p, j, q);
        *self.pair_cache[key].get_or_init(|| {
            self.evaluated.fetch_add(1, Ordering::Relaxed);
            self.source.pairwise(i, p, j, q)
        })
    }

    /// Pairwise potential between `(bag_a, item_a)` and `(bag_b, item_b)`,
    /// evaluated in canonical order. Bags must differ.
    #[inline]
    pub fn pairwise_between(&self, bag_a: usize, item_a: usize, bag_b: usize, item_b: usize) -> f64 {
        if bag_a > bag_b {
            self.pairwise_canonical(bag_a, item_a, bag_b, item_b)
        } else {
            self.pairwise_canonical(bag_b, item_b, bag_a, item_a)
        }
    }

    /// Unweighted unary potential, memoized.
    pub fn unary_potential(&self, bag: usize, item: usize) -> f64 {
        let key = self.layout.unary(bag, item);
        *self.unary_cache[key].get_or_init(|| self.source.unary(bag, item))
    }

    pub fn pairwise_evaluated(&self) -> usize {
        self.evaluated.load(Ordering::Relaxed)
    }

    pub fn pairwise_total_possible(&self) -> usize {
        self.layout.total
    }

    pub fn evaluated_fraction(&self) -> f64 {
        if self.layout.total == 0 {
            return 0.0;
        }
        self.pairwise_evaluated() as f64 / self.layout.total as f64
    }
}

/// Provider with cosine-similarity potentials for both terms.
pub fn cosine_baseline_provider(
    episode: &Episode,
    mode: UnaryMode,
    nu: f64,
) -> PotentialProvider<EpisodePotentials<'_>> {
    PotentialProvider::new(EpisodePotentials::cosine(episode, mode, nu))
}
