//! Seeded synthetic episodes over a Gaussian latent-class feature model.
//!
//! Every class has a prototype drawn once from an isotropic Gaussian; items
//! are prototype plus isotropic Gaussian noise. Train, validation and test
//! splits use disjoint class ids, so models are always evaluated on classes
//! they never saw.

mod dataset;

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{Bag, Episode, FeatureVector, ItemLabel};

pub use dataset::{load_dataset, read_dataset, save_dataset, write_dataset, Dataset, DatasetHeader};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Validation,
    Test,
}

impl Split {
    fn stream_tag(self) -> u64 {
        match self {
            Self::Train => 1,
            Self::Validation => 2,
            Self::Test => 3,
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Train => "train",
            Self::Validation => "validation",
            Self::Test => "test",
        })
    }
}

impl FromStr for Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(Self::Train),
            "validation" | "val" => Ok(Self::Validation),
            "test" => Ok(Self::Test),
            other => Err(Error::InvalidConfig(format!("unknown split `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub dim: usize,
    pub num_train_classes: usize,
    pub num_val_classes: usize,
    pub num_test_classes: usize,
    /// Per-coordinate standard deviation of class prototypes.
    pub prototype_scale: f64,
    /// Trailing coordinates that carry no class signal: prototypes are zero
    /// there and item noise has standard deviation `nuisance_sigma`.
    /// Zero (the default) keeps both prototypes and noise isotropic.
    #[serde(default)]
    pub nuisance_dims: usize,
    #[serde(default)]
    pub nuisance_sigma: f64,
    /// Per-coordinate standard deviation of items around their prototype.
    pub noise_sigma: f64,
    /// Positive bags per episode (N).
    pub num_bags: usize,
    /// Items per positive bag (B).
    pub bag_size: usize,
    /// Negative bag size; 0 omits the negative bag.
    pub negative_size: usize,
    /// Inclusive range for the number of classes per episode (M).
    pub classes_min: usize,
    pub classes_max: usize,
    pub seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        let dim = 16;
        Self {
            dim,
            num_train_classes: 1000,
            num_val_classes: 20,
            num_test_classes: 20,
            prototype_scale: 3.0 * 0.3 / (dim as f64).sqrt(),
            nuisance_dims: 0,
            nuisance_sigma: 0.0,
            noise_sigma: 0.3,
            num_bags: 8,
            bag_size: 5,
            negative_size: 10,
            classes_min: 5,
            classes_max: 15,
            seed: 0,
        }
    }
}

impl GeneratorConfig {
    /// Sets `prototype_scale` so that the expected prototype norm is about
    /// `separation` noise standard deviations; prototypes of two classes are
    /// then about `sqrt(2) * separation` apart.
    pub fn with_separation(mut self, separation: f64) -> Self {
        self.prototype_scale = separation * self.noise_sigma / (self.dim as f64).sqrt();
        self
    }

    /// Separation implied by the current scales (inverse of [`Self::with_separation`]).
    pub fn separation(&self) -> f64 {
        if self.noise_sigma == 0.0 {
            return f64::INFINITY;
        }
        self.prototype_scale * (self.dim as f64).sqrt() / self.noise_sigma
    }

    /// Class-count range used for the bag sizes of the standard protocol:
    /// 5..=15 for 5 items per bag and 10..=20 for 10.
    pub fn with_bag_size(mut self, bag_size: usize) -> Self {
        self.bag_size = bag_size;
        (self.classes_min, self.classes_max) = if bag_size >= 10 { (10, 20) } else { (5, 15) };
        self
    }

    pub fn num_classes(&self) -> usize {
        self.num_train_classes + self.num_val_classes + self.num_test_classes
    }

    /// Class ids belonging to a split.
    pub fn class_pool(&self, split: Split) -> std::ops::Range<i64> {
        let t = self.num_train_classes as i64;
        let v = self.num_val_classes as i64;
        let s = self.num_test_classes as i64;
        match split {
            Split::Train => 0..t,
            Split::Validation => t..t + v,
            Split::Test => t + v..t + v + s,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if self.dim == 0 {
            return bad("dim must be >= 1");
        }
        if self.nuisance_dims >= self.dim {
            return bad("nuisance_dims must be < dim");
        }
        if self.num_bags < 2 {
            return bad("num_bags must be >= 2");
        }
        if self.bag_size == 0 {
            return bad("bag_size must be >= 1");
        }
        if self.classes_min < 2 || self.classes_max < self.classes_min {
            return bad("class range must satisfy 2 <= min <= max");
        }
        if !(self.prototype_scale >= 0.0 && self.noise_sigma >= 0.0)
            || !self.prototype_scale.is_finite()
            || !(self.nuisance_sigma >= 0.0 && self.nuisance_sigma.is_finite())
            || !self.noise_sigma.is_finite()
        {
            return bad("prototype_scale and noise_sigma must be finite and >= 0");
        }
        Ok(())
    }
}

/// One prototype per class id `0..num_classes()`, deterministic in the seed.
pub fn make_class_prototypes(config: &GeneratorConfig) -> Vec<FeatureVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(0);
    let signal = config.dim - config.nuisance_dims.min(config.dim);
    (0..config.num_classes())
        .map(|_| {
            let mut p = gaussian_vector(&mut rng, signal, config.prototype_scale, None).into_inner();
            p.resize(config.dim, 0.0);
            FeatureVector::new(p).expect("finite prototype")
        })
        .collect()
}

fn gaussian_vector<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    sigma: f64,
    mean: Option<&[f64]>,
) -> FeatureVector {
    let values = (0..dim)
        .map(|k| {
            let centre = mean.map_or(0.0, |m| m[k]);
            if sigma == 0.0 {
                centre
            } else {
                centre + Normal::new(0.0, sigma).expect("finite sigma").sample(rng)
            }
        })
        .collect();
    FeatureVector::new(values).expect("finite gaussian sample")
}

/// A 1-shot classification task: one support item per class plus a query.
#[derive(Debug, Clone, PartialEq)]
pub struct OneShotTask {
    pub support: Vec<FeatureVector>,
    pub support_classes: Vec<i64>,
    pub query: FeatureVector,
    pub query_class: i64,
}

/// Episode source with precomputed class prototypes.
#[derive(Debug, Clone)]
pub struct EpisodeGenerator {
    config: GeneratorConfig,
    prototypes: Vec<FeatureVector>,
}

impl EpisodeGenerator {
    pub fn new(config: GeneratorConfig) -> Result<Self> {
        config.validate()?;
        let prototypes = make_class_prototypes(&config);
        Ok(Self { config, prototypes })
    }

    pub fn config(&self) -> &GeneratorConfig {
        &self.config
    }

    pub fn prototypes(&self) -> &[FeatureVector] {
        &self.prototypes
    }

    pub fn prototype(&self, class_id: i64) -> &FeatureVector {
        &self.prototypes[class_id as usize]
    }

    /// Item of a class: prototype plus isotropic noise.
    pub fn sample_item<R: Rng + ?Sized>(&self, class_id: i64, rng: &mut R) -> FeatureVector {
        let c = &self.config;
        let item = gaussian_vector(rng, c.dim, c.noise_sigma, Some(self.prototype(class_id)));
        if c.nuisance_dims == 0 {
            return item;
        }
        let signal = c.dim - c.nuisance_dims;
        let mut values = item.into_inner();
        for v in &mut values[signal..] {
            *v = if c.noise_sigma == 0.0 { 0.0 } else { *v * c.nuisance_sigma / c.noise_sigma };
        }
        FeatureVector::new(values).expect("finite gaussian sample")
    }

    /// Deterministic RNG for episode `index` of `split`.
    pub fn episode_rng(&self, split: Split, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        rng.set_stream((split.stream_tag() << 56) | (index & ((1 << 56) - 1)));
        rng
    }

    /// Episode `index` of `split`; fully determined by config, seed and index.
    pub fn episode(&self, split: Split, index: u64) -> Result<Episode> {
        let mut rng = self.episode_rng(split, index);
        self.generate_episode(split, &mut rng)
    }

    /// Samples M classes (the first is the target), fills every positive bag
    /// with one target item plus `B - 1` items uniform over the M classes in
    /// random order, and draws the negative bag from the M - 1 non-target
    /// classes.
    pub fn generate_episode<R: Rng + ?Sized>(&self, split: Split, rng: &mut R) -> Result<Episode> {
        let c = &self.config;
        let pool = c.class_pool(split);
        let pool_size = (pool.end - pool.start) as usize;
        if pool_size < c.classes_min {
            return Err(Error::InvalidConfig(format!(
                "{split} split has {pool_size} classes, episodes need at least {}",
                c.classes_min
            )));
        }
        let m = rng.random_range(c.classes_min..=c.classes_max).min(pool_size);
        let classes: Vec<i64> = sample(rng, pool_size, m)
            .into_iter()
            .map(|k| pool.start + k as i64)
            .collect();
        let target = classes[0];

        let mut bags = Vec::with_capacity(c.num_bags);
        for _ in 0..c.num_bags {
            let mut labels = vec![target];
            labels.extend((1..c.bag_size).map(|_| classes[rng.random_range(0..m)]));
            for i in (1..labels.len()).rev() {
                labels.swap(i, rng.random_range(0..=i));
            }
            let items = labels.iter().map(|&l| self.sample_item(l, rng)).collect();
            bags.push(Bag::new(items, Some(labels.into_iter().map(ItemLabel::new).collect()))?);
        }
        let negative = if c.negative_size > 0 {
            let labels: Vec<i64> = (0..c.negative_size)
                .map(|_| classes[rng.random_range(1..m)])
                .collect();
            let items = labels.iter().map(|&l| self.sample_item(l, rng)).collect();
            Some(Bag::new(items, Some(labels.into_iter().map(ItemLabel::new).collect()))?)
        } else {
            None
        };
        let mut episode = Episode::new(bags, negative)?.with_target(target)?;
        episode.num_classes_sampled = Some(m);
        episode.seed = Some(c.seed);
        Ok(episode)
    }

    /// Endless episode stream starting at `start`.
    pub fn stream(&self, split: Split, start: u64) -> impl Iterator<Item = Episode> + '_ {
        (start..).map(move |i| self.episode(split, i).expect("validated generator config"))
    }

    pub fn episodes(&self, split: Split, count: usize) -> Result<Vec<Episode>> {
        (0..count as u64).map(|i| self.episode(split, i)).collect()
    }

    /// `ways`-way 1-shot task `index`: one support item per sampled class
    /// and one query from a uniformly chosen support class.
    pub fn one_shot_task(&self, split: Split, ways: usize, index: u64) -> Result<OneShotTask> {
        let pool = self.config.class_pool(split);
        let pool_size = (pool.end - pool.start) as usize;
        if ways < 2 || pool_size < ways {
            return Err(Error::InvalidConfig(format!(
                "{ways}-way tasks need at least {ways} classes, {split} split has {pool_size}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed ^ 0x0e5e_0000_0000_0000);
        rng.set_stream((split.stream_tag() << 56) | (index & ((1 << 56) - 1)));
        let classes: Vec<i64> = sample(&mut rng, pool_size, ways)
            .into_iter()
            .map(|k| pool.start + k as i64)
            .collect();
        let support = classes.iter().map(|&c| self.sample_item(c, &mut rng)).collect();
        let query_class = classes[rng.random_range(0..ways)];
        let query = self.sample_item(query_class, &mut rng);
        Ok(OneShotTask {
            support,
            support_classes: classes,
            query,
            query_class,
        })
    }
}
