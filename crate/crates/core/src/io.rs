//! JSON episode format.
//!
//! ```json
//! {"dim": 2,
//!  "positive_bags": [{"features": [[0.1, 0.2], [0.3, 0.4]], "labels": [3, -1]}, ...],
//!  "negative_bag": {"features": [[...]], "labels": [...]},
//!  "target_class": 3,
//!  "seed": 17}
//! ```
//!
//! Background items carry class id `-1`. Doubles round-trip exactly.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{Bag, Episode, FeatureVector, ItemLabel};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BagRecord {
    pub features: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<i64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpisodeRecord {
    pub dim: usize,
    pub positive_bags: Vec<BagRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub negative_bag: Option<BagRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_class: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub num_classes_sampled: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl BagRecord {
    fn from_bag(bag: &Bag) -> Self {
        Self {
            features: bag.items().iter().map(|f| f.as_slice().to_vec()).collect(),
            labels: bag
                .labels()
                .map(|l| l.iter().map(|label| label.class_id).collect()),
        }
    }

    fn into_bag(self, dim: usize, what: &str) -> Result<Bag> {
        let mut items = Vec::with_capacity(self.features.len());
        for (k, f) in self.features.into_iter().enumerate() {
            if f.len() != dim {
                return Err(Error::InvalidEpisode(format!(
                    "{what}, item {k}: expected dim {dim}, found {}",
                    f.len()
                )));
            }
            items.push(FeatureVector::new(f)?);
        }
        let labels = self
            .labels
            .map(|l| l.into_iter().map(ItemLabel::new).collect());
        Bag::new(items, labels).map_err(|e| Error::InvalidEpisode(format!("{what}: {e}")))
    }
}

impl From<&Episode> for EpisodeRecord {
    fn from(ep: &Episode) -> Self {
        Self {
            dim: ep.dim(),
            positive_bags: ep.positive_bags().iter().map(BagRecord::from_bag).collect(),
            negative_bag: ep.negative_bag().map(BagRecord::from_bag),
            target_class: ep.target_class,
            num_classes_sampled: ep.num_classes_sampled,
            seed: ep.seed,
        }
    }
}

impl TryFrom<EpisodeRecord> for Episode {
    type Error = Error;

    fn try_from(r: EpisodeRecord) -> Result<Self> {
        let dim = r.dim;
        let bags = r
            .positive_bags
            .into_iter()
            .enumerate()
            .map(|(i, b)| b.into_bag(dim, &format!("positive bag {i}")))
            .collect::<Result<Vec<_>>>()?;
        let negative = r
            .negative_bag
            .map(|b| b.into_bag(dim, "negative bag"))
            .transpose()?;
        let mut ep = Episode::new(bags, negative)?;
        ep.num_classes_sampled = r.num_classes_sampled;
        ep.seed = r.seed;
        match r.target_class {
            Some(t) => ep.with_target(t),
            None => Ok(ep),
        }
    }
}

impl Serialize for Episode {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        EpisodeRecord::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Episode {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let record = EpisodeRecord::deserialize(d)?;
        Episode::try_from(record).map_err(serde::de::Error::custom)
    }
}

pub fn episode_to_json(ep: &Episode) -> Result<String> {
    Ok(serde_json::to_string(ep)?)
}

pub fn episode_from_json(text: &str) -> Result<Episode> {
    Ok(serde_json::from_str(text)?)
}

pub fn read_episode(path: impl AsRef<Path>) -> Result<Episode> {
    episode_from_json(&std::fs::read_to_string(path)?)
}

pub fn write_episode(ep: &Episode, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, episode_to_json(ep)?)?;
    Ok(())
}
