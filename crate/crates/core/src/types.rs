//! Domain types shared by every module: items, bags, episodes and selections.

use std::ops::Deref;

use crate::error::{Error, Result};

/// Class id reserved for background items.
pub const BACKGROUND_CLASS: i64 = -1;

/// A point in the feature space standing in for one image.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector(Vec<f64>);

impl FeatureVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("feature vector"));
        }
        Ok(Self(values))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for FeatureVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Latent label of an item. Background items never relate to anything.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ItemLabel {
    pub class_id: i64,
    pub is_background: bool,
}

impl ItemLabel {
    pub fn new(class_id: i64) -> Self {
        Self {
            class_id,
            is_background: class_id == BACKGROUND_CLASS,
        }
    }

    pub fn background() -> Self {
        Self::new(BACKGROUND_CLASS)
    }
}

/// Ground-truth relation: `+1` iff both items share a foreground class.
pub fn relation_label(a: ItemLabel, b: ItemLabel) -> i8 {
    if a.class_id == b.class_id && !a.is_background && !b.is_background {
        1
    } else {
        -1
    }
}

/// Extended relation of an item to a whole bag: `+1` iff it relates to any member.
pub fn relation_to_bag(a: ItemLabel, bag: &Bag) -> Result<i8> {
    let labels = bag
        .labels()
        .ok_or(Error::Unlabeled("bag has no labels"))?;
    Ok(if labels.iter().any(|&l| relation_label(a, l) == 1) {
        1
    } else {
        -1
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bag {
    items: Vec<FeatureVector>,
    labels: Option<Vec<ItemLabel>>,
}

impl Bag {
    pub fn new(items: Vec<FeatureVector>, labels: Option<Vec<ItemLabel>>) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::InvalidEpisode("bag is empty".into()));
        }
        if let Some(labels) = &labels {
            if labels.len() != items.len() {
                return Err(Error::InvalidEpisode(format!(
                    "bag has {} items but {} labels",
                    items.len(),
                    labels.len()
                )));
            }
        }
        let dim = items[0].dim();
        if let Some(bad) = items.iter().find(|f| f.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        Ok(Self { items, labels })
    }

    pub fn unlabeled(items: Vec<FeatureVector>) -> Result<Self> {
        Self::new(items, None)
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.items[0].dim()
    }

    pub fn items(&self) -> &[FeatureVector] {
        &self.items
    }

    pub fn item(&self, index: usize) -> &FeatureVector {
        &self.items[index]
    }

    pub fn labels(&self) -> Option<&[ItemLabel]> {
        self.labels.as_deref()
    }

    pub fn without_labels(&self) -> Self {
        Self {
            items: self.items.clone(),
            labels: None,
        }
    }
}

/// One problem instance: positive bags, an optional negative bag and
/// generation metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Episode {
    dim: usize,
    positive_bags: Vec<Bag>,
    negative_bag: Option<Bag>,
    pub target_class: Option<i64>,
    pub num_classes_sampled: Option<usize>,
    pub seed: Option<u64>,
}

impl Episode {
    pub fn new(positive_bags: Vec<Bag>, negative_bag: Option<Bag>) -> Result<Self> {
        if positive_bags.len() < 2 {
            return Err(Error::InvalidEpisode(format!(
                "need at least 2 positive bags, got {}",
                positive_bags.len()
            )));
        }
        let dim = positive_bags[0].dim();
        for bag in positive_bags.iter().chain(negative_bag.iter()) {
            if bag.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: bag.dim(),
                });
            }
        }
        Ok(Self {
            dim,
            positive_bags,
            negative_bag,
            target_class: None,
            num_classes_sampled: None,
            seed: None,
        })
    }

    pub fn with_target(mut self, target_class: i64) -> Result<Self> {
        self.target_class = Some(target_class);
        self.check_target_invariants()?;
        Ok(self)
    }

    /// Every positive bag holds a target item and the negative bag holds none.
    pub fn check_target_invariants(&self) -> Result<()> {
        let Some(target) = self.target_class else {
            return Ok(());
        };
        if !self.is_labeled() {
            return Ok(());
        }
        let target = ItemLabel::new(target);
        for (i, bag) in self.positive_bags.iter().enumerate() {
            if relation_to_bag(target, bag)? != 1 {
                return Err(Error::InvalidEpisode(format!(
                    "positive bag {i} contains no item of the target class"
                )));
            }
        }
        if let Some(neg) = &self.negative_bag {
            if relation_to_bag(target, neg)? == 1 {
                return Err(Error::InvalidEpisode(
                    "negative bag contains an item of the target class".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_bags(&self) -> usize {
        self.positive_bags.len()
    }

    pub fn positive_bags(&self) -> &[Bag] {
        &self.positive_bags
    }

    pub fn bag(&self, index: usize) -> &Bag {
        &self.positive_bags[index]
    }

    pub fn negative_bag(&self) -> Option<&Bag> {
        self.negative_bag.as_ref()
    }

    pub fn bag_sizes(&self) -> Vec<usize> {
        self.positive_bags.iter().map(Bag::len).collect()
    }

    /// True when every bag, including the negative one, carries labels.
    pub fn is_labeled(&self) -> bool {
        self.positive_bags
            .iter()
            .chain(self.negative_bag.iter())
            .all(|b| b.labels().is_some())
    }

    pub fn without_negative_bag(&self) -> Self {
        Self {
            negative_bag: None,
            ..self.clone()
        }
    }

    pub fn without_labels(&self) -> Self {
        Self {
            positive_bags: self.positive_bags.iter().map(Bag::without_labels).collect(),
            negative_bag: self.negative_bag.as_ref().map(Bag::without_labels),
            ..self.clone()
        }
    }

    /// Label of item `item` in positive bag `bag`, if labeled.
    pub fn label(&self, bag: usize, item: usize) -> Option<ItemLabel> {
        self.positive_bags[bag].labels().map(|l| l[item])
    }

    pub(crate) fn push_bag(&mut self, bag: Bag) {
        self.positive_bags.push(bag);
    }
}

/// One chosen item index per positive bag.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Selection(pub Vec<usize>);

impl Selection {
    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn validate(&self, bag_sizes: &[usize]) -> Result<()> {
        if self.0.len() != bag_sizes.len() {
            return Err(Error::InvalidSelection(format!(
                "selection covers {} bags, episode has {}",
                self.0.len(),
                bag_sizes.len()
            )));
        }
        for (bag, (&idx, &size)) in self.0.iter().zip(bag_sizes).enumerate() {
            if idx >= size {
                return Err(Error::InvalidSelection(format!(
                    "index {idx} out of bounds for bag {bag} of size {size}"
                )));
            }
        }
        Ok(())
    }
}

impl Deref for Selection {
    type Target = [usize];

    fn deref(&self) -> &[usize] {
        &self.0
    }
}

impl From<Vec<usize>> for Selection {
    fn from(v: Vec<usize>) -> Self {
        Self(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyConfig {
    pub eta: f64,
}

impl EnergyConfig {
    pub fn new(eta: f64) -> Result<Self> {
        if !(eta >= 0.0 && eta.is_finite()) {
            return Err(Error::InvalidConfig(format!("eta must be finite and >= 0, got {eta}")));
        }
        Ok(Self { eta })
    }
}

/// Fraction of selected items that belong to the episode's target class.
pub fn success_rate(selection: &Selection, episode: &Episode) -> Result<f64> {
    let target = episode
        .target_class
        .ok_or(Error::Unlabeled("episode has no target class"))?;
    selection.validate(&episode.bag_sizes())?;
    let mut hits = 0usize;
    for (bag, &item) in selection.iter().enumerate() {
        let label = episode
            .label(bag, item)
            .ok_or(Error::Unlabeled("positive bag has no labels"))?;
        if label.class_id == target {
            hits += 1;
        }
    }
    Ok(hits as f64 / selection.len() as f64)
}
