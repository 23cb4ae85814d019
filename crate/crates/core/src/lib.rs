//! Selects one item per bag so that the selected items share a latent class.
//!
//! Selection is posed as minimizing an energy made of learned pairwise
//! relation potentials between bags plus unary potentials against an optional
//! negative bag. Inference is a divide-and-conquer beam search that only
//! evaluates the pairwise potentials it needs; exhaustive search, loopy
//! min-sum belief propagation and ICM are provided for comparison.

pub mod energy;
pub mod error;
pub mod inference;
pub mod io;
pub mod potentials;
pub mod synth;
pub mod training;
pub mod types;

pub use energy::energy;
pub use error::{Error, Result};
pub use types::{
    relation_label, relation_to_bag, success_rate, Bag, EnergyConfig, Episode, FeatureVector,
    ItemLabel, Selection, BACKGROUND_CLASS,
};
