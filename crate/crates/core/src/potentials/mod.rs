//! Relation scorers, unary aggregation and the lazy potential provider.

mod aggregate;
mod provider;
mod relation;
mod scorers;

pub use aggregate::{aggregate_unary, aggregate_with_grad, UnaryMode};
pub use provider::{
    cosine_baseline_provider, unary_scores, EpisodePotentials, Masked, PotentialProvider,
    PotentialSource, TablePotentials,
};
pub use relation::{PairActivations, RelationModel, RelationScorer};
pub use scorers::{cosine_similarity, ConstantScorer, CosineScorer, NegEuclideanScorer};

pub(crate) use relation::sigmoid;
