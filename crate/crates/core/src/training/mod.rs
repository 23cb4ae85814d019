//! Learning the pairwise and unary relation models by SGD on logistic losses.

mod loss;
mod sgd;

pub use loss::{pairwise_grad, pairwise_loss, softplus, unary_grad, unary_loss, PairSample};
pub use sgd::{
    initial_model, sample_training_pairs, train, write_trace_csv, ModelRole, TracePoint,
    TrainConfig, TrainOutcome, DEFAULT_PAIR_BUDGET,
};
