//! Fixed-metric relation scorers used as baselines.

use super::relation::{dot, RelationScorer};

/// Cosine similarity. Zero vectors score 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CosineScorer {
    pub nu: f64,
}

impl Default for CosineScorer {
    fn default() -> Self {
        Self { nu: 1.0 }
    }
}

pub fn cosine_similarity(f: &[f64], g: &[f64]) -> f64 {
    let nf = dot(f, f).sqrt();
    let ng = dot(g, g).sqrt();
    if nf == 0.0 || ng == 0.0 {
        return 0.0;
    }
    (dot(f, g) / (nf * ng)).clamp(-1.0, 1.0)
}

impl RelationScorer for CosineScorer {
    fn score(&self, f: &[f64], g: &[f64]) -> f64 {
        cosine_similarity(f, g)
    }

    fn temperature(&self) -> f64 {
        self.nu.max(0.0)
    }
}

/// Negative Euclidean distance.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NegEuclideanScorer;

impl RelationScorer for NegEuclideanScorer {
    fn score(&self, f: &[f64], g: &[f64]) -> f64 {
        -f.iter().zip(g).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
    }
}

/// Scores every pair with the same value.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ConstantScorer(pub f64);

impl RelationScorer for ConstantScorer {
    fn score(&self, _: &[f64], _: &[f64]) -> f64 {
        self.0
    }
}
