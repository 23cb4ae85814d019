//! Gated pair embedding followed by a linear relation score.
//!
//! For a pair `(f, g)` with `x = [f, g]`:
//!
//! ```text
//! h = tanh(W1 x + b1) * sigmoid(W2 x + b2) + (f + g) / 2
//! r = w . h + b
//! ```
//!
//! The score is order-sensitive: `r(f, g)` and `r(g, f)` differ unless the
//! two halves of `W1` and `W2` coincide.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::FeatureVector;

/// Anything that scores how strongly two feature vectors are related.
pub trait RelationScorer: Send + Sync {
    fn score(&self, f: &[f64], g: &[f64]) -> f64;

    /// Temperature used when this scorer feeds the softmax unary aggregator.
    fn temperature(&self) -> f64 {
        1.0
    }
}

/// Parameters of the relation scorer. `nu` is only present on unary-role models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelRecord", into = "ModelRecord")]
pub struct RelationModel {
    dim: usize,
    /// `dim x 2*dim`, row-major.
    pub w1: Vec<f64>,
    /// `dim x 2*dim`, row-major.
    pub w2: Vec<f64>,
    pub b1: Vec<f64>,
    pub b2: Vec<f64>,
    pub w: Vec<f64>,
    pub b: f64,
    pub nu: Option<f64>,
}

pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

impl RelationModel {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            w1: vec![0.0; 2 * dim * dim],
            w2: vec![0.0; 2 * dim * dim],
            b1: vec![0.0; dim],
            b2: vec![0.0; dim],
            w: vec![0.0; dim],
            b: 0.0,
            nu: None,
        }
    }

    /// A model whose score is `b` for every pair.
    pub fn constant(dim: usize, b: f64) -> Self {
        Self {
            b,
            ..Self::zeros(dim)
        }
    }

    /// Weights uniform in `(-scale, scale)`, biases zero, `nu = 1` when requested.
    pub fn random<R: Rng + ?Sized>(dim: usize, scale: f64, with_nu: bool, rng: &mut R) -> Self {
        let mut m = Self::zeros(dim);
        if scale > 0.0 {
            for v in m.w1.iter_mut().chain(m.w2.iter_mut()).chain(m.w.iter_mut()) {
                *v = rng.random_range(-scale..scale);
            }
        }
        if with_nu {
            m.nu = Some(1.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dim;
        let shapes = [
            (self.w1.len(), 2 * d * d),
            (self.w2.len(), 2 * d * d),
            (self.b1.len(), d),
            (self.b2.len(), d),
            (self.w.len(), d),
        ];
        for (found, expected) in shapes {
            if found != expected {
                return Err(Error::DimensionMismatch { expected, found });
            }
        }
        let finite = self
            .w1
            .iter()
            .chain(&self.w2)
            .chain(&self.b1)
            .chain(&self.b2)
            .chain(&self.w)
            .chain(std::iter::once(&self.b))
            .chain(self.nu.iter())
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::NonFinite("relation model"));
        }
        Ok(())
    }

    fn check_pair(&self, f: &[f64], g: &[f64]) -> Result<()> {
        for v in [f, g] {
            if v.len() != self.dim {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    found: v.len(),
                });
            }
        }
        Ok(())
    }

    /// Effective unary temperature; negative stored values clamp to zero.
    pub fn effective_nu(&self) -> f64 {
        self.nu.unwrap_or(1.0).max(0.0)
    }

    pub fn embed_pair(&self, f: &FeatureVector, g: &FeatureVector) -> Result<FeatureVector> {
        self.check_pair(f, g)?;
        let acts = self.forward(f, g);
        FeatureVector::new(acts.embedding)
    }

    pub fn relation_score(&self, f: &FeatureVector, g: &FeatureVector) -> Result<f64> {
        self.check_pair(f, g)?;
        Ok(self.score_unchecked(f, g))
    }

    /// Score without building intermediate buffers. Inputs must have length `dim`.
    pub fn score_unchecked(&self, f: &[f64], g: &[f64]) -> f64 {
        let d = self.dim;
        let mut r = self.b;
        for row in 0..d {
            let r1 = &self.w1[row * 2 * d..(row + 1) * 2 * d];
            let r2 = &self.w2[row * 2 * d..(row + 1) * 2 * d];
            let a1 = self.b1[row] + dot(&r1[..d], f) + dot(&r1[d..], g);
            let a2 = self.b2[row] + dot(&r2[..d], f) + dot(&r2[d..], g);
            let h = a1.tanh() * sigmoid(a2) + 0.5 * (f[row] + g[row]);
            r += self.w[row] * h;
        }
        r
    }

    /// Forward pass keeping the activations needed for backpropagation.
    pub fn forward(&self, f: &[f64], g: &[f64]) -> PairActivations {
        let d = self.dim;
        let mut input = Vec::with_capacity(2 * d);
        input.extend_from_slice(f);
        input.extend_from_slice(g);
        let mut tanh_act = vec![0.0; d];
        let mut gate = vec![0.0; d];
        let mut embedding = vec![0.0; d];
        let mut score = self.b;
        for row in 0..d {
            let a1 = self.b1[row] + dot(&self.w1[row * 2 * d..(row + 1) * 2 * d], &input);
            let a2 = self.b2[row] + dot(&self.w2[row * 2 * d..(row + 1) * 2 * d], &input);
            tanh_act[row] = a1.tanh();
            gate[row] = sigmoid(a2);
            embedding[row] = tanh_act[row] * gate[row] + 0.5 * (f[row] + g[row]);
            score += self.w[row] * embedding[row];
        }
        PairActivations {
            input,
            tanh_act,
            gate,
            embedding,
            score,
        }
    }

    /// Accumulates `upstream * d(score)/d(params)` into `grad`.
    pub fn backward(&self, acts: &PairActivations, upstream: f64, grad: &mut RelationModel) {
        let d = self.dim;
        grad.b += upstream;
        for row in 0..d {
            grad.w[row] += upstream * acts.embedding[row];
            let dh = upstream * self.w[row];
            let t = acts.tanh_act[row];
            let s = acts.gate[row];
            let da1 = dh * s * (1.0 - t * t);
            let da2 = dh * t * s * (1.0 - s);
            grad.b1[row] += da1;
            grad.b2[row] += da2;
            let g1 = &mut grad.w1[row * 2 * d..(row + 1) * 2 * d];
            for (gw, &x) in g1.iter_mut().zip(&acts.input) {
                *gw += da1 * x;
            }
            let g2 = &mut grad.w2[row * 2 * d..(row + 1) * 2 * d];
            for (gw, &x) in g2.iter_mut().zip(&acts.input) {
                *gw += da2 * x;
            }
        }
    }

    /// Zeroed gradient accumulator with the same shape as `self`.
    pub fn zeros_like(&self) -> Self {
        let mut z = Self::zeros(self.dim);
        z.nu = self.nu.map(|_| 0.0);
        z
    }

    pub fn num_params(&self) -> usize {
        4 * self.dim * self.dim + 3 * self.dim + 1 + usize::from(self.nu.is_some())
    }

    /// Parameters flattened in the order `W1, W2, b1, b2, w, b, nu?`.
    pub fn params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.num_params());
        out.extend_from_slice(&self.w1);
        out.extend_from_slice(&self.w2);
        out.extend_from_slice(&self.b1);
        out.extend_from_slice(&self.b2);
        out.extend_from_slice(&self.w);
        out.push(self.b);
        out.extend(self.nu);
        out
    }

    pub fn set_params(&mut self, params: &[f64]) -> Result<()> {
        if params.len() != self.num_params() {
            return Err(Error::DimensionMismatch {
                expected: self.num_params(),
                found: params.len(),
            });
        }
        let mut rest = params;
        for target in [
            &mut self.w1,
            &mut self.w2,
            &mut self.b1,
            &mut self.b2,
            &mut self.w,
        ] {
            let (head, tail) = rest.split_at(target.len());
            target.copy_from_slice(head);
            rest = tail;
        }
        self.b = rest[0];
        if let Some(nu) = self.nu.as_mut() {
            *nu = rest[1];
        }
        Ok(())
    }

    /// `self += alpha * other`, parameter-wise.
    pub fn add_scaled(&mut self, alpha: f64, other: &RelationModel) {
        let pairs = [
            (&mut self.w1, &other.w1),
            (&mut self.w2, &other.w2),
            (&mut self.b1, &other.b1),
            (&mut self.b2, &other.b2),
            (&mut self.w, &other.w),
        ];
        for (dst, src) in pairs {
            for (a, b) in dst.iter_mut().zip(src) {
                *a += alpha * b;
            }
        }
        self.b += alpha * other.b;
        if let (Some(a), Some(b)) = (self.nu.as_mut(), other.nu) {
            *a += alpha * b;
        }
    }
}

impl RelationScorer for RelationModel {
    fn score(&self, f: &[f64], g: &[f64]) -> f64 {
        debug_assert_eq!(f.len(), self.dim);
        debug_assert_eq!(g.len(), self.dim);
        self.score_unchecked(f, g)
    }

    fn temperature(&self) -> f64 {
        self.effective_nu()
    }
}

/// Intermediate values of one forward pass.
#[derive(Debug, Clone)]
pub struct PairActivations {
    pub input: Vec<f64>,
    pub tanh_act: Vec<f64>,
    pub gate: Vec<f64>,
    pub embedding: Vec<f64>,
    pub score: f64,
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// On-disk model layout: matrices as arrays of rows.
#[derive(Serialize, Deserialize)]
#[allow(non_snake_case)]
struct ModelRecord {
    dim: usize,
    W1: Vec<Vec<f64>>,
    W2: Vec<Vec<f64>>,
    b1: Vec<f64>,
    b2: Vec<f64>,
    w: Vec<f64>,
    b: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    nu: Option<f64>,
}

impl From<RelationModel> for ModelRecord {
    fn from(m: RelationModel) -> Self {
        let cols = 2 * m.dim;
        let rows = |v: &[f64]| -> Vec<Vec<f64>> {
            if cols == 0 {
                Vec::new()
            } else {
                v.chunks(cols).map(<[f64]>::to_vec).collect()
            }
        };
        Self {
            dim: m.dim,
            W1: rows(&m.w1),
            W2: rows(&m.w2),
            b1: m.b1,
            b2: m.b2,
            w: m.w,
            b: m.b,
            nu: m.nu,
        }
    }
}

impl TryFrom<ModelRecord> for RelationModel {
    type Error = Error;

    fn try_from(r: ModelRecord) -> Result<Self> {
        let d = r.dim;
        for m in [&r.W1, &r.W2] {
            if m.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: m.len(),
                });
            }
            if let Some(row) = m.iter().find(|row| row.len() != 2 * d) {
                return Err(Error::DimensionMismatch {
                    expected: 2 * d,
                    found: row.len(),
                });
            }
        }
        let model = RelationModel {
            dim: d,
            w1: r.W1.concat(),
            w2: r.W2.concat(),
            b1: r.b1,
            b2: r.b2,
            w: r.w,
            b: r.b,
            nu: r.nu,
        };
        model.validate()?;
        Ok(model)
    }
}

impl RelationModel {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
