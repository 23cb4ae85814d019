use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// How an item's relation scores against the negative bag collapse into one
/// unary potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum UnaryMode {
    /// Temperature-weighted average; mean at `nu = 0`, max as `nu` grows.
    #[default]
    Softmax,
    Max,
    Mean,
    /// Unary term is identically zero.
    None,
}

impl UnaryMode {
    pub const ALL: [UnaryMode; 4] = [Self::Softmax, Self::Max, Self::Mean, Self::None];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Softmax => "softmax",
            Self::Max => "max",
            Self::Mean => "mean",
            Self::None => "none",
        }
    }
}

impl fmt::Display for UnaryMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for UnaryMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "softmax" => Ok(Self::Softmax),
            "max" => Ok(Self::Max),
            "mean" => Ok(Self::Mean),
            "none" => Ok(Self::None),
            other => Err(Error::InvalidConfig(format!("unknown unary mode `{other}`"))),
        }
    }
}

/// Collapses the scores `u` into one value. Empty input aggregates to 0.
pub fn aggregate_unary(u: &[f64], nu: f64, mode: UnaryMode) -> f64 {
    aggregate_with_grad(u, nu, mode, None).0
}

/// Aggregates and, when `du` is given, writes `d(value)/d(u_k)` into it.
/// Returns `(value, d(value)/d(nu))`.
pub fn aggregate_with_grad(
    u: &[f64],
    nu: f64,
    mode: UnaryMode,
    du: Option<&mut [f64]>,
) -> (f64, f64) {
    if u.is_empty() {
        return (0.0, 0.0);
    }
    let n = u.len() as f64;
    match mode {
        UnaryMode::None => {
            if let Some(du) = du {
                du.fill(0.0);
            }
            (0.0, 0.0)
        }
        UnaryMode::Mean => {
            if let Some(du) = du {
                du.fill(1.0 / n);
            }
            (u.iter().sum::<f64>() / n, 0.0)
        }
        UnaryMode::Max => {
            let (arg, &max) = u
                .iter()
                .enumerate()
                .fold((0, &u[0]), |best, (i, v)| if *v > *best.1 { (i, v) } else { best });
            if let Some(du) = du {
                du.fill(0.0);
                du[arg] = 1.0;
            }
            (max, 0.0)
        }
        UnaryMode::Softmax => {
            let nu = nu.max(0.0);
            let max = u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let weights: Vec<f64> = u.iter().map(|&v| (nu * (v - max)).exp()).collect();
            let z: f64 = weights.iter().sum();
            let value = weights.iter().zip(u).map(|(w, v)| w * v).sum::<f64>() / z;
            // d/dnu is the variance of u under the softmax weights.
            let dnu = weights
                .iter()
                .zip(u)
                .map(|(w, v)| w * v * (v - value))
                .sum::<f64>()
                / z;
            if let Some(du) = du {
                for ((d, w), v) in du.iter_mut().zip(&weights).zip(u) {
                    *d = w / z * (1.0 + nu * (v - value));
                }
            }
            (value, dnu)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn softmax_examples() {
        assert_eq!(aggregate_unary(&[0.2, 0.8], 0.0, UnaryMode::Softmax), 0.5);
        assert!((aggregate_unary(&[0.2, 0.8], 1000.0, UnaryMode::Softmax) - 0.8).abs() < 1e-9);
        // (1*e + 2*e^2) / (e + e^2)
        let e = std::f64::consts::E;
        let expected = (e + 2.0 * e * e) / (e + e * e);
        let got = aggregate_unary(&[1.0, 2.0], 1.0, UnaryMode::Softmax);
        assert!((got - expected).abs() < 1e-12);
        assert!((got - 1.731_058_578_630_005).abs() < 1e-12);
    }

    #[test]
    fn other_modes() {
        let u = [0.5, -1.0, 2.0, 0.1];
        assert_eq!(aggregate_unary(&u, 3.0, UnaryMode::Max), 2.0);
        assert!((aggregate_unary(&u, 3.0, UnaryMode::Mean) - 0.4).abs() < 1e-15);
        assert_eq!(aggregate_unary(&u, 3.0, UnaryMode::None), 0.0);
    }

    #[test]
    fn large_temperature_does_not_overflow() {
        let v = aggregate_unary(&[800.0, 799.0], 10.0, UnaryMode::Softmax);
        assert!(v.is_finite() && (v - 800.0).abs() < 1e-3);
    }

    #[test]
    fn negative_temperature_clamps_to_mean() {
        assert_eq!(
            aggregate_unary(&[1.0, 3.0], -4.0, UnaryMode::Softmax),
            aggregate_unary(&[1.0, 3.0], 0.0, UnaryMode::Softmax)
        );
    }

    #[test]
    fn temperature_gradient_matches_finite_difference() {
        let u = [0.3, -1.2, 2.5, 0.9];
        let nu = 0.7;
        let (_, dnu) = aggregate_with_grad(&u, nu, UnaryMode::Softmax, None);
        let h = 1e-6;
        let fd = (aggregate_unary(&u, nu + h, UnaryMode::Softmax)
            - aggregate_unary(&u, nu - h, UnaryMode::Softmax))
            / (2.0 * h);
        assert!((dnu - fd).abs() < 1e-8);
        let (_, flat) = aggregate_with_grad(&[1.5; 3], nu, UnaryMode::Softmax, None);
        assert!(flat.abs() < 1e-15);
    }

    #[test]
    fn mode_parsing() {
        for mode in UnaryMode::ALL {
            assert_eq!(mode.as_str().parse::<UnaryMode>().unwrap(), mode);
        }
        assert!("median".parse::<UnaryMode>().is_err());
    }

    fn scores() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-5.0f64..5.0, 1..12)
    }

    proptest! {
        #[test]
        fn softmax_stays_within_range(u in scores(), nu in 0.0f64..100.0) {
            let v = aggregate_unary(&u, nu, UnaryMode::Softmax);
            let lo = u.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(v >= lo - 1e-12 && v <= hi + 1e-12);
        }

        #[test]
        fn softmax_is_monotone_in_temperature(u in scores(), nu in 0.0f64..20.0, step in 0.0f64..5.0) {
            let a = aggregate_unary(&u, nu, UnaryMode::Softmax);
            let b = aggregate_unary(&u, nu + step, UnaryMode::Softmax);
            prop_assert!(b >= a - 1e-12);
        }

        #[test]
        fn softmax_limits(u in scores()) {
            let mean = aggregate_unary(&u, 0.0, UnaryMode::Mean);
            prop_assert!((aggregate_unary(&u, 0.0, UnaryMode::Softmax) - mean).abs() < 1e-12);
            let max = aggregate_unary(&u, 0.0, UnaryMode::Max);
            prop_assert!((aggregate_unary(&u, 1e6, UnaryMode::Softmax) - max).abs() < 1e-4);
        }
    }
}
