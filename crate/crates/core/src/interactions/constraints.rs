use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Constraint on one feature, in original feature units.
///
/// Unbounded sides are `-inf` / `+inf`; on the wire they are `null`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureConstraint {
    #[serde(default)]
    pub lock: Option<f64>,
    #[serde(default = "neg_inf", with = "lower_bound")]
    pub lower: f64,
    #[serde(default = "pos_inf", with = "upper_bound")]
    pub upper: f64,
}

fn neg_inf() -> f64 {
    f64::NEG_INFINITY
}

fn pos_inf() -> f64 {
    f64::INFINITY
}

macro_rules! bound_serde {
    ($name:ident, $inf:expr) => {
        mod $name {
            use serde::{Deserialize, Deserializer, Serializer};

            pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
                if v.is_finite() {
                    s.serialize_some(v)
                } else {
                    s.serialize_none()
                }
            }

            pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
                Ok(Option::<f64>::deserialize(d)?.unwrap_or($inf))
            }
        }
    };
}

bound_serde!(lower_bound, f64::NEG_INFINITY);
bound_serde!(upper_bound, f64::INFINITY);

impl Default for FeatureConstraint {
    fn default() -> Self {
        FeatureConstraint {
            lock: None,
            lower: f64::NEG_INFINITY,
            upper: f64::INFINITY,
        }
    }
}

impl FeatureConstraint {
    pub fn is_free(&self) -> bool {
        self.lock.is_none() && self.lower == f64::NEG_INFINITY && self.upper == f64::INFINITY
    }
}

/// Per-feature locks and bounds on one selected point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ConstraintSet {
    features: Vec<FeatureConstraint>,
}

/// Constraints rewritten relative to a point `x`: `dx[i] = locks[i]`,
/// `lower[i] <= dx[i] <= upper[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaConstraints {
    pub locks: Vec<Option<f64>>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl ConstraintSet {
    pub fn unconstrained(d: usize) -> Self {
        ConstraintSet {
            features: vec![FeatureConstraint::default(); d],
        }
    }

    pub fn from_features(features: Vec<FeatureConstraint>) -> Result<Self> {
        let cs = ConstraintSet { features };
        cs.validate()?;
        Ok(cs)
    }

    pub fn dim(&self) -> usize {
        self.features.len()
    }

    pub fn features(&self) -> &[FeatureConstraint] {
        &self.features
    }

    pub fn get(&self, i: usize) -> &FeatureConstraint {
        &self.features[i]
    }

    pub fn is_empty(&self) -> bool {
        self.features.iter().all(FeatureConstraint::is_free)
    }

    pub fn lock(&mut self, i: usize, value: f64) -> &mut Self {
        self.features[i].lock = Some(value);
        self
    }

    pub fn unlock(&mut self, i: usize) -> &mut Self {
        self.features[i].lock = None;
        self
    }

    pub fn set_lower(&mut self, i: usize, lower: f64) -> &mut Self {
        self.features[i].lower = lower;
        self
    }

    pub fn set_upper(&mut self, i: usize, upper: f64) -> &mut Self {
        self.features[i].upper = upper;
        self
    }

    pub fn set_bounds(&mut self, i: usize, lower: f64, upper: f64) -> &mut Self {
        self.features[i].lower = lower;
        self.features[i].upper = upper;
        self
    }

    /// Checks `lower <= upper` and `lower <= lock <= upper` per feature.
    pub fn validate(&self) -> Result<()> {
        for (i, c) in self.features.iter().enumerate() {
            let bad = |reason: String| Err(Error::InvalidConstraint { feature: i, reason });
            if c.lower.is_nan() || c.upper.is_nan() || c.lower == f64::INFINITY || c.upper == f64::NEG_INFINITY {
                return bad(format!("invalid bounds [{}, {}]", c.lower, c.upper));
            }
            if c.lower > c.upper {
                return bad(format!("lower bound {} exceeds upper bound {}", c.lower, c.upper));
            }
            if let Some(v) = c.lock {
                if !v.is_finite() {
                    return bad(format!("lock value {v} is not finite"));
                }
                if v < c.lower || v > c.upper {
                    return bad(format!("lock value {v} outside [{}, {}]", c.lower, c.upper));
                }
            }
        }
        Ok(())
    }

    /// Translates absolute constraints to changes relative to `x`:
    /// `lower - x`, `upper - x`, `lock - x`.
    pub fn delta_form(&self, x: &[f64]) -> Result<DeltaConstraints> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        self.validate()?;
        Ok(DeltaConstraints {
            locks: self.features.iter().zip(x).map(|(c, xi)| c.lock.map(|v| v - xi)).collect(),
            lower: self.features.iter().zip(x).map(|(c, xi)| c.lower - xi).collect(),
            upper: self.features.iter().zip(x).map(|(c, xi)| c.upper - xi).collect(),
        })
    }
}
