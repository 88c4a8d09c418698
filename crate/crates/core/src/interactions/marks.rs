use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::DrModel;
use crate::Point2;

const DEAD_BAND: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Increasing,
    Decreasing,
    Unchanged,
}

/// Where feature `feature_index` alone would put the point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectionMark {
    pub feature_index: usize,
    pub position: Point2,
    pub direction: Direction,
}

/// One mark per feature: the projection of `original_x` with only feature
/// `i` replaced by `current_x[i]`.
pub fn projection_marks(model: &DrModel, original_x: &[f64], current_x: &[f64]) -> Result<Vec<ProjectionMark>> {
    if original_x.len() != current_x.len() {
        return Err(Error::DimensionMismatch {
            expected: original_x.len(),
            found: current_x.len(),
        });
    }
    let mut probe = original_x.to_vec();
    (0..original_x.len())
        .map(|i| {
            probe[i] = current_x[i];
            let position = model.project(&probe);
            probe[i] = original_x[i];
            let diff = current_x[i] - original_x[i];
            let direction = if diff > DEAD_BAND {
                Direction::Increasing
            } else if diff < -DEAD_BAND {
                Direction::Decreasing
            } else {
                Direction::Unchanged
            };
            Ok(ProjectionMark {
                feature_index: i,
                position: position?,
                direction,
            })
        })
        .collect()
}
