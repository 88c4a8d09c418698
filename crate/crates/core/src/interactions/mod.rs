//! Visual-interaction computations shared by both projection backends.

mod constraints;
mod feasibility;
mod marks;
pub mod proline;

pub use constraints::{ConstraintSet, DeltaConstraints, FeatureConstraint};
pub use feasibility::{compute_feasibility_map, is_feasible_at, FeasibilityMap, PlaneBounds, PCA_FEASIBILITY_TOL};
pub use marks::{projection_marks, Direction, ProjectionMark};
pub use proline::{compute_proline, compute_prolines, proline_lengths, Proline, ProlineConfig, ProlineSample};

use crate::Point2;

/// Where a dragged point ends up: `candidate` when feasible, otherwise the
/// last feasible position.
pub fn snap_state(last_feasible: Point2, candidate: Point2, feasible: bool) -> Point2 {
    if feasible {
        candidate
    } else {
        last_feasible
    }
}
