//! Interactive exploration of 2D projections of tabular data.
//!
//! A fitted projection (PCA or a dense autoencoder) is treated as a pair of
//! maps: *forward* (feature edits to plane movement, an out-of-sample
//! extension that never refits the model) and *backward* (plane movement to
//! feature edits, optionally under per-feature locks and bounds). On top of
//! those sit prolines, projection marks and feasibility maps.

pub mod autoencoder;
pub mod dataset;
pub mod error;
pub mod evaluation;
pub mod exec;
pub mod interactions;
pub mod model;
pub mod pca;
pub mod solver;

pub use autoencoder::{AeModel, TrainConfig};
pub use dataset::{Dataset, FeatureStats};
pub use error::{Error, Result};
pub use exec::Execution;
pub use interactions::{ConstraintSet, FeasibilityMap, PlaneBounds, Proline, ProjectionMark};
pub use model::DrModel;
pub use pca::PcaModel;
pub use solver::{QpProblem, QpSolution};

/// A position on the projection plane.
pub type Point2 = [f64; 2];
