//! Scalability and accuracy protocol: synthetic data, k-NN neighbourhoods,
//! the neighbourhood correlation index and the OOS-vs-recompute benchmark.

mod bench;
mod knn;
mod score;
mod synthetic;

pub use bench::{run_benchmark, BenchConfig, BenchReport, BenchRow, Op, SettingAxis};
pub use knn::knn;
pub use score::{neighborhood_correlation, NeighborhoodScore};
pub use synthetic::gen_gaussian;
