//! Robust k-means clustering via KNN-distance outlier removal.
//!
//! The toolkit removes a prescribed budget of z outliers by ranking points
//! on their K-nearest-neighbor distances — either the radius to a single
//! rank or a mid-range sum of ranks — and then runs standard k-means on the
//! remainder. Supporting machinery covers exact blocked KNN, a weighted
//! k-means++/Lloyd solver, uniform coresets, approximation-ratio tables, and
//! a brute-force oracle for tiny instances.
//!
//! All numeric code is generic over the scalar type through
//! [`scalar::Real`]; the `*64`/`*32` aliases below pin the common choices.

// `!(x > 0)`-style guards are deliberate: they reject NaN parameters, which
// the suggested `x <= 0` would wave through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dataset;
pub mod error;
pub mod kmeans;
pub mod knn;
pub mod oracle;
pub mod rng;
pub mod robust;
pub mod scalar;
pub mod scoring;
pub mod theory;

pub use dataset::{CenterSet, Dataset, Objective, RobustInstance};
pub use error::{Error, Result};
pub use robust::{ClusteringResult, CoresetSpec, Method, MethodKind};
pub use scalar::Real;

pub type Dataset64 = dataset::Dataset<f64>;
pub type Dataset32 = dataset::Dataset<f32>;
pub type RobustInstance64 = dataset::RobustInstance<f64>;
pub type RobustInstance32 = dataset::RobustInstance<f32>;
pub type CenterSet64 = dataset::CenterSet<f64>;
pub type CenterSet32 = dataset::CenterSet<f32>;
pub type ClusteringResult64 = robust::ClusteringResult<f64>;
pub type ClusteringResult32 = robust::ClusteringResult<f32>;
pub type SolverConfig64 = kmeans::SolverConfig<f64>;
pub type SolverConfig32 = kmeans::SolverConfig<f32>;
pub type Method64 = robust::Method<f64>;
pub type NeighborTable64 = knn::NeighborTable<f64>;
pub type ScoreVector64 = scoring::ScoreVector<f64>;
