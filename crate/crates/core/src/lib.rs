//! Spectral clustering accelerated by spectrum-preserving node reduction.
//!
//! The pipeline builds a kNN similarity graph over the samples, coarsens its
//! Laplacian by aggregating nodes whose smoothed test-vector values are nearly
//! parallel, runs a dense eigen-decomposition and k-means on the (small)
//! coarsest graph, and lifts cluster membership back to every sample through
//! the fine-to-coarse correspondence table.
//!
//! ```text
//! Dataset ──kNN──▶ SimilarityGraph ──L = D - A──▶ LaplacianMatrix
//!                                                    │ smooth + aggregate + Galerkin (per level)
//!                                                    ▼
//!                                          CoarseningHierarchy ──▶ L_R (P × P)
//!                                                    │ bottom eigenvectors
//!                                                    ▼
//!                                          Embedding U (P × k) ──k-means──▶ coarse labels
//!                                                    │ correspondence lookup
//!                                                    ▼
//!                                          labels for all N samples
//! ```
//!
//! Module map:
//!
//! | Module | Purpose |
//! |--------|---------|
//! | [`dataio`] | CSV / LibSVM / IDX loaders and synthetic shape generators |
//! | [`graph`] | CSR matrices, kNN graph, Laplacian, connected components |
//! | [`coarsen`] | Test-vector smoothing, affinity, aggregation, Galerkin reduction |
//! | [`spectral`] | Symmetric eigensolvers and the spectral embedding |
//! | [`cluster`] | k-means and membership lift-back |
//! | [`evalmetrics`] | Hungarian matching and clustering accuracy |
//! | [`pipeline`] | End-to-end runs, ratio sweeps, scaling probes, reports |

pub mod cluster;
pub mod coarsen;
pub mod dataio;
pub mod evalmetrics;
pub mod graph;
pub mod matrix;
pub mod pipeline;
pub mod spectral;

pub use cluster::{kmeans, lift_membership, ClusterResult, KMeansParams, KMeansResult};
pub use coarsen::{
    affinity, aggregate_level, build_hierarchy, galerkin_reduce, smooth_test_vectors,
    CoarsenParams, CoarseningHierarchy, MappingOperator, TestVectors,
};
pub use dataio::Dataset;
pub use evalmetrics::{accuracy, hungarian_max, AccReport, ConfusionMatrix};
pub use graph::{
    build_knn_graph, connected_components, laplacian, LaplacianMatrix, SimilarityGraph,
    SparseMatrix, Weighting,
};
pub use matrix::DenseMatrix;
pub use pipeline::{bench_sweep, run_pipeline, scaling_probe, EvalReport, Mode, RunConfig};
pub use spectral::{bottom_eigs, embed_rows, EigenOptions, Embedding};
