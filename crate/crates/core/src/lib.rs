//! Local spectral similarity (LSS) edge detection for hyperspectral image cubes.
//!
//! Every pixel of a cube is a spectrum. LSS compares the spectrum at the
//! center of a square window with each of its neighbors, producing a small
//! patch of spectral distances, and reduces that patch to a single edge
//! strength with an order statistic (median, MAD, ...) or a convolution
//! kernel. The crate also carries what is needed to evaluate and use those
//! edge maps: Otsu binarization, Pratt's figure of merit, multichannel
//! gradient baselines, PCA projection, edge-masked k-means and band-wise
//! normalized mutual information.
//!
//! The numeric core is generic over [`Scalar`] (`f32` or `f64`). Cubes are
//! stored on disk as `float32` ENVI files; the aliases at the crate root name
//! the concrete types used by the command-line front end.

pub mod baselines;
pub mod cluster;
pub mod cube;
pub mod degrade;
pub mod envi;
pub mod error;
pub mod eval;
pub mod lss;
pub mod metrics;
pub mod nmi;
pub mod pca;
pub mod pgm;
pub mod raster;
pub mod repro;
pub mod scalar;
pub mod synth;

pub use baselines::{baseline_edge_map, BaselineKind};
pub use cluster::{kmeans_cluster, ClusterMap};
pub use cube::{HsiCube, Interleave, Spectrum};
pub use degrade::{add_gaussian_noise, downsample};
pub use envi::{read_envi, write_envi};
pub use error::{Error, Result};
pub use eval::{evaluate, otsu_threshold, EvalReport, DEFAULT_ALPHA};
pub use lss::{aggregate, edge_map, similarity_patch, Aggregator, LssConfig, Padding, SimilarityPatch};
pub use metrics::{distance, MetricKind, MetricSpec};
pub use nmi::band_mi_sensitivity;
pub use pca::{pca_fit, pca_project, PcaModel};
pub use raster::{BinaryEdgeMap, EdgeMap, GroundTruthEdges, Mask};
pub use scalar::Scalar;
pub use synth::{synth_scene, Region, RegionShape, SceneSpec};

/// Single-precision cube, the on-disk representation.
pub type Cube32 = HsiCube<f32>;
/// Double-precision cube, used for processing.
pub type Cube64 = HsiCube<f64>;
pub type EdgeMap32 = EdgeMap<f32>;
pub type EdgeMap64 = EdgeMap<f64>;
pub type PcaModel64 = PcaModel<f64>;
pub type ClusterMap64 = ClusterMap<f64>;
