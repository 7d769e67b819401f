//! Local spatial depth: β-local depth, integrated local depth, the local
//! depth matrix (PILD), and the supervised and unsupervised procedures built
//! on them.
//!
//! The sample `X` is a [`Dataset`]. For a query `z`, points of `X` are ordered
//! by their depth in the reflection of `X` through `z`; the first `⌈nβ⌉` of them
//! form the β-neighborhood, and the β-local depth is the spatial depth of `z`
//! within it. Integrating over β with a [`WeightSpec`] gives the integrated
//! local depth, and splitting that integral by neighborhood member gives the
//! PILD matrix.

pub mod classify;
pub mod dataset;
pub mod depth;
pub mod error;
pub mod invariants;
pub mod io;
pub mod locality;
pub mod matrix;
pub mod outlier;
pub mod pild;
pub mod profile;
pub mod reflection;
pub mod simdata;

pub use dataset::Dataset;
pub use depth::{spatial_depth, DepthValue, UnitVectorAccumulator};
pub use error::{Error, Result};
pub use locality::{LevelWeights, LocalityGrid, WeightSpec, DEFAULT_MIN_POINTS};
pub use matrix::Matrix;
pub use pild::{column_centrality, pild_matrix, pild_similarity, PildBasis, PildMatrix, SimilarityMatrix};
pub use profile::{ld_profile, sample_profiles, sild, smoothing_diagnostics, DepthProfile, SmoothingDiagnostics};
pub use reflection::{beta_neighborhood, reflected_depth_row, Neighborhood, ReflectedDepthRow, Reflector};
