//! Detection of singular regions in point clouds from the persistent
//! homology of annular neighbourhoods.
//!
//! For every point `y` the detector collects the points at distance between
//! `r` and `s` from `y`, builds their Vietoris-Rips filtration and counts the
//! degree-`k - 1` persistence intervals longer than `s - r`. Zero long bars
//! marks a boundary point, one a manifold point, and two or more a point
//! near an intersection of manifold pieces.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod datasets;
pub mod detector;
pub mod error;
pub mod evaluate;
pub mod filtration;
pub mod geometry;
pub mod io;
mod kdtree;
pub mod persistence;
pub mod projection;

pub use datasets::{
    generate, henneberg_point, sample_henneberg, self_intersection_locus, GeneratorSpec, HennebergParams, Shape,
};
pub use detector::{
    classify_point, detect, detect_subset, detect_timed, local_svd_score, DetectorConfig, Label, Partition, PointFlags,
    StageTimings,
};

pub use error::{Error, Result};
pub use evaluate::{evaluate, EvaluationReport};
pub use filtration::{build_rips_filtration, filtration_order, Filtration, FiltrationEntry, Simplex};
pub use geometry::{
    annulus_neighbors, build_spatial_index, AnnulusQuery, GroundTruthLabel, PointCloud, SpatialIndex, Stratum,
};
pub use io::{load_cloud, LoadOptions};
pub use kdtree::KdTree;
pub use persistence::{
    betti_numbers_at_scale, bottleneck_distance, compute_barcode, compute_barcode_with, count_long_bars, Barcode,
    PersistenceInterval, Reduction,
};
pub use projection::pca;
