//! Per-point classification by counting long bars in the persistent homology
//! of annular neighbourhoods.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filtration::build_rips_filtration;
use crate::geometry::{annulus_neighbors, AnnulusQuery, PointCloud, SpatialIndex};
use crate::persistence::{compute_barcode_with, count_long_bars, Reduction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Boundary,
    Manifold,
    Intersection,
}

impl Label {
    pub const ALL: [Label; 3] = [Label::Boundary, Label::Manifold, Label::Intersection];

    /// `0 -> boundary`, `1 -> manifold`, anything more `-> intersection`.
    pub fn from_long_bars(n: usize) -> Label {
        match n {
            0 => Label::Boundary,
            1 => Label::Manifold,
            _ => Label::Intersection,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Boundary => "boundary",
            Label::Manifold => "manifold",
            Label::Intersection => "intersection",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "boundary" => Ok(Label::Boundary),
            "manifold" => Ok(Label::Manifold),
            "intersection" => Ok(Label::Intersection),
            other => Err(Error::Integrity(format!("unknown label '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    /// Inner annulus radius.
    pub r: f64,
    /// Outer annulus radius.
    pub s: f64,
    /// Intrinsic dimension; bars are counted in degree `k - 1`.
    pub k: usize,
    /// Filtration cap, `2 s` when unset.
    pub t_max: Option<f64>,
    /// Largest simplex dimension, `k` when unset.
    pub max_dim: Option<usize>,
    /// Annuli with fewer points are labelled boundary without computing
    /// homology; `k + 1` when unset.
    pub min_annulus_size: Option<usize>,
    /// Worker threads; 0 lets the runtime decide.
    pub threads: usize,
    pub reduction: Reduction,
}

impl DetectorConfig {
    pub fn new(r: f64, s: f64, k: usize) -> Self {
        DetectorConfig {
            r,
            s,
            k,
            t_max: None,
            max_dim: None,
            min_annulus_size: None,
            threads: 1,
            reduction: Reduction::Cohomology,
        }
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }

    pub fn t_max(&self) -> f64 {
        self.t_max.unwrap_or(2.0 * self.s)
    }

    pub fn max_dim(&self) -> usize {
        self.max_dim.unwrap_or(self.k)
    }

    pub fn min_annulus_size(&self) -> usize {
        self.min_annulus_size.unwrap_or(self.k + 1)
    }

    /// Long-bar threshold `s - r`.
    pub fn bar_threshold(&self) -> f64 {
        self.s - self.r
    }

    /// Validates the configuration. Radii given in the wrong order are
    /// swapped with a warning rather than rejected.
    pub fn validated(mut self) -> Result<Self> {
        if !(self.r.is_finite() && self.s.is_finite()) {
            return Err(Error::param("annulus radii must be finite"));
        }
        if self.r > self.s {
            log::warn!("inner radius {} exceeds outer radius {}; swapping them", self.r, self.s);
            std::mem::swap(&mut self.r, &mut self.s);
        }
        if !(self.r > 0.0) || self.r >= self.s {
            return Err(Error::param(format!(
                "annulus radii must satisfy 0 < r < s, got r={}, s={}",
                self.r, self.s
            )));
        }
        if self.k < 2 {
            return Err(Error::param(format!(
                "intrinsic dimension k must be at least 2, got {}",
                self.k
            )));
        }
        if !(self.t_max() > 0.0) {
            return Err(Error::param(format!("t_max must be positive, got {}", self.t_max())));
        }
        if self.max_dim() < self.k {
            return Err(Error::param(format!(
                "max_dim {} is below k = {}; degree k-1 cycles need k-simplices to die",
                self.max_dim(),
                self.k
            )));
        }
        Ok(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PointFlags {
    /// The annulus had fewer than `min_annulus_size` points.
    pub sparse_annulus: bool,
}

impl PointFlags {
    /// `|`-separated flag names, empty when none are set.
    pub fn to_field(self) -> String {
        if self.sparse_annulus {
            "sparse".to_owned()
        } else {
            String::new()
        }
    }

    pub fn from_field(s: &str) -> Result<Self> {
        let mut flags = PointFlags::default();
        for name in s.split('|').filter(|n| !n.is_empty()) {
            match name {
                "sparse" => flags.sparse_annulus = true,
                other => return Err(Error::Integrity(format!("unknown flag '{other}'"))),
            }
        }
        Ok(flags)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PointClassification {
    pub label: Label,
    pub long_bars: usize,
    pub annulus_size: usize,
    pub flags: PointFlags,
}

/// Labels for every point, indexed like the input cloud (or like the
/// selected subset, with `indices` recording the original positions).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    pub indices: Vec<usize>,
    pub labels: Vec<Label>,
    pub long_bars: Vec<usize>,
    pub annulus_sizes: Vec<usize>,
    pub flags: Vec<PointFlags>,
}

impl Partition {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Points per label in `Label::ALL` order.
    pub fn class_counts(&self) -> [usize; 3] {
        let mut counts = [0; 3];
        for l in &self.labels {
            counts[l.index()] += 1;
        }
        counts
    }

    /// Original indices of the points carrying `label`.
    pub fn members(&self, label: Label) -> Vec<usize> {
        self.indices
            .iter()
            .zip(&self.labels)
            .filter(|(_, &l)| l == label)
            .map(|(&i, _)| i)
            .collect()
    }

    fn from_results(indices: Vec<usize>, results: Vec<PointClassification>) -> Self {
        Partition {
            indices,
            labels: results.iter().map(|c| c.label).collect(),
            long_bars: results.iter().map(|c| c.long_bars).collect(),
            annulus_sizes: results.iter().map(|c| c.annulus_size).collect(),
            flags: results.iter().map(|c| c.flags).collect(),
        }
    }
}

/// Classifies point `y` from the degree `k - 1` barcode of its annulus.
/// `cfg` is expected to have passed [`DetectorConfig::validated`].
pub fn classify_point(
    cloud: &PointCloud,
    index: &SpatialIndex,
    y: usize,
    cfg: &DetectorConfig,
) -> Result<PointClassification> {
    let q = AnnulusQuery::new(y, cfg.r, cfg.s)?;
    let annulus = annulus_neighbors(cloud, index, &q)?;
    let annulus_size = annulus.len();
    if annulus_size < cfg.min_annulus_size() {
        return Ok(PointClassification {
            label: Label::Boundary,
            long_bars: 0,
            annulus_size,
            flags: PointFlags { sparse_annulus: true },
        });
    }
    let points: Vec<&[f64]> = annulus.iter().map(|&i| cloud.point(i)).collect();
    let filtration = build_rips_filtration(&points, cfg.max_dim(), cfg.t_max())?;
    let degree = cfg.k - 1;
    let barcode = compute_barcode_with(&filtration, degree, cfg.reduction)?;
    let long_bars = count_long_bars(&barcode, degree, cfg.bar_threshold());
    Ok(PointClassification {
        label: Label::from_long_bars(long_bars),
        long_bars,
        annulus_size,
        flags: PointFlags::default(),
    })
}

/// Wall-clock seconds per pipeline stage.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimings {
    pub index_build: f64,
    pub classification: f64,
}

/// Classifies every point of `cloud`.
pub fn detect(cloud: &PointCloud, cfg: &DetectorConfig) -> Result<Partition> {
    detect_timed(cloud, cfg).map(|(p, _)| p)
}

pub fn detect_timed(cloud: &PointCloud, cfg: &DetectorConfig) -> Result<(Partition, StageTimings)> {
    let cfg = cfg.clone().validated()?;
    let start = Instant::now();
    let index = SpatialIndex::build(cloud);
    let index_build = start.elapsed().as_secs_f64();

    let start = Instant::now();
    let results = run_pool(cfg.threads, || {
        (0..cloud.len())
            .into_par_iter()
            .map(|y| classify_point(cloud, &index, y, &cfg))
            .collect::<Result<Vec<_>>>()
    })??;
    let timings = StageTimings {
        index_build,
        classification: start.elapsed().as_secs_f64(),
    };
    Ok((Partition::from_results((0..cloud.len()).collect(), results), timings))
}

/// Runs the detector on the sub-cloud `indices` alone, so that annuli only
/// see the selected points. This is how a refinement pass over, say, the
/// intersection class is expressed.
pub fn detect_subset(cloud: &PointCloud, indices: &[usize], cfg: &DetectorConfig) -> Result<Partition> {
    let sub = cloud.subset(indices)?;
    let mut partition = detect(&sub, cfg)?;
    partition.indices = indices.to_vec();
    Ok(partition)
}

fn run_pool<T: Send>(threads: usize, job: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::param(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(job))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvdScore {
    /// Fraction of annulus variance captured by the best `k`-dimensional
    /// affine fit, in `[0, 1]`.
    pub score: f64,
    pub empty_annulus: bool,
}

/// Local-dimension score of point `y`: centre the annulus points and return
/// `(sum_{j <= k} sigma_j^2) / (sum_j sigma_j^2)` over their singular values.
/// Near 1 where the annulus is close to a `k`-plane.
pub fn local_svd_score(cloud: &PointCloud, index: &SpatialIndex, y: usize, cfg: &DetectorConfig) -> Result<SvdScore> {
    let q = AnnulusQuery::new(y, cfg.r.min(cfg.s), cfg.r.max(cfg.s))?;
    let annulus = annulus_neighbors(cloud, index, &q)?;
    if annulus.is_empty() {
        return Ok(SvdScore {
            score: 0.0,
            empty_annulus: true,
        });
    }
    let points: Vec<&[f64]> = annulus.iter().map(|&i| cloud.point(i)).collect();
    Ok(SvdScore {
        score: variance_fraction(&points, cfg.k),
        empty_annulus: false,
    })
}

/// Fraction of the total squared singular values of the centred point
/// matrix carried by the top `k`. A point set with no spread scores 1.
pub fn variance_fraction<P: AsRef<[f64]>>(points: &[P], k: usize) -> f64 {
    let m = points.len();
    if m == 0 {
        return 0.0;
    }
    let n = points[0].as_ref().len();
    let mut mean = vec![0.0; n];
    for p in points {
        for (acc, x) in mean.iter_mut().zip(p.as_ref()) {
            *acc += x;
        }
    }
    mean.iter_mut().for_each(|x| *x /= m as f64);
    let centred = DMatrix::from_fn(m, n, |i, j| points[i].as_ref()[j] - mean[j]);
    let mut sv: Vec<f64> = centred.singular_values().iter().map(|s| s * s).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let total: f64 = sv.iter().sum();
    if total == 0.0 {
        return 1.0;
    }
    let top: f64 = sv.iter().take(k).sum();
    (top / total).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_spatial_index;
    use std::f64::consts::PI;

    fn ring(n: usize, radius: f64, z: f64) -> Vec<Vec<f64>> {
        (0..n)
            .map(|i| {
                let a = 2.0 * PI * i as f64 / n as f64;
                vec![radius * a.cos(), radius * a.sin(), z]
            })
            .collect()
    }

    #[test]
    fn label_rule_exhaustive() {
        for n in 0..=10 {
            let expected = match n {
                0 => Label::Boundary,
                1 => Label::Manifold,
                _ => Label::Intersection,
            };
            assert_eq!(Label::from_long_bars(n), expected);
        }
    }

    #[test]
    fn label_and_flag_text() {
        for l in Label::ALL {
            assert_eq!(l.as_str().parse::<Label>().unwrap(), l);
        }
        assert!("nosuch".parse::<Label>().is_err());
        let f = PointFlags { sparse_annulus: true };
        assert_eq!(PointFlags::from_field(&f.to_field()).unwrap(), f);
        assert_eq!(PointFlags::from_field("").unwrap(), PointFlags::default());
    }

    #[test]
    fn config_validation() {
        let swapped = DetectorConfig::new(2.0, 1.5, 2).validated().unwrap();
        assert_eq!((swapped.r, swapped.s), (1.5, 2.0));
        assert_eq!(swapped.t_max(), 4.0);
        assert_eq!(swapped.max_dim(), 2);
        assert_eq!(swapped.min_annulus_size(), 3);
        assert!(DetectorConfig::new(1.0, 1.0, 2).validated().is_err());
        assert!(DetectorConfig::new(0.0, 1.0, 2).validated().is_err());
        assert!(DetectorConfig::new(0.5, 1.0, 1).validated().is_err());
        let mut low = DetectorConfig::new(0.5, 1.0, 2);
        low.max_dim = Some(1);
        assert!(low.validated().is_err());
    }

    #[test]
    fn isolated_point_is_sparse_boundary() {
        let cloud = PointCloud::new(2, vec![vec![0.0, 0.0], vec![10.0, 0.0]]).unwrap();
        let index = build_spatial_index(&cloud);
        let c = classify_point(&cloud, &index, 0, &DetectorConfig::new(0.5, 1.0, 2)).unwrap();
        assert_eq!(c.label, Label::Boundary);
        assert_eq!(c.annulus_size, 0);
        assert!(c.flags.sparse_annulus);
    }

    #[test]
    fn ring_annulus_is_manifold() {
        // Centre at the origin surrounded by a ring of radius 1 in the plane:
        // one loop that persists long past s - r.
        let mut pts = vec![vec![0.0, 0.0, 0.0]];
        pts.extend(ring(24, 1.0, 0.0));
        let cloud = PointCloud::new(3, pts).unwrap();
        let index = build_spatial_index(&cloud);
        for reduction in [Reduction::Homology, Reduction::Cohomology] {
            let cfg = DetectorConfig {
                reduction,
                ..DetectorConfig::new(0.9, 1.1, 2)
            };
            let c = classify_point(&cloud, &index, 0, &cfg).unwrap();
            assert_eq!((c.label, c.long_bars, c.annulus_size), (Label::Manifold, 1, 24));
        }
    }

    #[test]
    fn circle_cloud_is_all_boundary_for_k2() {
        let pts: Vec<Vec<f64>> = (0..400)
            .map(|i| {
                let a = 2.0 * PI * i as f64 / 400.0;
                vec![a.cos(), a.sin()]
            })
            .collect();
        let cloud = PointCloud::new(2, pts).unwrap();
        let p = detect(&cloud, &DetectorConfig::new(0.1, 0.2, 2)).unwrap();
        assert!(p.labels.iter().all(|&l| l == Label::Boundary));
        assert!(p.annulus_sizes.iter().all(|&n| n > 10));
    }

    #[test]
    fn subset_keeps_original_indices() {
        let pts: Vec<Vec<f64>> = (0..50).map(|i| vec![i as f64 * 0.1, 0.0]).collect();
        let cloud = PointCloud::new(2, pts).unwrap();
        let p = detect_subset(&cloud, &[3, 10, 20], &DetectorConfig::new(0.5, 1.5, 2)).unwrap();
        assert_eq!(p.indices, vec![3, 10, 20]);
        assert_eq!(p.len(), 3);
        assert!(detect_subset(&cloud, &[99], &DetectorConfig::new(0.5, 1.5, 2)).is_err());
    }

    #[test]
    fn svd_plane_and_two_planes() {
        let mut pts = Vec::new();
        for i in 0..10 {
            for j in 0..10 {
                pts.push(vec![i as f64 * 0.1, j as f64 * 0.1 - 0.3, 0.0]);
            }
        }
        assert!((variance_fraction(&pts, 2) - 1.0).abs() < 1e-12);
        for i in 0..10 {
            for j in 0..10 {
                pts.push(vec![0.45, i as f64 * 0.1 - 0.3, j as f64 * 0.1 - 0.45]);
            }
        }
        assert!(variance_fraction(&pts, 2) < 1.0 - 1e-3);
    }

    #[test]
    fn svd_full_circle_is_half() {
        let pts: Vec<Vec<f64>> = (0..360)
            .map(|i| {
                let a = 2.0 * PI * i as f64 / 360.0;
                vec![a.cos(), a.sin()]
            })
            .collect();
        assert!((variance_fraction(&pts, 1) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn svd_score_on_cloud() {
        let mut pts = vec![vec![0.0, 0.0, 0.0]];
        pts.extend(ring(30, 1.0, 0.0));
        let cloud = PointCloud::new(3, pts).unwrap();
        let index = build_spatial_index(&cloud);
        let cfg = DetectorConfig::new(0.5, 1.5, 2);
        let s = local_svd_score(&cloud, &index, 0, &cfg).unwrap();
        assert!(!s.empty_annulus);
        assert!((s.score - 1.0).abs() < 1e-12);
        let lonely = PointCloud::new(3, vec![vec![0.0; 3]]).unwrap();
        let s = local_svd_score(&lonely, &build_spatial_index(&lonely), 0, &cfg).unwrap();
        assert!(s.empty_annulus);
        assert_eq!(s.score, 0.0);
    }
}
