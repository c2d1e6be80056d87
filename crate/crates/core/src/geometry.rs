//! Point clouds, Euclidean distance and annulus range queries.
//!
//! A [`SpatialIndex`] is built once per cloud and answers ball and annulus
//! queries. Low-dimensional clouds get a k-d tree; above
//! [`KD_TREE_MAX_DIM`] the index falls back to a linear scan, which is what a
//! tree degenerates to in that regime anyway.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kdtree::KdTree;

/// Largest ambient dimension for which a k-d tree is built.
pub const KD_TREE_MAX_DIM: usize = 8;

/// Per-point ground truth attached by the synthetic generators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthLabel {
    pub near_singularity: bool,
    /// Distance to the singular locus; `+inf` when the shape has none.
    pub distance_to_singular_locus: f64,
    /// Generator stratum: see [`Stratum`].
    pub stratum_id: i32,
}

/// Coarse ground-truth stratum encoded in [`GroundTruthLabel::stratum_id`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stratum {
    Interior = 0,
    Boundary = 1,
    Singular = 2,
}

impl Stratum {
    pub fn from_id(id: i32) -> Option<Self> {
        match id {
            0 => Some(Stratum::Interior),
            1 => Some(Stratum::Boundary),
            2 => Some(Stratum::Singular),
            _ => None,
        }
    }
}

/// A finite point set in `R^n`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    coords: Vec<f64>,
    ambient_dim: usize,
    ground_truth: Option<Vec<GroundTruthLabel>>,
}

impl PointCloud {
    /// Builds a cloud from coordinate rows. Every row must have length
    /// `ambient_dim` and finite entries.
    pub fn new(ambient_dim: usize, rows: Vec<Vec<f64>>) -> Result<Self> {
        let mut coords = Vec::with_capacity(rows.len() * ambient_dim);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != ambient_dim {
                return Err(Error::Integrity(format!(
                    "point {i} has {} coordinates, expected {ambient_dim}",
                    row.len()
                )));
            }
            coords.extend(row);
        }
        Self::from_flat(ambient_dim, coords)
    }

    pub fn from_flat(ambient_dim: usize, coords: Vec<f64>) -> Result<Self> {
        if ambient_dim == 0 {
            return Err(Error::param("ambient dimension must be positive"));
        }
        if !coords.len().is_multiple_of(ambient_dim) {
            return Err(Error::Integrity(format!(
                "{} coordinates do not divide into rows of {ambient_dim}",
                coords.len()
            )));
        }
        if let Some(pos) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::Integrity(format!(
                "point {} has a non-finite coordinate",
                pos / ambient_dim
            )));
        }
        Ok(PointCloud {
            coords,
            ambient_dim,
            ground_truth: None,
        })
    }

    pub fn with_ground_truth(mut self, labels: Vec<GroundTruthLabel>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::Integrity(format!(
                "{} ground-truth labels for {} points",
                labels.len(),
                self.len()
            )));
        }
        self.ground_truth = Some(labels);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.ambient_dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.ambient_dim..(i + 1) * self.ambient_dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.ambient_dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn ground_truth(&self) -> Option<&[GroundTruthLabel]> {
        self.ground_truth.as_deref()
    }

    /// The sub-cloud on `indices`, in the given order, carrying ground truth along.
    pub fn subset(&self, indices: &[usize]) -> Result<PointCloud> {
        let mut coords = Vec::with_capacity(indices.len() * self.ambient_dim);
        for &i in indices {
            if i >= self.len() {
                return Err(Error::Bounds {
                    index: i,
                    len: self.len(),
                });
            }
            coords.extend_from_slice(self.point(i));
        }
        let mut sub = PointCloud::from_flat(self.ambient_dim, coords)?;
        if let Some(gt) = &self.ground_truth {
            sub.ground_truth = Some(indices.iter().map(|&i| gt[i]).collect());
        }
        Ok(sub)
    }

    /// Applies `f` to every point, keeping ground truth.
    pub fn map_points(&self, mut f: impl FnMut(&[f64]) -> Vec<f64>) -> Result<PointCloud> {
        let rows: Vec<Vec<f64>> = self.points().map(&mut f).collect();
        let dim = rows.first().map_or(self.ambient_dim, Vec::len);
        let mut out = PointCloud::new(dim, rows)?;
        out.ground_truth = self.ground_truth.clone();
        Ok(out)
    }
}

#[inline]
pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[inline]
pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    squared_distance(a, b).sqrt()
}

/// Query for the annular neighbours of one point: indices `i` with
/// `inner <= |p_i - p_center| <= outer`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnulusQuery {
    pub center_index: usize,
    pub inner_radius: f64,
    pub outer_radius: f64,
}

impl AnnulusQuery {
    pub fn new(center_index: usize, inner_radius: f64, outer_radius: f64) -> Result<Self> {
        let q = AnnulusQuery {
            center_index,
            inner_radius,
            outer_radius,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        let (r, s) = (self.inner_radius, self.outer_radius);
        if !(r.is_finite() && s.is_finite()) || r <= 0.0 || r >= s {
            return Err(Error::param(format!(
                "annulus radii must satisfy 0 < r < s, got r={r}, s={s}"
            )));
        }
        Ok(())
    }
}

/// Range-query index over a [`PointCloud`].
///
/// The index stores no coordinates; queries take the cloud it was built from.
#[derive(Debug, Clone)]
pub enum SpatialIndex {
    KdTree(KdTree),
    Linear { len: usize },
}

impl SpatialIndex {
    pub fn build(cloud: &PointCloud) -> Self {
        if cloud.ambient_dim() <= KD_TREE_MAX_DIM && !cloud.is_empty() {
            SpatialIndex::KdTree(KdTree::build(cloud.coords(), cloud.ambient_dim()))
        } else {
            SpatialIndex::Linear { len: cloud.len() }
        }
    }

    pub fn len(&self) -> usize {
        match self {
            SpatialIndex::KdTree(t) => t.len(),
            SpatialIndex::Linear { len } => *len,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Indices whose distance to `center` lies in the closed interval
    /// `[lo, hi]`, sorted ascending.
    pub fn within_shell(&self, cloud: &PointCloud, center: &[f64], lo: f64, hi: f64) -> Vec<usize> {
        let mut out = match self {
            SpatialIndex::KdTree(t) => t.within_shell(cloud.coords(), center, lo, hi),
            SpatialIndex::Linear { .. } => cloud
                .points()
                .enumerate()
                .filter(|(_, p)| {
                    let d = distance(p, center);
                    lo <= d && d <= hi
                })
                .map(|(i, _)| i)
                .collect(),
        };
        out.sort_unstable();
        out
    }

    /// Closed ball query, sorted ascending.
    pub fn within_ball(&self, cloud: &PointCloud, center: &[f64], radius: f64) -> Vec<usize> {
        self.within_shell(cloud, center, 0.0, radius)
    }
}

pub fn build_spatial_index(cloud: &PointCloud) -> SpatialIndex {
    SpatialIndex::build(cloud)
}

/// Annular neighbours of `q.center_index`, sorted ascending. The centre
/// itself and any duplicate of it are excluded, since their distance 0 is
/// below the inner radius.
pub fn annulus_neighbors(cloud: &PointCloud, index: &SpatialIndex, q: &AnnulusQuery) -> Result<Vec<usize>> {
    q.validate()?;
    if q.center_index >= cloud.len() {
        return Err(Error::Bounds {
            index: q.center_index,
            len: cloud.len(),
        });
    }
    if index.len() != cloud.len() {
        return Err(Error::Integrity(format!(
            "index covers {} points but cloud has {}",
            index.len(),
            cloud.len()
        )));
    }
    let center = cloud.point(q.center_index);
    let mut hits = index.within_shell(cloud, center, q.inner_radius, q.outer_radius);
    hits.retain(|&i| i != q.center_index);
    Ok(hits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_cloud(n: usize, dim: usize, seed: u64) -> PointCloud {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coords = (0..n * dim).map(|_| rng.gen_range(0.0..1.0)).collect();
        PointCloud::from_flat(dim, coords).unwrap()
    }

    fn brute_annulus(cloud: &PointCloud, c: usize, r: f64, s: f64) -> Vec<usize> {
        let center = cloud.point(c);
        (0..cloud.len())
            .filter(|&i| {
                let d = distance(cloud.point(i), center);
                i != c && r <= d && d <= s
            })
            .collect()
    }

    #[test]
    fn empty_cloud_gives_empty_index() {
        let cloud = PointCloud::from_flat(3, vec![]).unwrap();
        let index = build_spatial_index(&cloud);
        assert_eq!(index.len(), 0);
    }

    #[test]
    fn rejects_ragged_and_nonfinite() {
        assert!(PointCloud::new(2, vec![vec![0.0, 1.0], vec![1.0]]).is_err());
        assert!(PointCloud::new(2, vec![vec![0.0, f64::NAN]]).is_err());
    }

    #[test]
    fn single_point_annulus_is_empty() {
        let cloud = PointCloud::new(2, vec![vec![0.5, 0.5]]).unwrap();
        let index = build_spatial_index(&cloud);
        let q = AnnulusQuery::new(0, 0.1, 10.0).unwrap();
        assert!(annulus_neighbors(&cloud, &index, &q).unwrap().is_empty());
    }

    #[test]
    fn collinear_annulus() {
        let cloud = PointCloud::new(1, (0..5).map(|i| vec![i as f64]).collect()).unwrap();
        let index = build_spatial_index(&cloud);
        let q = AnnulusQuery::new(0, 1.5, 3.5).unwrap();
        assert_eq!(annulus_neighbors(&cloud, &index, &q).unwrap(), vec![2, 3]);
    }

    #[test]
    fn closed_bounds_include_exact_radii() {
        let cloud = PointCloud::new(1, vec![vec![0.0], vec![1.0], vec![2.0], vec![3.0]]).unwrap();
        let index = build_spatial_index(&cloud);
        let q = AnnulusQuery::new(0, 1.0, 2.0).unwrap();
        assert_eq!(annulus_neighbors(&cloud, &index, &q).unwrap(), vec![1, 2]);
    }

    #[test]
    fn duplicate_of_center_is_excluded() {
        let cloud = PointCloud::new(2, vec![vec![0.0, 0.0], vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        let index = build_spatial_index(&cloud);
        let q = AnnulusQuery::new(0, 0.5, 1.5).unwrap();
        assert_eq!(annulus_neighbors(&cloud, &index, &q).unwrap(), vec![2]);
    }

    #[test]
    fn parameter_and_bounds_errors() {
        let cloud = random_cloud(10, 2, 1);
        let index = build_spatial_index(&cloud);
        assert!(matches!(AnnulusQuery::new(0, 0.5, 0.5), Err(Error::Parameter(_))));
        assert!(matches!(AnnulusQuery::new(0, 0.0, 0.5), Err(Error::Parameter(_))));
        let q = AnnulusQuery {
            center_index: 10,
            inner_radius: 0.1,
            outer_radius: 0.2,
        };
        assert!(matches!(
            annulus_neighbors(&cloud, &index, &q),
            Err(Error::Bounds { .. })
        ));
    }

    #[test]
    fn kd_tree_matches_brute_force_3d() {
        let cloud = random_cloud(1000, 3, 7);
        let index = build_spatial_index(&cloud);
        assert!(matches!(index, SpatialIndex::KdTree(_)));
        for c in (0..1000).step_by(13) {
            let ball: Vec<usize> = index.within_ball(&cloud, cloud.point(c), 0.15);
            let brute: Vec<usize> = (0..1000)
                .filter(|&i| distance(cloud.point(i), cloud.point(c)) <= 0.15)
                .collect();
            assert_eq!(ball, brute);
        }
    }

    #[test]
    fn annulus_matches_brute_force_500() {
        let cloud = random_cloud(500, 3, 11);
        let index = build_spatial_index(&cloud);
        for c in 0..500 {
            let q = AnnulusQuery::new(c, 0.2, 0.5).unwrap();
            assert_eq!(
                annulus_neighbors(&cloud, &index, &q).unwrap(),
                brute_annulus(&cloud, c, 0.2, 0.5)
            );
        }
    }

    #[test]
    fn high_dimension_uses_linear_scan() {
        let cloud = random_cloud(300, 24, 3);
        let index = build_spatial_index(&cloud);
        assert!(matches!(index, SpatialIndex::Linear { len: 300 }));
        for c in (0..300).step_by(17) {
            let q = AnnulusQuery::new(c, 1.0, 1.3).unwrap();
            assert_eq!(
                annulus_neighbors(&cloud, &index, &q).unwrap(),
                brute_annulus(&cloud, c, 1.0, 1.3)
            );
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn index_equals_brute_force(seed in any::<u64>(), n in 1usize..200, dim in 1usize..6, r in 0.05f64..0.4, w in 0.01f64..0.4) {
                let cloud = random_cloud(n, dim, seed);
                let index = build_spatial_index(&cloud);
                let c = (seed as usize) % n;
                let q = AnnulusQuery::new(c, r, r + w).unwrap();
                prop_assert_eq!(annulus_neighbors(&cloud, &index, &q).unwrap(), brute_annulus(&cloud, c, r, r + w));
            }

            #[test]
            fn annulus_is_symmetric(seed in any::<u64>(), r in 0.05f64..0.3, w in 0.05f64..0.3) {
                let cloud = random_cloud(60, 3, seed);
                let index = build_spatial_index(&cloud);
                let nbrs: Vec<Vec<usize>> = (0..60)
                    .map(|c| annulus_neighbors(&cloud, &index, &AnnulusQuery::new(c, r, r + w).unwrap()).unwrap())
                    .collect();
                for i in 0..60 {
                    for &j in &nbrs[i] {
                        prop_assert!(nbrs[j].contains(&i));
                    }
                }
            }

            #[test]
            fn widening_never_removes(seed in any::<u64>(), r in 0.1f64..0.3, w in 0.05f64..0.3, dr in 0.0f64..0.09, ds in 0.0f64..0.2) {
                let cloud = random_cloud(150, 2, seed);
                let index = build_spatial_index(&cloud);
                let c = (seed as usize) % 150;
                let narrow = annulus_neighbors(&cloud, &index, &AnnulusQuery::new(c, r, r + w).unwrap()).unwrap();
                let wide = annulus_neighbors(&cloud, &index, &AnnulusQuery::new(c, r - dr, r + w + ds).unwrap()).unwrap();
                for i in narrow {
                    prop_assert!(wide.contains(&i));
                }
            }
        }
    }
}
