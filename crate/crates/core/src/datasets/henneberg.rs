//! Henneberg's minimal surface, sampling, and its self-intersection curves.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ball_noise, label_point, DistanceField};
use crate::error::{Error, Result};
use crate::geometry::{distance, GroundTruthLabel, PointCloud};
use crate::kdtree::KdTree;

/// Evaluates the Henneberg parametrisation at `(beta, phi)`.
pub fn henneberg_point(beta: f64, phi: f64) -> Result<[f64; 3]> {
    if beta == 0.0 {
        return Err(Error::param("henneberg parametrisation is singular at beta = 0"));
    }
    Ok(eval(beta, phi))
}

#[inline]
fn eval(b: f64, p: f64) -> [f64; 3] {
    let b2 = b * b;
    let b3 = b2 * b;
    let b4 = b2 * b2;
    let b6 = b3 * b3;
    let x = 2.0 * (b2 - 1.0) * p.cos() / b - 2.0 * (b6 - 1.0) * (3.0 * p).cos() / (3.0 * b3);
    let y = -(6.0 * b2 * (b2 - 1.0) * p.sin() + 2.0 * (b6 - 1.0) * (3.0 * p).sin()) / (3.0 * b3);
    let z = 2.0 * (b4 + 1.0) * (2.0 * p).cos() / b2;
    [x, y, z]
}

/// Partial derivatives `(dF/dbeta, dF/dphi)`, by central differences.
fn partials(b: f64, p: f64) -> ([f64; 3], [f64; 3]) {
    let h = 1e-6;
    let (bp, bm) = (eval(b + h, p), eval(b - h, p));
    let (pp, pm) = (eval(b, p + h), eval(b, p - h));
    let mut db = [0.0; 3];
    let mut dp = [0.0; 3];
    for i in 0..3 {
        db[i] = (bp[i] - bm[i]) / (2.0 * h);
        dp[i] = (pp[i] - pm[i]) / (2.0 * h);
    }
    (db, dp)
}

fn area_element(b: f64, p: f64) -> f64 {
    let (u, v) = partials(b, p);
    let c = [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ];
    (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum HennebergSampling {
    /// Regular grid; `beta` rows include both range ends, `phi` columns
    /// exclude the end of a full turn so that no point is repeated.
    Grid { beta_steps: usize, phi_steps: usize },
    /// Uniform in the parameter rectangle.
    Parameter { count: usize },
    /// Uniform with respect to surface area, by rejection on the area element.
    Area { count: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HennebergParams {
    pub beta_range: (f64, f64),
    pub phi_range: (f64, f64),
    pub sampling: HennebergSampling,
    pub seed: u64,
    pub noise: f64,
    pub proximity_radius: f64,
}

impl Default for HennebergParams {
    /// 62 x 88 = 5456 grid points over `beta in [0.4, 0.6]`, `phi in [0, 2 pi)`.
    fn default() -> Self {
        HennebergParams {
            beta_range: (0.4, 0.6),
            phi_range: (0.0, 2.0 * PI),
            sampling: HennebergSampling::Grid {
                beta_steps: 62,
                phi_steps: 88,
            },
            seed: 0,
            noise: 0.0,
            proximity_radius: 1.5,
        }
    }
}

impl HennebergParams {
    pub fn validate(&self) -> Result<()> {
        let (b0, b1) = self.beta_range;
        if !(0.4 <= b0 && b0 < b1 && b1 <= 0.6) {
            return Err(Error::param(format!(
                "beta range must lie within [0.4, 0.6] with lo < hi, got [{b0}, {b1}]"
            )));
        }
        let (p0, p1) = self.phi_range;
        if !(p0 < p1 && p1 - p0 <= 2.0 * PI + 1e-12) {
            return Err(Error::param(format!(
                "phi range must be increasing and span at most 2 pi, got [{p0}, {p1}]"
            )));
        }
        if !(self.noise >= 0.0) || !(self.proximity_radius >= 0.0) {
            return Err(Error::param("noise and proximity radius must be non-negative"));
        }
        let count = match self.sampling {
            HennebergSampling::Grid { beta_steps, phi_steps } => {
                if beta_steps < 2 || phi_steps < 1 {
                    return Err(Error::param("grid needs at least 2 beta rows and 1 phi column"));
                }
                beta_steps * phi_steps
            }
            HennebergSampling::Parameter { count } | HennebergSampling::Area { count } => count,
        };
        if count == 0 {
            return Err(Error::param("point count must be positive"));
        }
        Ok(())
    }

    fn full_turn(&self) -> bool {
        self.phi_range.1 - self.phi_range.0 >= 2.0 * PI - 1e-9
    }

    /// Parameter pairs according to the sampling mode.
    pub fn parameters(&self) -> Vec<(f64, f64)> {
        let (b0, b1) = self.beta_range;
        let (p0, p1) = self.phi_range;
        match self.sampling {
            HennebergSampling::Grid { beta_steps, phi_steps } => {
                let phi_div = if self.full_turn() {
                    phi_steps
                } else {
                    (phi_steps - 1).max(1)
                };
                let mut out = Vec::with_capacity(beta_steps * phi_steps);
                for i in 0..beta_steps {
                    let b = b0 + (b1 - b0) * i as f64 / (beta_steps - 1) as f64;
                    for j in 0..phi_steps {
                        out.push((b, p0 + (p1 - p0) * j as f64 / phi_div as f64));
                    }
                }
                out
            }
            HennebergSampling::Parameter { count } => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                (0..count)
                    .map(|_| (rng.gen_range(b0..=b1), rng.gen_range(p0..p1)))
                    .collect()
            }
            HennebergSampling::Area { count } => {
                let mut bound: f64 = 0.0;
                for i in 0..=64 {
                    for j in 0..=256 {
                        let b = b0 + (b1 - b0) * i as f64 / 64.0;
                        let p = p0 + (p1 - p0) * j as f64 / 256.0;
                        bound = bound.max(area_element(b, p));
                    }
                }
                bound *= 1.05;
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                let mut out = Vec::with_capacity(count);
                while out.len() < count {
                    let (b, p) = (rng.gen_range(b0..=b1), rng.gen_range(p0..p1));
                    if rng.gen_range(0.0..bound) < area_element(b, p) {
                        out.push((b, p));
                    }
                }
                out
            }
        }
    }
}

/// Samples the surface and labels each point by its distance to the
/// self-intersection locus and to the rim (the image of the parameter
/// rectangle's boundary).
pub fn sample_henneberg(params: &HennebergParams) -> Result<PointCloud> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed ^ 0x6e6f_6973_6521);
    let mut coords = Vec::new();
    for (b, p) in params.parameters() {
        let mut x = eval(b, p);
        if params.noise > 0.0 {
            let d = ball_noise(&mut rng, 3, params.noise);
            for i in 0..3 {
                x[i] += d[i];
            }
        }
        coords.extend_from_slice(&x);
    }
    let cloud = PointCloud::from_flat(3, coords)?;

    let locus = self_intersection_locus(params, 1e-6)?;
    let locus_field = DistanceField::new(locus.iter().map(|l| l.point.to_vec()).collect(), 3);
    let rim_field = DistanceField::new(rim_samples(params, 4096), 3);
    let labels: Vec<GroundTruthLabel> = cloud
        .points()
        .map(|x| label_point(locus_field.distance(x), rim_field.distance(x), params.proximity_radius))
        .collect();
    cloud.with_ground_truth(labels)
}

/// Densely sampled image of the parameter rectangle's boundary. For a full
/// turn in `phi` this is the two curves `beta = lo` and `beta = hi`.
pub fn rim_samples(params: &HennebergParams, per_edge: usize) -> Vec<Vec<f64>> {
    let (b0, b1) = params.beta_range;
    let (p0, p1) = params.phi_range;
    let mut out = Vec::new();
    for j in 0..per_edge {
        let p = p0 + (p1 - p0) * j as f64 / per_edge as f64;
        out.push(eval(b0, p).to_vec());
        out.push(eval(b1, p).to_vec());
    }
    if !params.full_turn() {
        for i in 0..=per_edge / 8 {
            let b = b0 + (b1 - b0) * i as f64 / (per_edge / 8) as f64;
            out.push(eval(b, p0).to_vec());
            out.push(eval(b, p1).to_vec());
        }
    }
    out
}

/// Distance from each point of `cloud` to the rim image.
pub fn rim_distances(params: &HennebergParams, cloud: &PointCloud) -> Vec<f64> {
    let field = DistanceField::new(rim_samples(params, 4096), 3);
    cloud.points().map(|x| field.distance(x)).collect()
}

/// A point where two distinct parameter pairs map to the same place.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocusPoint {
    pub point: [f64; 3],
    /// The two preimages, ordered so the first has the smaller `phi`.
    pub params: [(f64, f64); 2],
}

/// Minimum separation, in parameter units normalised by the rectangle's
/// sides, for two preimages to count as distinct sheets.
const PARAM_SEPARATION_FLOOR: f64 = 0.05;
const SEARCH_BETA_STEPS: usize = 200;
const SEARCH_PHI_STEPS: usize = 800;
/// Refined locus points closer than this are merged.
const DEDUP_SPACING: f64 = 0.02;

/// Numerical search for the self-intersection curves.
///
/// A dense parameter grid is searched for pairs of samples that are close
/// in space but far apart in parameter space. Each candidate pair is
/// refined by Gauss-Newton on `F(a) - F(b) = 0` with minimum-norm steps and
/// kept when the residual drops below `tol` with both preimages still in the
/// rectangle and still separated. Results are deduplicated to a spacing of
/// [`DEDUP_SPACING`] and returned in a deterministic order.
pub fn self_intersection_locus(params: &HennebergParams, tol: f64) -> Result<Vec<LocusPoint>> {
    if !(tol > 0.0) {
        return Err(Error::param("locus tolerance must be positive"));
    }
    let (b0, b1) = params.beta_range;
    let (p0, p1) = params.phi_range;
    let full = params.full_turn();
    let nb = SEARCH_BETA_STEPS;
    let np = SEARCH_PHI_STEPS;
    let phi_div = if full { np } else { np - 1 };
    let grid: Vec<(f64, f64)> = (0..nb)
        .flat_map(|i| {
            let b = b0 + (b1 - b0) * i as f64 / (nb - 1) as f64;
            (0..np).map(move |j| (b, p0 + (p1 - p0) * j as f64 / phi_div as f64))
        })
        .collect();
    let coords: Vec<f64> = grid.iter().flat_map(|&(b, p)| eval(b, p)).collect();

    // Seeds pair samples closer than the largest grid step.
    let mut reach: f64 = 0.0;
    for i in 0..nb {
        for j in 0..np {
            let here = &coords[(i * np + j) * 3..(i * np + j) * 3 + 3];
            if i + 1 < nb {
                let k = (i + 1) * np + j;
                reach = reach.max(distance(here, &coords[k * 3..k * 3 + 3]));
            }
            let k = i * np + (j + 1) % np;
            reach = reach.max(distance(here, &coords[k * 3..k * 3 + 3]));
        }
    }
    let tree = KdTree::build(&coords, 3);
    let sep = |a: (f64, f64), b: (f64, f64)| {
        let db = (a.0 - b.0) / (b1 - b0);
        let mut dp = (a.1 - b.1).abs();
        if full {
            dp = dp.min(2.0 * PI - dp);
        }
        (db * db + (dp / (p1 - p0)).powi(2)).sqrt()
    };

    let mut found: Vec<LocusPoint> = Vec::new();
    let mut hash = SpatialHash::new(DEDUP_SPACING);
    for a in 0..grid.len() {
        let mut near = tree.within_shell(&coords, &coords[a * 3..a * 3 + 3], 0.0, reach);
        near.sort_unstable();
        for b in near.into_iter().filter(|&b| b > a) {
            if sep(grid[a], grid[b]) <= PARAM_SEPARATION_FLOOR {
                continue;
            }
            let Some((pa, pb)) = refine(grid[a], grid[b], tol) else {
                continue;
            };
            let in_range = |(b, p): (f64, f64)| b0 <= b && b <= b1 && (full || (p0 <= p && p <= p1));
            if !in_range(pa) || !in_range(pb) || sep(pa, pb) <= PARAM_SEPARATION_FLOOR {
                continue;
            }
            let (fa, fb) = (eval(pa.0, pa.1), eval(pb.0, pb.1));
            let point = [(fa[0] + fb[0]) / 2.0, (fa[1] + fb[1]) / 2.0, (fa[2] + fb[2]) / 2.0];
            if hash.has_within(&point, DEDUP_SPACING) {
                continue;
            }
            hash.insert(point);
            let (pa, pb) = (wrap(pa, p0, p1, full), wrap(pb, p0, p1, full));
            let params = if pa.1 <= pb.1 { [pa, pb] } else { [pb, pa] };
            found.push(LocusPoint { point, params });
        }
    }
    Ok(found)
}

fn wrap((b, p): (f64, f64), p0: f64, p1: f64, full: bool) -> (f64, f64) {
    if !full {
        return (b, p);
    }
    let span = p1 - p0;
    (b, p0 + (p - p0).rem_euclid(span))
}

/// Gauss-Newton with minimum-norm steps on the 3 equations
/// `F(b1, p1) - F(b2, p2) = 0` in 4 unknowns.
fn refine(a: (f64, f64), b: (f64, f64), tol: f64) -> Option<((f64, f64), (f64, f64))> {
    let mut u = [a.0, a.1, b.0, b.1];
    for _ in 0..30 {
        let fa = eval(u[0], u[1]);
        let fb = eval(u[2], u[3]);
        let res = [fa[0] - fb[0], fa[1] - fb[1], fa[2] - fb[2]];
        let norm = (res[0] * res[0] + res[1] * res[1] + res[2] * res[2]).sqrt();
        if norm < tol * 1e-3 {
            break;
        }
        let (da_b, da_p) = partials(u[0], u[1]);
        let (db_b, db_p) = partials(u[2], u[3]);
        // J is 3x4 with columns dF/db1, dF/dp1, -dF/db2, -dF/dp2.
        let j = nalgebra::Matrix3x4::from_columns(&[
            nalgebra::Vector3::from(da_b),
            nalgebra::Vector3::from(da_p),
            -nalgebra::Vector3::from(db_b),
            -nalgebra::Vector3::from(db_p),
        ]);
        let jjt = j * j.transpose();
        let y = jjt.lu().solve(&nalgebra::Vector3::from(res))?;
        let step = j.transpose() * y;
        for i in 0..4 {
            u[i] -= step[i];
        }
        if u.iter().any(|x| !x.is_finite()) || u[0] <= 0.0 || u[2] <= 0.0 {
            return None;
        }
    }
    let fa = eval(u[0], u[1]);
    let fb = eval(u[2], u[3]);
    (distance(&fa, &fb) < tol).then_some(((u[0], u[1]), (u[2], u[3])))
}

/// Labels locus points by connected component under single linkage at
/// `link` distance; returns `(component count, label per point)`.
pub fn locus_components(points: &[[f64; 3]], link: f64) -> (usize, Vec<usize>) {
    let rows: Vec<Vec<f64>> = points.iter().map(|p| p.to_vec()).collect();
    super::single_linkage(&rows, 3, link)
}

/// Uniform hash grid for "is anything already within `radius`" queries.
struct SpatialHash {
    cell: f64,
    buckets: std::collections::HashMap<[i64; 3], Vec<[f64; 3]>>,
}

impl SpatialHash {
    fn new(cell: f64) -> Self {
        SpatialHash {
            cell,
            buckets: Default::default(),
        }
    }

    fn key(&self, p: &[f64; 3]) -> [i64; 3] {
        [
            (p[0] / self.cell).floor() as i64,
            (p[1] / self.cell).floor() as i64,
            (p[2] / self.cell).floor() as i64,
        ]
    }

    fn insert(&mut self, p: [f64; 3]) {
        let k = self.key(&p);
        self.buckets.entry(k).or_default().push(p);
    }

    fn has_within(&self, p: &[f64; 3], radius: f64) -> bool {
        let k = self.key(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(bucket) = self.buckets.get(&[k[0] + dx, k[1] + dy, k[2] + dz]) {
                        if bucket.iter().any(|q| distance(p, q) < radius) {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_values() {
        let p = henneberg_point(0.5, 0.0).unwrap();
        // Hand evaluation: x = -3 + 5.25, y = 0, z = 2 * 1.0625 / 0.25.
        assert!((p[0] - 2.25).abs() < 1e-12);
        assert_eq!(p[1], 0.0);
        assert!((p[2] - 8.5).abs() < 1e-12);
        for b in [0.4, 0.47, 0.6] {
            assert!(henneberg_point(b, PI).unwrap()[1].abs() < 1e-12);
            assert!(henneberg_point(b, 0.0).unwrap()[1].abs() < 1e-12);
            assert!(henneberg_point(b, PI / 4.0).unwrap()[2].abs() < 1e-12);
        }
        assert!(henneberg_point(0.0, 1.0).is_err());
    }

    #[test]
    fn default_grid_count_and_z_range() {
        let params = HennebergParams::default();
        let pts = params.parameters();
        assert_eq!(pts.len(), 5456);
        // Analytic bound: |z| <= max over beta of 2 (beta^4 + 1) / beta^2.
        let zmax = [0.4f64, 0.6]
            .iter()
            .map(|b| 2.0 * (b.powi(4) + 1.0) / (b * b))
            .fold(0.0, f64::max);
        for (b, p) in pts {
            let x = eval(b, p);
            assert!(x.iter().all(|c| c.is_finite()));
            assert!(x[2].abs() <= zmax + 1e-12);
        }
    }

    #[test]
    fn locus_is_consistent_and_has_four_curves() {
        let params = HennebergParams::default();
        let tol = 1e-6;
        let locus = self_intersection_locus(&params, tol).unwrap();
        assert!(locus.len() > 400, "only {} locus points", locus.len());
        for l in &locus {
            let [a, b] = l.params;
            let fa = eval(a.0, a.1);
            let fb = eval(b.0, b.1);
            assert!(distance(&fa, &l.point) < tol && distance(&fb, &l.point) < tol);
            assert!(a.1 <= b.1);
        }
        let pts: Vec<[f64; 3]> = locus.iter().map(|l| l.point).collect();
        let (count, _) = locus_components(&pts, 1.0);
        assert_eq!(count, 4);
    }

    /// Closed-form check: the curves pair `phi` with `-phi` (where y = 0) or
    /// with `pi - phi` (where x = 0) at equal beta.
    #[test]
    fn locus_matches_symmetry_characterisation() {
        let params = HennebergParams::default();
        for l in self_intersection_locus(&params, 1e-6).unwrap() {
            let [(b1, p1), (b2, p2)] = l.params;
            assert!((b1 - b2).abs() < 1e-6, "betas {b1} {b2}");
            let sum = (p1 + p2).rem_euclid(2.0 * PI);
            let on_y0 = sum.min(2.0 * PI - sum) < 1e-6;
            let on_x0 = (sum - PI).abs() < 1e-6;
            assert!(on_y0 || on_x0, "phi pair {p1} {p2}");
            let b = b1;
            let (b2_, b6) = (b * b, b.powi(6));
            if on_y0 {
                // 6 b^2 (b^2 - 1) + 2 (b^6 - 1)(3 - 4 sin^2 phi) = 0
                let s2 = (6.0 * b2_ * (b2_ - 1.0) + 6.0 * (b6 - 1.0)) / (8.0 * (b6 - 1.0));
                assert!((p1.sin().powi(2) - s2).abs() < 1e-5);
                assert!(l.point[1].abs() < 1e-5);
            } else {
                // 3 b^2 (b^2 - 1) = (b^6 - 1)(4 cos^2 phi - 3)
                let c2 = (3.0 + 3.0 * b2_ * (b2_ - 1.0) / (b6 - 1.0)) / 4.0;
                assert!((p1.cos().powi(2) - c2).abs() < 1e-5);
                assert!(l.point[0].abs() < 1e-5);
            }
        }
    }

    #[test]
    fn no_triple_points() {
        let params = HennebergParams::default();
        let locus = self_intersection_locus(&params, 1e-6).unwrap();
        for l in &locus {
            // Every preimage of a point near this one, grouped by parameter
            // proximity, must form exactly two groups.
            let mut groups: Vec<(f64, f64)> = Vec::new();
            for other in locus.iter().filter(|o| distance(&o.point, &l.point) < 1e-3) {
                for q in other.params {
                    let close = groups.iter().any(|g| {
                        (g.0 - q.0).abs() < 0.01 && {
                            let d = (g.1 - q.1).abs();
                            d.min(2.0 * PI - d) < 0.01
                        }
                    });
                    if !close {
                        groups.push(q);
                    }
                }
            }
            assert_eq!(groups.len(), 2);
        }
    }

    #[test]
    fn sample_labels_follow_proximity() {
        let params = HennebergParams::default();
        let cloud = sample_henneberg(&params).unwrap();
        assert_eq!(cloud.len(), 5456);
        let gt = cloud.ground_truth().unwrap();
        assert!(gt.iter().any(|g| g.near_singularity));
        assert!(gt.iter().any(|g| !g.near_singularity));
        for g in gt {
            assert_eq!(
                g.near_singularity,
                g.distance_to_singular_locus <= params.proximity_radius
            );
        }
    }

    #[test]
    fn sampling_modes_are_reproducible() {
        for sampling in [
            HennebergSampling::Parameter { count: 300 },
            HennebergSampling::Area { count: 300 },
        ] {
            let params = HennebergParams {
                sampling,
                seed: 9,
                noise: 0.01,
                ..HennebergParams::default()
            };
            let a = params.parameters();
            assert_eq!(a.len(), 300);
            assert_eq!(a, params.parameters());
            assert!(a.iter().all(|&(b, _)| (0.4..=0.6).contains(&b)));
        }
    }

    #[test]
    fn rejects_bad_params() {
        let bad = HennebergParams {
            beta_range: (0.3, 0.6),
            ..HennebergParams::default()
        };
        assert!(sample_henneberg(&bad).is_err());
    }
}
