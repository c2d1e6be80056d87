use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ball_noise, label_point, GeneratorSpec};
use crate::error::Result;
use crate::geometry::{GroundTruthLabel, PointCloud};

/// Draws `spec.count` noise-free points with their rim distances, then adds
/// noise.
fn build(
    dim: usize,
    spec: &GeneratorSpec,
    mut draw: impl FnMut(&mut ChaCha8Rng, usize) -> (Vec<f64>, f64),
) -> Result<RimCloud> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut coords = Vec::with_capacity(spec.count * dim);
    let mut rims = Vec::with_capacity(spec.count);
    for i in 0..spec.count {
        let (mut p, rim) = draw(&mut rng, i);
        if spec.noise > 0.0 {
            for (x, d) in p.iter_mut().zip(ball_noise(&mut rng, dim, spec.noise)) {
                *x += d;
            }
        }
        coords.extend_from_slice(&p);
        rims.push(rim);
    }
    Ok(RimCloud(PointCloud::from_flat(dim, coords)?, rims))
}

/// Cloud plus the per-point rim distance of the noise-free sample, awaiting
/// its locus distances.
struct RimCloud(PointCloud, Vec<f64>);

impl RimCloud {
    fn label(self, proximity: f64, locus: impl Fn(&[f64]) -> f64) -> Result<PointCloud> {
        let RimCloud(cloud, rims) = self;
        let labels: Vec<GroundTruthLabel> = cloud
            .points()
            .zip(rims)
            .map(|(x, rim)| label_point(locus(x), rim, proximity))
            .collect();
        cloud.with_ground_truth(labels)
    }
}

/// Two unit squares, one in `z = 0` and one in `x = 0`, both centred at the
/// origin, crossing along the segment `x = z = 0, |y| <= 1/2`. Points
/// alternate between the sheets. The rim distance is measured within the
/// sheet a point was drawn from.
pub fn sample_planes(spec: &GeneratorSpec) -> Result<PointCloud> {
    build(3, spec, |rng, i| {
        let u: f64 = rng.gen_range(-0.5..=0.5);
        let v: f64 = rng.gen_range(-0.5..=0.5);
        let rim = (0.5 - u.abs()).min(0.5 - v.abs());
        if i % 2 == 0 {
            (vec![u, v, 0.0], rim)
        } else {
            (vec![0.0, v, u], rim)
        }
    })?
    .label(spec.proximity_radius, |p| {
        let dy = (p[1].abs() - 0.5).max(0.0);
        (p[0] * p[0] + dy * dy + p[2] * p[2]).sqrt()
    })
}

/// Unit upper hemisphere glued to the disk of radius 2 in `z = 0` along the
/// equator. Sampling is uniform in area, so a point lands on the hemisphere
/// with probability `2 pi / 6 pi`. The rim is the circle of radius 2.
pub fn sample_hemisphere_plane(spec: &GeneratorSpec) -> Result<PointCloud> {
    build(3, spec, |rng, _| {
        let theta = rng.gen_range(0.0..2.0 * PI);
        let p = if rng.gen_bool(1.0 / 3.0) {
            // Archimedes: height is uniform on a sphere.
            let z: f64 = rng.gen_range(0.0..=1.0);
            let rho = (1.0 - z * z).sqrt();
            vec![rho * theta.cos(), rho * theta.sin(), z]
        } else {
            let rho = 2.0 * rng.gen_range(0.0f64..=1.0).sqrt();
            vec![rho * theta.cos(), rho * theta.sin(), 0.0]
        };
        let rim = circle_distance(&p, 2.0);
        (p, rim)
    })?
    .label(spec.proximity_radius, |p| circle_distance(p, 1.0))
}

/// Distance from `p` to the circle of the given radius in `z = 0` about the
/// origin.
fn circle_distance(p: &[f64], radius: f64) -> f64 {
    let rho = (p[0] * p[0] + p[1] * p[1]).sqrt();
    ((rho - radius).powi(2) + p[2] * p[2]).sqrt()
}

/// Unit circle in the plane. It has no singular locus and no rim.
pub fn sample_circle(spec: &GeneratorSpec) -> Result<PointCloud> {
    build(2, spec, |rng, _| {
        let t = rng.gen_range(0.0..2.0 * PI);
        (vec![t.cos(), t.sin()], f64::INFINITY)
    })?
    .label(spec.proximity_radius, |_| f64::INFINITY)
}

/// Unit sphere in `R^3`. It has no singular locus and no rim.
pub fn sample_sphere(spec: &GeneratorSpec) -> Result<PointCloud> {
    build(3, spec, |rng, _| {
        let z: f64 = rng.gen_range(-1.0..=1.0);
        let t = rng.gen_range(0.0..2.0 * PI);
        let rho = (1.0 - z * z).sqrt();
        (vec![rho * t.cos(), rho * t.sin(), z], f64::INFINITY)
    })?
    .label(spec.proximity_radius, |_| f64::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::Shape;
    use crate::geometry::Stratum;

    fn spec(shape: Shape, count: usize, noise: f64) -> GeneratorSpec {
        GeneratorSpec {
            count,
            noise,
            seed: 5,
            ..GeneratorSpec::new(shape)
        }
    }

    #[test]
    fn planes_lie_on_their_sheets() {
        let cloud = sample_planes(&spec(Shape::Planes, 1000, 0.0)).unwrap();
        for (i, p) in cloud.points().enumerate() {
            assert!(p.iter().all(|c| c.abs() <= 0.5));
            if i % 2 == 0 {
                assert_eq!(p[2], 0.0);
            } else {
                assert_eq!(p[0], 0.0);
            }
        }
        let gt = cloud.ground_truth().unwrap();
        // A point at height u on the vertical sheet is |u| from the line.
        for (p, g) in cloud.points().zip(gt) {
            let expected = if p[2] == 0.0 { p[0].abs() } else { p[2].abs() };
            assert!((g.distance_to_singular_locus - expected).abs() < 1e-15);
        }
        assert!(gt.iter().any(|g| g.stratum_id == Stratum::Boundary as i32));
        assert!(gt.iter().any(|g| g.stratum_id == Stratum::Interior as i32));
        assert!(gt.iter().any(|g| g.stratum_id == Stratum::Singular as i32));
    }

    #[test]
    fn hemisphere_plane_distances_are_closed_form() {
        let s = spec(Shape::HemispherePlane, 3000, 0.0);
        let cloud = sample_hemisphere_plane(&s).unwrap();
        let mut on_hemisphere = 0;
        for (p, g) in cloud.points().zip(cloud.ground_truth().unwrap()) {
            let rho = p[0].hypot(p[1]);
            if p[2] > 0.0 {
                on_hemisphere += 1;
                assert!(((rho * rho + p[2] * p[2]).sqrt() - 1.0).abs() < 1e-12);
                // Chord from (rho, z) on the unit sphere to the equator point
                // at the same angle: sqrt(2 - 2 rho).
                assert!((g.distance_to_singular_locus - (2.0 - 2.0 * rho).max(0.0).sqrt()).abs() < 1e-7);
            } else {
                assert!(rho <= 2.0);
                assert!((g.distance_to_singular_locus - (rho - 1.0).abs()).abs() < 1e-12);
            }
        }
        let frac = on_hemisphere as f64 / 3000.0;
        assert!((frac - 1.0 / 3.0).abs() < 0.04, "hemisphere fraction {frac}");
    }

    #[test]
    fn sphere_radius_within_noise() {
        let noise = 0.05;
        let cloud = sample_sphere(&spec(Shape::Sphere, 500, noise)).unwrap();
        for p in cloud.points() {
            let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
            assert!((r - 1.0).abs() <= noise + 1e-12);
        }
        assert!(cloud.ground_truth().unwrap().iter().all(|g| !g.near_singularity));
    }

    #[test]
    fn circle_is_planar_unit() {
        let cloud = sample_circle(&spec(Shape::Circle, 200, 0.0)).unwrap();
        assert_eq!(cloud.ambient_dim(), 2);
        for p in cloud.points() {
            assert!((p[0].hypot(p[1]) - 1.0).abs() < 1e-12);
        }
    }
}
