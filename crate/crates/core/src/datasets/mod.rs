//! Synthetic singular spaces with ground truth, and the Henneberg surface.

mod henneberg;
mod shapes;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use henneberg::{
    henneberg_point, locus_components, rim_distances, rim_samples, sample_henneberg, self_intersection_locus,
    HennebergParams, HennebergSampling, LocusPoint,
};
pub use shapes::{sample_circle, sample_hemisphere_plane, sample_planes, sample_sphere};

use crate::error::{Error, Result};
use crate::geometry::{GroundTruthLabel, PointCloud, Stratum};
use crate::kdtree::KdTree;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Henneberg,
    Planes,
    HemispherePlane,
    Circle,
    Sphere,
}

impl Shape {
    pub const ALL: [Shape; 5] = [
        Shape::Henneberg,
        Shape::Planes,
        Shape::HemispherePlane,
        Shape::Circle,
        Shape::Sphere,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Shape::Henneberg => "henneberg",
            Shape::Planes => "planes",
            Shape::HemispherePlane => "hemisphere_plane",
            Shape::Circle => "circle",
            Shape::Sphere => "sphere",
        }
    }

    /// Point count used when none is given.
    pub fn default_count(self) -> usize {
        match self {
            Shape::Henneberg => 5456,
            Shape::Planes => 4000,
            Shape::HemispherePlane => 3000,
            Shape::Circle => 500,
            Shape::Sphere => 2000,
        }
    }

    /// Ground-truth proximity radius used when none is given.
    pub fn default_proximity(self) -> f64 {
        match self {
            Shape::Henneberg => 1.5,
            Shape::Planes | Shape::HemispherePlane => 0.05,
            Shape::Circle | Shape::Sphere => 0.1,
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Shape::ALL.into_iter().find(|shape| shape.as_str() == s).ok_or_else(|| {
            let names: Vec<_> = Shape::ALL.iter().map(|s| s.as_str()).collect();
            Error::param(format!("unknown shape `{s}`, expected one of {}", names.join(", ")))
        })
    }
}

/// How Henneberg points are placed in the parameter rectangle.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingMode {
    #[default]
    Grid,
    Parameter,
    Area,
}

impl FromStr for SamplingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "grid" => Ok(SamplingMode::Grid),
            "parameter" => Ok(SamplingMode::Parameter),
            "area" => Ok(SamplingMode::Area),
            _ => Err(Error::param(format!(
                "unknown sampling mode `{s}`, expected grid, parameter or area"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub shape: Shape,
    pub count: usize,
    pub noise: f64,
    pub seed: u64,
    pub proximity_radius: f64,
    /// Only read by the Henneberg generator.
    #[serde(default)]
    pub sampling: SamplingMode,
}

impl GeneratorSpec {
    pub fn new(shape: Shape) -> Self {
        GeneratorSpec {
            shape,
            count: shape.default_count(),
            noise: 0.0,
            seed: 0,
            proximity_radius: shape.default_proximity(),
            sampling: SamplingMode::Grid,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::param("point count must be positive"));
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return Err(Error::param(format!(
                "noise must be finite and non-negative, got {}",
                self.noise
            )));
        }
        if !(self.proximity_radius >= 0.0) {
            return Err(Error::param("proximity radius must be non-negative"));
        }
        Ok(())
    }

    /// Henneberg parameters for this spec. A grid is sized to the nearest
    /// `beta x phi` layout with the default 62:88 aspect.
    pub fn henneberg_params(&self) -> HennebergParams {
        let sampling = match self.sampling {
            SamplingMode::Grid => {
                let beta_steps = ((self.count as f64 * 62.0 / 88.0).sqrt().round() as usize).max(2);
                let phi_steps = ((self.count as f64 / beta_steps as f64).round() as usize).max(1);
                HennebergSampling::Grid { beta_steps, phi_steps }
            }
            SamplingMode::Parameter => HennebergSampling::Parameter { count: self.count },
            SamplingMode::Area => HennebergSampling::Area { count: self.count },
        };
        HennebergParams {
            sampling,
            seed: self.seed,
            noise: self.noise,
            proximity_radius: self.proximity_radius,
            ..HennebergParams::default()
        }
    }
}

/// Runs the generator named by `spec.shape`.
pub fn generate(spec: &GeneratorSpec) -> Result<PointCloud> {
    spec.validate()?;
    match spec.shape {
        Shape::Henneberg => sample_henneberg(&spec.henneberg_params()),
        Shape::Planes => sample_planes(spec),
        Shape::HemispherePlane => sample_hemisphere_plane(spec),
        Shape::Circle => sample_circle(spec),
        Shape::Sphere => sample_sphere(spec),
    }
}

/// Uniform sample from the ball of radius `radius` in `R^dim`.
pub(crate) fn ball_noise(rng: &mut impl Rng, dim: usize, radius: f64) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        if v.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
            return v.into_iter().map(|x| x * radius).collect();
        }
    }
}

/// Singular if within `proximity` of the locus, otherwise boundary if within
/// `proximity` of the rim, otherwise interior.
pub(crate) fn label_point(locus_distance: f64, rim_distance: f64, proximity: f64) -> GroundTruthLabel {
    let near = locus_distance <= proximity;
    let stratum = if near {
        Stratum::Singular
    } else if rim_distance <= proximity {
        Stratum::Boundary
    } else {
        Stratum::Interior
    };
    GroundTruthLabel {
        near_singularity: near,
        distance_to_singular_locus: locus_distance,
        stratum_id: stratum as i32,
    }
}

/// Nearest-sample distance to a densely sampled set.
pub(crate) struct DistanceField {
    coords: Vec<f64>,
    tree: KdTree,
}

impl DistanceField {
    pub fn new(rows: Vec<Vec<f64>>, dim: usize) -> Self {
        let coords: Vec<f64> = rows.into_iter().flatten().collect();
        let tree = KdTree::build(&coords, dim);
        DistanceField { coords, tree }
    }

    pub fn distance(&self, x: &[f64]) -> f64 {
        self.tree.nearest(&self.coords, x).map_or(f64::INFINITY, |(_, d)| d)
    }
}

/// Connected components of the graph joining points at distance at most
/// `link`. Components are numbered in order of their smallest member.
pub fn single_linkage(rows: &[Vec<f64>], dim: usize, link: f64) -> (usize, Vec<usize>) {
    let coords: Vec<f64> = rows.iter().flatten().copied().collect();
    let tree = KdTree::build(&coords, dim);
    let n = rows.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (i, row) in rows.iter().enumerate() {
        for j in tree.within_shell(&coords, row, 0.0, link) {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut label = vec![usize::MAX; n];
    let mut count = 0;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let root = find(&mut parent, i);
        if label[root] == usize::MAX {
            label[root] = count;
            count += 1;
        }
        out.push(label[root]);
    }
    (count, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn shape_names_roundtrip() {
        for s in Shape::ALL {
            assert_eq!(s.as_str().parse::<Shape>().unwrap(), s);
        }
        assert!("nosuch".parse::<Shape>().is_err());
    }

    #[test]
    fn grid_sizing_reproduces_default() {
        let spec = GeneratorSpec::new(Shape::Henneberg);
        assert_eq!(spec.henneberg_params(), HennebergParams::default());
    }

    #[test]
    fn ball_noise_stays_in_ball() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let v = ball_noise(&mut rng, 3, 0.2);
            assert!(v.iter().map(|x| x * x).sum::<f64>().sqrt() <= 0.2);
        }
    }

    #[test]
    fn linkage_on_a_line() {
        let rows: Vec<Vec<f64>> = [0.0, 0.5, 1.0, 3.0, 3.4, 10.0].iter().map(|&x| vec![x]).collect();
        let (count, labels) = single_linkage(&rows, 1, 0.6);
        assert_eq!(count, 3);
        assert_eq!(labels, vec![0, 0, 0, 1, 1, 2]);
        assert_eq!(single_linkage(&[], 2, 1.0).0, 0);
    }

    #[test]
    fn generators_are_reproducible_and_consistent() {
        for shape in [Shape::Planes, Shape::HemispherePlane, Shape::Circle, Shape::Sphere] {
            let spec = GeneratorSpec {
                count: 300,
                noise: 0.01,
                seed: 11,
                ..GeneratorSpec::new(shape)
            };
            let a = generate(&spec).unwrap();
            let b = generate(&spec).unwrap();
            assert_eq!(a.coords(), b.coords());
            assert_eq!(a.len(), 300);
            for g in a.ground_truth().unwrap() {
                assert_eq!(
                    g.near_singularity,
                    g.distance_to_singular_locus <= spec.proximity_radius
                );
            }
            let other = generate(&GeneratorSpec {
                seed: 12,
                ..spec.clone()
            })
            .unwrap();
            assert_ne!(a.coords(), other.coords());
        }
    }

    #[test]
    fn rejects_invalid_spec() {
        let spec = GeneratorSpec {
            count: 0,
            ..GeneratorSpec::new(Shape::Circle)
        };
        assert!(generate(&spec).is_err());
        let spec = GeneratorSpec {
            noise: -1.0,
            ..GeneratorSpec::new(Shape::Circle)
        };
        assert!(generate(&spec).is_err());
    }
}
