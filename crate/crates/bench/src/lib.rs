//! Inputs shared by the benchmarks.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `n` points spread uniformly over the planar annulus `r <= |x| <= s`,
/// the typical neighbourhood of a manifold point.
pub fn planar_annulus(n: usize, r: f64, s: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            // Radius by inverse CDF so the density is uniform in area.
            let rho = (r * r + rng.gen::<f64>() * (s * s - r * r)).sqrt();
            let a = rng.gen_range(0.0..TAU);
            vec![rho * a.cos(), rho * a.sin(), 0.0]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn annulus_points_in_band() {
        for p in planar_annulus(500, 0.1, 0.2, 3) {
            let rho = p[0].hypot(p[1]);
            assert!((0.1..=0.2 + 1e-12).contains(&rho));
        }
    }
}
