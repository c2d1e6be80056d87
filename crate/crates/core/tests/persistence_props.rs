use proptest::prelude::*;
use stratify_core::{
    betti_numbers_at_scale, bottleneck_distance, build_rips_filtration, compute_barcode_with, Reduction,
};

fn cloud(max_points: usize, dim: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(0.0f64..1.0, dim), 1..=max_points)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn barcode_ranks_match_oracle(pts in cloud(10, 3), t_max in 0.3f64..2.0) {
        let f = build_rips_filtration(&pts, 3, t_max).unwrap();
        for reduction in [Reduction::Homology, Reduction::Cohomology] {
            let bc = compute_barcode_with(&f, 2, reduction).unwrap();
            for t in f.critical_values() {
                let betti = betti_numbers_at_scale(&f, t, 2);
                for (d, &b) in betti.iter().enumerate() {
                    prop_assert_eq!(bc.rank_at(d, t), b, "degree {} at t={} ({:?})", d, t, reduction);
                }
            }
        }
    }

    #[test]
    fn reductions_agree(pts in cloud(14, 2)) {
        let f = build_rips_filtration(&pts, 3, 1.0).unwrap();
        prop_assert_eq!(
            compute_barcode_with(&f, 2, Reduction::Homology).unwrap(),
            compute_barcode_with(&f, 2, Reduction::Cohomology).unwrap()
        );
    }

    #[test]
    fn euler_characteristic(pts in cloud(10, 3)) {
        let f = build_rips_filtration(&pts, 2, 2.0).unwrap();
        let bc = compute_barcode_with(&f, 2, Reduction::Cohomology).unwrap();
        for t in f.critical_values() {
            let from_bars: i64 = (0..=2).map(|d| (-1i64).pow(d as u32) * bc.rank_at(d, t) as i64).sum();
            let from_cells: i64 = f
                .entries()
                .iter()
                .filter(|e| e.value <= t)
                .map(|e| (-1i64).pow(e.simplex.dim() as u32))
                .sum();
            prop_assert_eq!(from_bars, from_cells);
        }
    }

    /// Integer grids produce many equal filtration values, so this also
    /// exercises tie-breaking.
    #[test]
    fn relabelling_vertices_keeps_the_barcode(
        grid in prop::collection::vec(prop::collection::vec(0i32..4, 2), 2..12),
        rotate in 0usize..12,
    ) {
        let pts: Vec<Vec<f64>> = grid.iter().map(|p| p.iter().map(|&x| x as f64).collect()).collect();
        let mut shuffled = pts.clone();
        shuffled.reverse();
        let k = rotate % shuffled.len();
        shuffled.rotate_left(k);
        for reduction in [Reduction::Homology, Reduction::Cohomology] {
            let a = compute_barcode_with(&build_rips_filtration(&pts, 2, 3.0).unwrap(), 1, reduction).unwrap();
            let b = compute_barcode_with(&build_rips_filtration(&shuffled, 2, 3.0).unwrap(), 1, reduction).unwrap();
            prop_assert_eq!(a, b);
        }
    }

    /// Every point moves at most `eps`, so every pairwise distance moves at
    /// most `2 eps`, which bounds the bottleneck distance.
    #[test]
    fn perturbation_stability(
        pts in cloud(20, 2),
        moves in prop::collection::vec((0.0f64..std::f64::consts::TAU, 0.0f64..=1.0), 20),
        eps in 0.001f64..0.1,
    ) {
        let moved: Vec<Vec<f64>> = pts
            .iter()
            .zip(&moves)
            .map(|(p, &(a, r))| vec![p[0] + eps * r * a.cos(), p[1] + eps * r * a.sin()])
            .collect();
        let a = compute_barcode_with(&build_rips_filtration(&pts, 2, 10.0).unwrap(), 1, Reduction::Cohomology).unwrap();
        let b = compute_barcode_with(&build_rips_filtration(&moved, 2, 10.0).unwrap(), 1, Reduction::Cohomology).unwrap();
        for d in 0..=1 {
            prop_assert!(bottleneck_distance(&a, &b, d) <= 2.0 * eps + 1e-12);
        }
    }
}
