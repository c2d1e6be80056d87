use std::collections::HashMap;

use crate::filtration::{Filtration, Vertex};

/// Betti numbers `b_0..=b_max_degree` of the subcomplex of simplices with
/// value at most `t`, over GF(2).
///
/// Computed as `b_i = (#i-simplices - rank d_i) - rank d_{i+1}` with the
/// ranks found by dense Gaussian elimination. Boundary maps beyond the
/// simplices present are treated as zero maps. This shares nothing with the
/// sparse reduction and serves as its oracle.
pub fn betti_numbers_at_scale(f: &Filtration, t: f64, max_degree: usize) -> Vec<usize> {
    let mut by_dim: Vec<Vec<&[Vertex]>> = vec![Vec::new(); max_degree + 2];
    for e in f.entries().iter().filter(|e| e.value <= t) {
        let d = e.simplex.dim();
        if d <= max_degree + 1 {
            by_dim[d].push(e.simplex.vertices());
        }
    }
    // rank[d] = rank of the boundary map from d-chains to (d-1)-chains.
    let mut rank = vec![0usize; max_degree + 2];
    for d in 1..=max_degree + 1 {
        rank[d] = boundary_rank(&by_dim[d - 1], &by_dim[d]);
    }
    (0..=max_degree)
        .map(|i| by_dim[i].len() - rank[i] - rank[i + 1])
        .collect()
}

fn boundary_rank(faces: &[&[Vertex]], cofaces: &[&[Vertex]]) -> usize {
    if faces.is_empty() || cofaces.is_empty() {
        return 0;
    }
    let row_of: HashMap<&[Vertex], usize> = faces.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let words = faces.len().div_ceil(64);
    let mut rows: Vec<Vec<u64>> = cofaces
        .iter()
        .map(|&c| {
            let mut bits = vec![0u64; words];
            let mut face: Vec<Vertex> = Vec::with_capacity(c.len());
            for skip in 0..c.len() {
                face.clear();
                face.extend(c.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v));
                // Faces missing from the sublevel set cannot occur in a
                // valid filtration; ignore them rather than panic.
                if let Some(&r) = row_of.get(face.as_slice()) {
                    bits[r / 64] ^= 1 << (r % 64);
                }
            }
            bits
        })
        .collect();
    gf2_rank(&mut rows, faces.len())
}

/// Rank over GF(2) of the given bit-packed vectors.
fn gf2_rank(rows: &mut [Vec<u64>], ncols: usize) -> usize {
    let mut rank = 0;
    for col in 0..ncols {
        let (w, b) = (col / 64, 1u64 << (col % 64));
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][w] & b != 0) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[w] & b != 0 {
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x ^= y;
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filtration::build_rips_filtration;

    #[test]
    fn rank_of_identity_and_dependent_rows() {
        let mut rows = vec![vec![0b011u64], vec![0b110], vec![0b101]];
        assert_eq!(gf2_rank(&mut rows, 3), 2);
        let mut id: Vec<Vec<u64>> = (0..70)
            .map(|i| {
                let mut v = vec![0u64; 2];
                v[i / 64] = 1 << (i % 64);
                v
            })
            .collect();
        assert_eq!(gf2_rank(&mut id, 70), 70);
    }

    #[test]
    fn isolated_vertices() {
        let f = build_rips_filtration(&[vec![0.0], vec![1.0], vec![2.0]], 2, 5.0).unwrap();
        assert_eq!(betti_numbers_at_scale(&f, 0.5, 1), vec![3, 0]);
    }

    #[test]
    fn filled_triangle() {
        let h = 3f64.sqrt() / 2.0;
        let f = build_rips_filtration(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, h]], 2, 2.0).unwrap();
        let side = f.entries().last().unwrap().value;
        assert_eq!(betti_numbers_at_scale(&f, side, 1), vec![1, 0]);
    }

    #[test]
    fn square_between_side_and_diagonal() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]];
        let f = build_rips_filtration(&pts, 2, 2.0).unwrap();
        assert_eq!(betti_numbers_at_scale(&f, 1.2, 1), vec![1, 1]);
        assert_eq!(betti_numbers_at_scale(&f, 1.5, 1), vec![1, 0]);
    }

    #[test]
    fn missing_maps_are_zero() {
        // Only vertices and edges exist; degree-2 Betti is 0 and degree-1
        // sees no filling triangles.
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, 0.8]];
        let f = build_rips_filtration(&pts, 1, 2.0).unwrap();
        assert_eq!(betti_numbers_at_scale(&f, 2.0, 2), vec![1, 1, 0]);
    }

    #[test]
    fn octahedron_sphere() {
        let mut pts = Vec::new();
        for axis in 0..3 {
            for sign in [-1.0, 1.0] {
                let mut p = vec![0.0; 3];
                p[axis] = sign;
                pts.push(p);
            }
        }
        // Between sqrt(2) and 2 the Rips complex is the octahedron boundary.
        let f = build_rips_filtration(&pts, 3, 1.8).unwrap();
        assert_eq!(betti_numbers_at_scale(&f, 1.5, 2), vec![1, 0, 1]);
    }
}
