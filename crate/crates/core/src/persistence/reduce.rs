use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::filtration::{Filtration, Vertex};

/// Column indices are filtration positions.
type Idx = u32;
type Column = Vec<Idx>;

const NONE: Idx = Idx::MAX;
/// Largest per-dimension table for the dense simplex lookup.
const DENSE_LOOKUP_LIMIT: u64 = 1 << 21;

/// Persistence pairs `(birth, death)` and unpaired (essential) simplices,
/// both as filtration positions.
#[derive(Debug, Default)]
pub(super) struct Pairs {
    pub finite: Vec<(usize, usize)>,
    pub essential: Vec<usize>,
}

/// Position lookup for the simplices of one dimension. Simplices are keyed
/// by their combinatorial number `sum_i C(v_i, i + 1)`, which is a bijection
/// onto `0..C(n, d + 1)` for `d`-simplices on `n` vertices.
enum Lookup {
    Dense(Vec<Idx>),
    Hashed(HashMap<u64, Idx>),
}

impl Lookup {
    fn get(&self, key: u64) -> Option<Idx> {
        match self {
            Lookup::Dense(t) => t.get(key as usize).copied().filter(|&p| p != NONE),
            Lookup::Hashed(m) => m.get(&key).copied(),
        }
    }

    /// Returns false if the key was already present.
    fn insert(&mut self, key: u64, pos: Idx) -> bool {
        match self {
            Lookup::Dense(t) => std::mem::replace(&mut t[key as usize], pos) == NONE,
            Lookup::Hashed(m) => m.insert(key, pos).is_none(),
        }
    }
}

/// `binom[j][v] = C(v, j)` for `j <= top + 1`, saturating.
fn binomials(n: usize, top: usize) -> Vec<Vec<u64>> {
    let mut b = vec![vec![0u64; n + 1]; top + 2];
    for v in 0..=n {
        b[0][v] = 1;
        for j in 1..top + 2 {
            b[j][v] = if v == 0 {
                0
            } else {
                b[j - 1][v - 1].saturating_add(b[j][v - 1])
            };
        }
    }
    b
}

fn key(binom: &[Vec<u64>], vertices: impl Iterator<Item = Vertex>) -> u64 {
    vertices
        .enumerate()
        .fold(0u64, |acc, (i, v)| acc.wrapping_add(binom[i + 1][v as usize]))
}

/// Sparse boundary matrix of a filtration, truncated at `top_dim`.
pub(super) struct BoundaryComplex {
    len: usize,
    /// Facet positions of simplex `j`, sorted ascending, are
    /// `faces[offsets[j]..offsets[j + 1]]`.
    offsets: Vec<usize>,
    faces: Vec<Idx>,
    /// Filtration positions grouped by dimension, in filtration order.
    by_dim: Vec<Vec<Idx>>,
    /// Index of each position within its `by_dim` list.
    rank: Vec<Idx>,
}

impl BoundaryComplex {
    /// Builds boundaries for simplices of dimension at most `top_dim`,
    /// checking that every facet exists, precedes its coface and enters no
    /// later than it.
    pub fn new(f: &Filtration, top_dim: usize) -> Result<Self> {
        let entries = f.entries();
        if entries.len() >= NONE as usize {
            return Err(Error::param("filtration too large"));
        }
        let n_vertices = entries
            .iter()
            .flat_map(|e| e.simplex.vertices().last())
            .max()
            .map_or(0, |&v| v as usize + 1);
        let top = entries.iter().map(|e| e.simplex.dim()).max().unwrap_or(0).min(top_dim);
        let binom = binomials(n_vertices, top);
        // Keys stay exact while C(n, d + 1) fits in a u64; beyond that the
        // tables saturate and the dimension cannot be represented.
        let mut lookup: Vec<Lookup> = (0..=top)
            .map(|d| {
                let size = binom[d + 1][n_vertices];
                if size <= DENSE_LOOKUP_LIMIT {
                    Ok(Lookup::Dense(vec![NONE; size as usize]))
                } else if size < u64::MAX {
                    Ok(Lookup::Hashed(HashMap::new()))
                } else {
                    Err(Error::param(format!("too many vertices for {d}-simplices")))
                }
            })
            .collect::<Result<_>>()?;

        let mut offsets = Vec::with_capacity(entries.len() + 1);
        offsets.push(0);
        let mut faces: Vec<Idx> = Vec::new();
        let mut by_dim: Vec<Vec<Idx>> = vec![Vec::new(); top + 1];
        let mut rank = Vec::with_capacity(entries.len());
        for (j, e) in entries.iter().enumerate() {
            let dim = e.simplex.dim();
            if dim > top {
                offsets.push(faces.len());
                rank.push(NONE);
                continue;
            }
            let vs = e.simplex.vertices();
            rank.push(by_dim[dim].len() as Idx);
            by_dim[dim].push(j as Idx);
            if dim > 0 {
                let start = faces.len();
                for skip in 0..vs.len() {
                    let facet = vs.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v);
                    let Some(p) = lookup[dim - 1].get(key(&binom, facet)) else {
                        let face: Vec<Vertex> = vs
                            .iter()
                            .enumerate()
                            .filter(|&(i, _)| i != skip)
                            .map(|(_, &v)| v)
                            .collect();
                        return Err(Error::Integrity(format!(
                            "face {face:?} of {vs:?} missing or later in the filtration"
                        )));
                    };
                    if entries[p as usize].value > e.value {
                        return Err(Error::Integrity(format!(
                            "face {:?} enters after its coface {vs:?}",
                            entries[p as usize].simplex.vertices()
                        )));
                    }
                    faces.push(p);
                }
                faces[start..].sort_unstable();
            }
            if !lookup[dim].insert(key(&binom, vs.iter().copied()), j as Idx) {
                return Err(Error::Integrity(format!("duplicate simplex {vs:?}")));
            }
            offsets.push(faces.len());
        }
        if entries.is_empty() {
            by_dim.clear();
        }
        Ok(BoundaryComplex {
            len: entries.len(),
            offsets,
            faces,
            by_dim,
            rank,
        })
    }

    fn boundary(&self, j: Idx) -> &[Idx] {
        &self.faces[self.offsets[j as usize]..self.offsets[j as usize + 1]]
    }

    fn top_dim(&self) -> usize {
        self.by_dim.len().saturating_sub(1)
    }

    /// Standard reduction of the boundary matrix with clearing: columns of
    /// dimension `d` are reduced before those of `d - 1`, and any simplex
    /// found as a pivot is positive, so its own column is skipped.
    pub fn reduce_homology(&self, max_degree: usize) -> Pairs {
        let n = self.len;
        let top = self.top_dim().min(max_degree + 1);
        // pivot_owner[low] indexes the reduced column in `store`.
        let mut pivot_owner: Vec<Idx> = vec![NONE; n];
        let mut store: Vec<Column> = Vec::new();
        // Positive simplices found as pivots and the negative simplices that
        // killed them.
        let mut paired = vec![false; n];
        let mut pairs = Pairs::default();
        let mut scratch = Column::new();

        for d in (1..=top).rev() {
            for &j in &self.by_dim[d] {
                if paired[j as usize] {
                    continue;
                }
                let mut col = self.boundary(j).to_vec();
                while let Some(&low) = col.last() {
                    let owner = pivot_owner[low as usize];
                    if owner == NONE {
                        break;
                    }
                    symmetric_difference(&col, &store[owner as usize], &mut scratch);
                    std::mem::swap(&mut col, &mut scratch);
                }
                if let Some(&low) = col.last() {
                    pivot_owner[low as usize] = store.len() as Idx;
                    paired[low as usize] = true;
                    paired[j as usize] = true;
                    pairs.finite.push((low as usize, j as usize));
                    store.push(col);
                }
            }
        }
        for cols in self.by_dim.iter().take(max_degree + 1) {
            pairs
                .essential
                .extend(cols.iter().map(|&j| j as usize).filter(|&j| !paired[j]));
        }
        pairs
    }

    /// Reduction of the anti-transposed boundary matrix. Columns are
    /// coboundaries of `d`-simplices taken in reverse filtration order; the
    /// pivot of a column is its earliest coface. Clearing runs upwards: a
    /// simplex that appeared as a pivot in degree `d - 1` is a death and its
    /// coboundary column is skipped.
    pub fn reduce_cohomology(&self, max_degree: usize) -> Pairs {
        let n = self.len;
        let top = self.top_dim();
        let mut pairs = Pairs::default();
        if self.by_dim.is_empty() {
            return pairs;
        }
        let mut is_death = vec![false; n];
        let mut pivot_owner: Vec<Idx> = vec![NONE; n];
        let mut scratch = Column::new();

        for d in 0..=max_degree.min(top) {
            let mut coboundary = if d < top {
                self.coboundaries(d)
            } else {
                vec![Column::new(); self.by_dim[d].len()]
            };
            let mut store: Vec<Column> = Vec::new();
            for &j in self.by_dim[d].iter().rev() {
                if is_death[j as usize] {
                    continue;
                }
                let mut col = std::mem::take(&mut coboundary[self.rank[j as usize] as usize]);
                while let Some(&pivot) = col.first() {
                    let owner = pivot_owner[pivot as usize];
                    if owner == NONE {
                        break;
                    }
                    symmetric_difference(&col, &store[owner as usize], &mut scratch);
                    std::mem::swap(&mut col, &mut scratch);
                }
                match col.first() {
                    Some(&pivot) => {
                        is_death[pivot as usize] = true;
                        pairs.finite.push((j as usize, pivot as usize));
                        pivot_owner[pivot as usize] = store.len() as Idx;
                        store.push(col);
                    }
                    None => pairs.essential.push(j as usize),
                }
            }
        }
        pairs
    }

    /// Coboundary columns of the `d`-simplices, indexed by rank in
    /// `by_dim[d]`.
    fn coboundaries(&self, d: usize) -> Vec<Column> {
        let mut out = vec![Column::new(); self.by_dim[d].len()];
        // Cofaces are visited in filtration order, so columns come out sorted.
        for &c in &self.by_dim[d + 1] {
            for &face in self.boundary(c) {
                out[self.rank[face as usize] as usize].push(c);
            }
        }
        out
    }
}

/// `out = a xor b` for sorted, duplicate-free index lists.
fn symmetric_difference(a: &[Idx], b: &[Idx], out: &mut Column) {
    out.clear();
    out.reserve(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinatorial_keys_are_a_bijection() {
        let n = 9;
        let binom = binomials(n, 2);
        let mut seen = Vec::new();
        for a in 0..n as Vertex {
            for b in a + 1..n as Vertex {
                for c in b + 1..n as Vertex {
                    seen.push(key(&binom, [a, b, c].into_iter()));
                }
            }
        }
        seen.sort_unstable();
        assert_eq!(seen, (0..binom[3][n]).collect::<Vec<_>>());
        assert_eq!(binom[3][n], 84);
    }

    #[test]
    fn xor_merge() {
        let mut out = Vec::new();
        symmetric_difference(&[1, 3, 5, 9], &[2, 3, 9, 10], &mut out);
        assert_eq!(out, vec![1, 2, 5, 10]);
        symmetric_difference(&[], &[4], &mut out);
        assert_eq!(out, vec![4]);
    }
}
