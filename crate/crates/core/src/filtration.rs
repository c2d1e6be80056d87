//! Vietoris-Rips filtrations.
//!
//! A simplex enters the filtration at its diameter, the largest pairwise
//! distance among its vertices. Entries are kept in the total order of
//! [`filtration_order`], which places every face before its cofaces.

use std::cmp::Ordering;
use std::fmt::Write as _;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::geometry::distance;

pub type Vertex = u32;

/// A simplex as its strictly increasing vertex list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex(SmallVec<[Vertex; 4]>);

impl Simplex {
    /// Sorts and deduplicates `vertices`; fails on an empty list.
    pub fn new(vertices: impl IntoIterator<Item = Vertex>) -> Result<Self> {
        let mut v: SmallVec<[Vertex; 4]> = vertices.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        if v.is_empty() {
            return Err(Error::param("a simplex needs at least one vertex"));
        }
        Ok(Simplex(v))
    }

    pub(crate) fn from_sorted(v: SmallVec<[Vertex; 4]>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        Simplex(v)
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    /// Codimension-one faces, each omitting one vertex.
    pub fn facets(&self) -> impl Iterator<Item = Simplex> + '_ {
        let n = if self.0.len() > 1 { self.0.len() } else { 0 };
        (0..n).map(move |skip| {
            Simplex(
                self.0
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != skip)
                    .map(|(_, &v)| v)
                    .collect(),
            )
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiltrationEntry {
    pub simplex: Simplex,
    pub value: f64,
}

/// Total order on filtration entries: value, then dimension, then
/// lexicographic vertex order.
pub fn filtration_order(a: &FiltrationEntry, b: &FiltrationEntry) -> Ordering {
    a.value
        .total_cmp(&b.value)
        .then_with(|| a.simplex.dim().cmp(&b.simplex.dim()))
        .then_with(|| a.simplex.vertices().cmp(b.simplex.vertices()))
}

/// Maps `f64` to `u64` so that unsigned order matches `f64::total_cmp`.
fn ordered_bits(x: f64) -> u64 {
    let b = x.to_bits();
    if b >> 63 == 1 {
        !b
    } else {
        b | 1 << 63
    }
}

/// Sorts into [`filtration_order`]. When every simplex has at most four
/// vertices below `2^16`, the vertex list packs into a `u64` whose order is
/// the lexicographic one, and sorting runs on integer keys.
fn sort_entries(entries: &mut Vec<FiltrationEntry>) {
    let packable = entries
        .iter()
        .all(|e| e.simplex.vertices().len() <= 4 && e.simplex.vertices().iter().all(|&v| v < 1 << 16));
    if !packable {
        entries.sort_unstable_by(filtration_order);
        return;
    }
    let mut keys: Vec<(u64, u8, u64)> = entries
        .iter()
        .map(|e| {
            let lex = e
                .simplex
                .vertices()
                .iter()
                .enumerate()
                .fold(0u64, |acc, (k, &v)| acc | (v as u64) << (48 - 16 * k));
            (ordered_bits(e.value), e.simplex.dim() as u8, lex)
        })
        .collect();
    keys.sort_unstable();
    // Rebuilding from the keys is lossless and avoids a random-access
    // permutation of the entries.
    entries.clear();
    entries.extend(keys.into_iter().map(|(bits, dim, lex)| {
        FiltrationEntry {
            simplex: Simplex(
                (0..=dim as usize)
                    .map(|k| (lex >> (48 - 16 * k)) as Vertex & 0xffff)
                    .collect(),
            ),
            value: from_ordered_bits(bits),
        }
    }));
}

fn from_ordered_bits(u: u64) -> f64 {
    f64::from_bits(if u >> 63 == 1 { u & !(1 << 63) } else { !u })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Filtration {
    entries: Vec<FiltrationEntry>,
    max_dim: usize,
    t_max: f64,
}

impl Filtration {
    /// Wraps pre-built entries after sorting them into filtration order.
    /// Face closure is not checked here; [`crate::persistence`] rejects
    /// filtrations whose faces are missing or out of order.
    pub fn from_entries(mut entries: Vec<FiltrationEntry>, max_dim: usize, t_max: f64) -> Self {
        sort_entries(&mut entries);
        Filtration {
            entries,
            max_dim,
            t_max,
        }
    }

    /// Wraps entries in the given order, without sorting.
    pub fn from_ordered_entries(entries: Vec<FiltrationEntry>, max_dim: usize, t_max: f64) -> Self {
        Filtration {
            entries,
            max_dim,
            t_max,
        }
    }

    pub fn entries(&self) -> &[FiltrationEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_dim(&self) -> usize {
        self.max_dim
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    /// Distinct filtration values in increasing order.
    pub fn critical_values(&self) -> Vec<f64> {
        let mut vals: Vec<f64> = self.entries.iter().map(|e| e.value).collect();
        vals.dedup();
        vals
    }

    /// Debug export, one `value dim v0 v1 ...` line per entry.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            write!(out, "{} {}", e.value, e.simplex.dim()).unwrap();
            for v in e.simplex.vertices() {
                write!(out, " {v}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// All simplices of dimension at most `max_dim` and diameter at most `t_max`
/// on the given points, in filtration order.
pub fn build_rips_filtration<P: AsRef<[f64]>>(points: &[P], max_dim: usize, t_max: f64) -> Result<Filtration> {
    if !(t_max > 0.0) {
        return Err(Error::param(format!("t_max must be positive, got {t_max}")));
    }
    let n = points.len();
    if n > Vertex::MAX as usize {
        return Err(Error::param("too many points for a Rips filtration"));
    }
    let mut dist = vec![0.0f64; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let d = distance(points[i].as_ref(), points[j].as_ref());
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }
    // Forward adjacency: neighbours with a larger index within t_max.
    let upper: Vec<Vec<Vertex>> = (0..n)
        .map(|i| {
            (i + 1..n)
                .filter(|&j| dist[i * n + j] <= t_max)
                .map(|j| j as Vertex)
                .collect()
        })
        .collect();

    let mut entries = Vec::new();
    let mut stack: SmallVec<[Vertex; 4]> = SmallVec::new();
    for v in 0..n {
        stack.push(v as Vertex);
        entries.push(FiltrationEntry {
            simplex: Simplex::from_sorted(stack.clone()),
            value: 0.0,
        });
        if max_dim > 0 {
            extend_cliques(&dist, n, &upper, &upper[v], &mut stack, 0.0, max_dim, &mut entries);
        }
        stack.pop();
    }
    Ok(Filtration::from_entries(entries, max_dim, t_max))
}

/// Depth-first clique enumeration: `candidates` are vertices adjacent to
/// every vertex on `stack` and larger than its last vertex.
#[allow(clippy::too_many_arguments)]
fn extend_cliques(
    dist: &[f64],
    n: usize,
    upper: &[Vec<Vertex>],
    candidates: &[Vertex],
    stack: &mut SmallVec<[Vertex; 4]>,
    value: f64,
    max_dim: usize,
    out: &mut Vec<FiltrationEntry>,
) {
    for (ci, &c) in candidates.iter().enumerate() {
        let cu = c as usize;
        let diam = stack.iter().map(|&v| dist[v as usize * n + cu]).fold(value, f64::max);
        stack.push(c);
        out.push(FiltrationEntry {
            simplex: Simplex::from_sorted(stack.clone()),
            value: diam,
        });
        if stack.len() <= max_dim {
            let next: Vec<Vertex> = candidates[ci + 1..]
                .iter()
                .copied()
                .filter(|w| upper[cu].binary_search(w).is_ok())
                .collect();
            if !next.is_empty() {
                extend_cliques(dist, n, upper, &next, stack, diam, max_dim, out);
            }
        }
        stack.pop();
    }
}
