use super::Barcode;

/// Bottleneck distance between the degree-`dim` parts of two barcodes.
///
/// Finite intervals are matched to each other or to the diagonal under the
/// L-infinity cost; the optimum is found by binary search over the finite
/// set of candidate costs, testing each with a perfect bipartite matching.
/// Infinite intervals are matched among themselves by sorted birth. If the
/// two barcodes have different numbers of infinite intervals the distance is
/// `+inf`.
pub fn bottleneck_distance(a: &Barcode, b: &Barcode, dim: usize) -> f64 {
    let (a_fin, a_inf) = split(a, dim);
    let (b_fin, b_inf) = split(b, dim);
    if a_inf.len() != b_inf.len() {
        return f64::INFINITY;
    }
    let essential = a_inf.iter().zip(&b_inf).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    essential.max(finite_bottleneck(&a_fin, &b_fin))
}

fn split(bc: &Barcode, dim: usize) -> (Vec<(f64, f64)>, Vec<f64>) {
    let mut finite = Vec::new();
    let mut births = Vec::new();
    for i in bc.in_dim(dim) {
        if i.is_infinite() {
            births.push(i.birth);
        } else {
            finite.push((i.birth, i.death));
        }
    }
    births.sort_by(f64::total_cmp);
    (finite, births)
}

fn linf(x: (f64, f64), y: (f64, f64)) -> f64 {
    (x.0 - y.0).abs().max((x.1 - y.1).abs())
}

fn to_diagonal(x: (f64, f64)) -> f64 {
    (x.1 - x.0) / 2.0
}

fn finite_bottleneck(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let mut candidates: Vec<f64> = vec![0.0];
    candidates.extend(a.iter().map(|&x| to_diagonal(x)));
    candidates.extend(b.iter().map(|&y| to_diagonal(y)));
    for &x in a {
        candidates.extend(b.iter().map(|&y| linf(x, y)));
    }
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    // Matching everything to the diagonal is always feasible at the largest
    // half-length, so the last candidate succeeds.
    let (mut lo, mut hi) = (0, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if perfect_matching_exists(a, b, candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    candidates[lo]
}

/// Whether the augmented bipartite graph at threshold `delta` has a perfect
/// matching. Left vertices: points of `a`, then diagonal copies of `b`.
/// Right vertices: points of `b`, then diagonal copies of `a`.
fn perfect_matching_exists(a: &[(f64, f64)], b: &[(f64, f64)], delta: f64) -> bool {
    let (n, m) = (a.len(), b.len());
    let adj: Vec<Vec<usize>> = (0..n + m)
        .map(|l| {
            if l < n {
                let mut out: Vec<usize> = (0..m).filter(|&j| linf(a[l], b[j]) <= delta).collect();
                if to_diagonal(a[l]) <= delta {
                    out.push(m + l);
                }
                out
            } else {
                let j = l - n;
                let mut out = Vec::with_capacity(n + 1);
                if to_diagonal(b[j]) <= delta {
                    out.push(j);
                }
                out.extend(m..m + n);
                out
            }
        })
        .collect();

    let mut match_right = vec![usize::MAX; n + m];
    for l in 0..n + m {
        let mut seen = vec![false; n + m];
        if !augment(l, &adj, &mut match_right, &mut seen) {
            return false;
        }
    }
    true
}

fn augment(l: usize, adj: &[Vec<usize>], match_right: &mut [usize], seen: &mut [bool]) -> bool {
    for &r in &adj[l] {
        if seen[r] {
            continue;
        }
        seen[r] = true;
        if match_right[r] == usize::MAX || augment(match_right[r], adj, match_right, seen) {
            match_right[r] = l;
            return true;
        }
    }
    false
}
