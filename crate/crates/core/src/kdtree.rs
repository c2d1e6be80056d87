//! Static k-d tree over a row-major coordinate buffer.

use crate::geometry::distance;

const LEAF_SIZE: usize = 12;

#[derive(Debug, Clone)]
struct Node {
    /// Range into `KdTree::order`.
    start: usize,
    end: usize,
    /// Child node indices; `usize::MAX` for leaves.
    left: usize,
    right: usize,
}

/// Axis-aligned k-d tree. Each node keeps its bounding box so that shell
/// queries can prune subtrees lying entirely inside the inner radius or
/// entirely outside the outer radius.
#[derive(Debug, Clone)]
pub struct KdTree {
    dim: usize,
    order: Vec<usize>,
    nodes: Vec<Node>,
    /// `2 * dim` floats per node: mins then maxes.
    boxes: Vec<f64>,
}

impl KdTree {
    pub fn build(coords: &[f64], dim: usize) -> Self {
        let n = coords.len() / dim;
        let mut tree = KdTree {
            dim,
            order: (0..n).collect(),
            nodes: Vec::new(),
            boxes: Vec::new(),
        };
        if n > 0 {
            tree.build_node(coords, 0, n);
        }
        tree
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    fn build_node(&mut self, coords: &[f64], start: usize, end: usize) -> usize {
        let dim = self.dim;
        let mut lo = vec![f64::INFINITY; dim];
        let mut hi = vec![f64::NEG_INFINITY; dim];
        for &i in &self.order[start..end] {
            for d in 0..dim {
                let c = coords[i * dim + d];
                lo[d] = lo[d].min(c);
                hi[d] = hi[d].max(c);
            }
        }
        let id = self.nodes.len();
        self.nodes.push(Node {
            start,
            end,
            left: usize::MAX,
            right: usize::MAX,
        });
        self.boxes.extend_from_slice(&lo);
        self.boxes.extend_from_slice(&hi);

        if end - start <= LEAF_SIZE {
            return id;
        }
        let axis = (0..dim)
            .max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b])))
            .unwrap_or(0);
        if hi[axis] - lo[axis] == 0.0 {
            // All points coincide.
            return id;
        }
        let mid = start + (end - start) / 2;
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            coords[a * dim + axis].total_cmp(&coords[b * dim + axis])
        });
        let left = self.build_node(coords, start, mid);
        let right = self.build_node(coords, mid, end);
        self.nodes[id].left = left;
        self.nodes[id].right = right;
        id
    }

    /// Squared distance from `q` to the nearest and farthest points of the
    /// node's box.
    fn box_bounds_sq(&self, node: usize, q: &[f64]) -> (f64, f64) {
        let base = node * 2 * self.dim;
        let (lo, hi) = self.boxes[base..base + 2 * self.dim].split_at(self.dim);
        let mut near = 0.0;
        let mut far = 0.0;
        for d in 0..self.dim {
            let below = lo[d] - q[d];
            let above = q[d] - hi[d];
            let gap = below.max(above).max(0.0);
            near += gap * gap;
            let reach = (q[d] - lo[d]).abs().max((hi[d] - q[d]).abs());
            far += reach * reach;
        }
        (near, far)
    }

    /// Unsorted indices with `lo <= |p - q| <= hi`.
    pub fn within_shell(&self, coords: &[f64], q: &[f64], lo: f64, hi: f64) -> Vec<usize> {
        let mut out = Vec::new();
        if self.nodes.is_empty() {
            return out;
        }
        // Pruning runs on squared distances with a little slack; the final
        // membership test is on the true distance.
        let slack = 1.0 + 1e-9;
        let hi_sq = hi * hi * slack;
        let lo_sq = lo * lo / slack;
        let mut stack = vec![0usize];
        while let Some(id) = stack.pop() {
            let (near, far) = self.box_bounds_sq(id, q);
            if near > hi_sq || far < lo_sq {
                continue;
            }
            let node = &self.nodes[id];
            if node.left == usize::MAX {
                for &i in &self.order[node.start..node.end] {
                    let d = distance(&coords[i * self.dim..(i + 1) * self.dim], q);
                    if lo <= d && d <= hi {
                        out.push(i);
                    }
                }
            } else {
                stack.push(node.left);
                stack.push(node.right);
            }
        }
        out
    }

    /// Index and distance of the point nearest to `q`; ties go to the
    /// smaller index.
    pub fn nearest(&self, coords: &[f64], q: &[f64]) -> Option<(usize, f64)> {
        if self.nodes.is_empty() {
            return None;
        }
        let mut best = (usize::MAX, f64::INFINITY);
        let mut stack = vec![0usize];
        while let Some(id) = stack.pop() {
            let (near, _) = self.box_bounds_sq(id, q);
            if near.sqrt() > best.1 * (1.0 + 1e-12) {
                continue;
            }
            let node = &self.nodes[id];
            if node.left == usize::MAX {
                for &i in &self.order[node.start..node.end] {
                    let d = distance(&coords[i * self.dim..(i + 1) * self.dim], q);
                    if d < best.1 || (d == best.1 && i < best.0) {
                        best = (i, d);
                    }
                }
            } else {
                // Visit the nearer child first.
                let (l, r) = (node.left, node.right);
                if self.box_bounds_sq(l, q).0 <= self.box_bounds_sq(r, q).0 {
                    stack.push(r);
                    stack.push(l);
                } else {
                    stack.push(l);
                    stack.push(r);
                }
            }
        }
        Some(best)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coincident_points_form_a_leaf() {
        let coords = vec![1.0; 2 * 40];
        let tree = KdTree::build(&coords, 2);
        let mut hits = tree.within_shell(&coords, &[1.0, 1.0], 0.0, 0.0);
        hits.sort_unstable();
        assert_eq!(hits, (0..40).collect::<Vec<_>>());
    }

    #[test]
    fn one_dimensional_grid() {
        let coords: Vec<f64> = (0..100).map(f64::from).collect();
        let tree = KdTree::build(&coords, 1);
        let mut hits = tree.within_shell(&coords, &[50.0], 2.0, 3.0);
        hits.sort_unstable();
        assert_eq!(hits, vec![47, 48, 52, 53]);
    }

    #[test]
    fn nearest_matches_scan() {
        let coords: Vec<f64> = (0..600).map(|i| ((i * 7919) % 1000) as f64 / 97.0).collect();
        let tree = KdTree::build(&coords, 3);
        for q in [[0.0, 0.0, 0.0], [5.0, 1.0, 9.0], [3.3, 3.3, 3.3]] {
            let (i, d) = tree.nearest(&coords, &q).unwrap();
            let scan = (0..200)
                .map(|j| distance(&coords[j * 3..j * 3 + 3], &q))
                .fold(f64::INFINITY, f64::min);
            assert_eq!(d, scan);
            assert_eq!(distance(&coords[i * 3..i * 3 + 3], &q), d);
        }
        assert!(KdTree::build(&[], 2).nearest(&[], &[0.0, 0.0]).is_none());
    }
}
