//! Max-norm neighbour search: a k-d tree and the brute-force reference it
//! must agree with exactly.
//!
//! Both searches compare the same `max_d |a_d - b_d|` values, so the k-th
//! neighbour distance and strict-radius counts are bit-identical between
//! them; only the amount of work differs.

/// Points stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    data: Vec<f64>,
    dim: usize,
}

impl PointSet {
    /// `data.len()` must be a multiple of `dim`.
    pub fn new(data: Vec<f64>, dim: usize) -> Self {
        assert!(dim > 0 && data.len() % dim == 0, "data length must be a multiple of dim");
        PointSet { data, dim }
    }

    /// Interleaves equal-length columns into rows.
    pub fn from_columns(columns: &[&[f64]]) -> Self {
        let dim = columns.len();
        let n = columns.first().map_or(0, |c| c.len());
        let mut data = Vec::with_capacity(n * dim);
        for i in 0..n {
            data.extend(columns.iter().map(|c| c[i]));
        }
        PointSet::new(data, dim.max(1))
    }

    /// Horizontal concatenation of row-aligned blocks.
    pub fn hstack(blocks: &[&PointSet]) -> Self {
        let n = blocks.first().map_or(0, |b| b.len());
        assert!(blocks.iter().all(|b| b.len() == n), "blocks must share a row count");
        let dim: usize = blocks.iter().map(|b| b.dim).sum();
        let mut data = Vec::with_capacity(n * dim);
        for i in 0..n {
            for b in blocks {
                data.extend_from_slice(b.row(i));
            }
        }
        PointSet::new(data, dim)
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn column(&self, d: usize) -> Vec<f64> {
        (0..self.len()).map(|i| self.data[i * self.dim + d]).collect()
    }

    pub(crate) fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn scaled(&self, a: f64, b: f64) -> Self {
        PointSet { data: self.data.iter().map(|v| a * v + b).collect(), dim: self.dim }
    }
}

#[inline]
pub fn chebyshev(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| {
        let d = (x - y).abs();
        if d > m {
            d
        } else {
            m
        }
    })
}

/// Neighbour queries over a fixed point set. Indices refer to rows of the
/// set; `exclude` removes one row (the query itself) from consideration.
pub trait NeighborSearch {
    /// Distance to the k-th nearest row other than `exclude` (k >= 1).
    fn kth_distance(&self, query: &[f64], k: usize, exclude: usize) -> f64;
    /// The k nearest rows other than `exclude` as `(distance, index)`,
    /// ascending, ties broken by index.
    fn k_nearest(&self, query: &[f64], k: usize, exclude: usize) -> Vec<(f64, usize)>;
    /// Number of rows other than `exclude` strictly closer than `radius`.
    fn count_within(&self, query: &[f64], radius: f64, exclude: usize) -> usize;
    /// Nearest row other than `exclude` at strictly positive distance,
    /// as `(index, distance)`.
    fn nearest_nonzero(&self, query: &[f64], exclude: usize) -> Option<(usize, f64)>;
}

/// Exhaustive search.
pub struct BruteForce<'a> {
    points: &'a PointSet,
}

impl<'a> BruteForce<'a> {
    pub fn new(points: &'a PointSet) -> Self {
        BruteForce { points }
    }
}

/// Keeps the k smallest `(distance, index)` pairs seen, ascending.
struct SmallestK {
    vals: Vec<(f64, usize)>,
    k: usize,
}

impl SmallestK {
    fn new(k: usize) -> Self {
        SmallestK { vals: Vec::with_capacity(k + 1), k }
    }

    #[inline]
    fn bound(&self) -> f64 {
        if self.vals.len() < self.k {
            f64::INFINITY
        } else {
            self.vals[self.k - 1].0
        }
    }

    #[inline]
    fn push(&mut self, d: f64, idx: usize) {
        if self.vals.len() == self.k {
            let (bd, bi) = self.vals[self.k - 1];
            if d > bd || (d == bd && idx > bi) {
                return;
            }
        }
        let pos = self.vals.partition_point(|&(v, i)| v < d || (v == d && i < idx));
        self.vals.insert(pos, (d, idx));
        self.vals.truncate(self.k);
    }
}

/// Running k smallest distances, values only.
struct KthDistance {
    vals: Vec<f64>,
    k: usize,
}

impl KthDistance {
    fn new(k: usize) -> Self {
        KthDistance { vals: Vec::with_capacity(k + 1), k }
    }

    #[inline]
    fn bound(&self) -> f64 {
        if self.vals.len() < self.k {
            f64::INFINITY
        } else {
            self.vals[self.k - 1]
        }
    }

    #[inline]
    fn push(&mut self, d: f64) {
        if d >= self.bound() {
            return;
        }
        let pos = self.vals.partition_point(|&v| v <= d);
        self.vals.insert(pos, d);
        self.vals.truncate(self.k);
    }
}

impl NeighborSearch for BruteForce<'_> {
    fn kth_distance(&self, query: &[f64], k: usize, exclude: usize) -> f64 {
        let mut best = SmallestK::new(k);
        for j in 0..self.points.len() {
            if j != exclude {
                best.push(chebyshev(query, self.points.row(j)), j);
            }
        }
        best.bound()
    }

    fn k_nearest(&self, query: &[f64], k: usize, exclude: usize) -> Vec<(f64, usize)> {
        let mut best = SmallestK::new(k);
        for j in 0..self.points.len() {
            if j != exclude {
                best.push(chebyshev(query, self.points.row(j)), j);
            }
        }
        best.vals
    }

    fn count_within(&self, query: &[f64], radius: f64, exclude: usize) -> usize {
        (0..self.points.len())
            .filter(|&j| j != exclude && chebyshev(query, self.points.row(j)) < radius)
            .count()
    }

    fn nearest_nonzero(&self, query: &[f64], exclude: usize) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for j in 0..self.points.len() {
            if j == exclude {
                continue;
            }
            let d = chebyshev(query, self.points.row(j));
            if d > 0.0 && best.is_none_or(|(_, b)| d < b) {
                best = Some((j, d));
            }
        }
        best
    }
}

const LEAF_SIZE: usize = 16;
const NO_CHILD: usize = usize::MAX;

#[derive(Debug, Clone)]
struct Node {
    start: usize,
    end: usize,
    left: usize,
    right: usize,
}

/// Static k-d tree with per-node bounding boxes.
#[derive(Debug, Clone)]
pub struct KdTree {
    dim: usize,
    /// Points in tree order.
    coords: Vec<f64>,
    /// Original row index of each tree-ordered point.
    ids: Vec<usize>,
    nodes: Vec<Node>,
    /// `2 * dim` values per node: mins then maxes.
    boxes: Vec<f64>,
    /// Tree slot of each original row.
    slot_of: Vec<usize>,
    /// Leaf node holding each slot.
    leaf_of: Vec<usize>,
}

impl KdTree {
    pub fn build(points: &PointSet) -> Self {
        let dim = points.dim();
        let mut ids: Vec<usize> = (0..points.len()).collect();
        let mut tree = KdTree {
            dim,
            coords: Vec::new(),
            ids: Vec::new(),
            nodes: Vec::new(),
            boxes: Vec::new(),
            slot_of: Vec::new(),
            leaf_of: Vec::new(),
        };
        if !ids.is_empty() {
            let n = ids.len();
            tree.split(points, &mut ids, 0, n);
        }
        tree.coords = ids.iter().flat_map(|&i| points.row(i).iter().copied()).collect();
        tree.slot_of = vec![0; ids.len()];
        for (slot, &id) in ids.iter().enumerate() {
            tree.slot_of[id] = slot;
        }
        tree.leaf_of = vec![0; ids.len()];
        for (id, node) in tree.nodes.iter().enumerate() {
            if node.left == NO_CHILD {
                tree.leaf_of[node.start..node.end].fill(id);
            }
        }
        tree.ids = ids;
        tree
    }

    fn split(&mut self, points: &PointSet, ids: &mut [usize], start: usize, end: usize) -> usize {
        let dim = self.dim;
        let mut lo = vec![f64::INFINITY; dim];
        let mut hi = vec![f64::NEG_INFINITY; dim];
        for &i in &ids[start..end] {
            for (d, &v) in points.row(i).iter().enumerate() {
                lo[d] = lo[d].min(v);
                hi[d] = hi[d].max(v);
            }
        }
        let id = self.nodes.len();
        self.nodes.push(Node { start, end, left: NO_CHILD, right: NO_CHILD });
        self.boxes.extend_from_slice(&lo);
        self.boxes.extend_from_slice(&hi);
        if end - start <= LEAF_SIZE {
            return id;
        }
        let axis = (0..dim)
            .max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b])))
            .unwrap_or(0);
        if hi[axis] - lo[axis] <= 0.0 {
            // all points coincide
            return id;
        }
        let mid = start + (end - start) / 2;
        ids[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            points.row(a)[axis].total_cmp(&points.row(b)[axis])
        });
        let left = self.split(points, ids, start, mid);
        let right = self.split(points, ids, mid, end);
        self.nodes[id].left = left;
        self.nodes[id].right = right;
        id
    }

    #[inline]
    fn point(&self, slot: usize) -> &[f64] {
        &self.coords[slot * self.dim..(slot + 1) * self.dim]
    }

    /// Smallest max-norm distance from `q` to the node box.
    #[inline]
    fn min_dist(&self, node: usize, q: &[f64]) -> f64 {
        let b = &self.boxes[node * 2 * self.dim..(node + 1) * 2 * self.dim];
        let (lo, hi) = b.split_at(self.dim);
        let mut m: f64 = 0.0;
        for ((&q, &lo), &hi) in q.iter().zip(lo).zip(hi) {
            let v = if q < lo {
                lo - q
            } else if q > hi {
                q - hi
            } else {
                0.0
            };
            if v > m {
                m = v;
            }
        }
        m
    }

    fn knn(&self, node: usize, q: &[f64], exclude: usize, best: &mut SmallestK) {
        let n = &self.nodes[node];
        if n.left == NO_CHILD {
            let block = &self.coords[n.start * self.dim..n.end * self.dim];
            for (p, &id) in block.chunks_exact(self.dim).zip(&self.ids[n.start..n.end]) {
                if id != exclude {
                    best.push(chebyshev(q, p), id);
                }
            }
            return;
        }
        let (dl, dr) = (self.min_dist(n.left, q), self.min_dist(n.right, q));
        let (first, second, d2) = if dl <= dr { (n.left, n.right, dr) } else { (n.right, n.left, dl) };
        self.knn(first, q, exclude, best);
        // Ties must be visited: a point at exactly the bound distance can
        // still be the k-th neighbour.
        if d2 <= best.bound() {
            self.knn(second, q, exclude, best);
        }
    }

    fn kth(&self, node: usize, q: &[f64], skip: usize, best: &mut KthDistance) {
        let n = &self.nodes[node];
        if n.left == NO_CHILD {
            if node != skip {
                let block = &self.coords[n.start * self.dim..n.end * self.dim];
                for p in block.chunks_exact(self.dim) {
                    best.push(chebyshev(q, p));
                }
            }
            return;
        }
        let (dl, dr) = (self.min_dist(n.left, q), self.min_dist(n.right, q));
        let (first, second, d1, d2) = if dl <= dr { (n.left, n.right, dl, dr) } else { (n.right, n.left, dr, dl) };
        if d1 < best.bound() {
            self.kth(first, q, skip, best);
        }
        if d2 < best.bound() {
            self.kth(second, q, skip, best);
        }
    }

    /// Distance from row `row` of the indexed set to its k-th nearest other
    /// row. Same value as [`NeighborSearch::kth_distance`] with the row
    /// excluded, found faster by seeding the bound from the row's own leaf.
    pub fn row_kth_distance(&self, row: usize, k: usize) -> f64 {
        let slot = self.slot_of[row];
        let leaf = self.leaf_of[slot];
        let q = self.point(slot);
        let mut best = KthDistance::new(k);
        let n = &self.nodes[leaf];
        for s in (n.start..n.end).filter(|&s| s != slot) {
            best.push(chebyshev(q, self.point(s)));
        }
        self.kth(0, q, leaf, &mut best);
        best.bound()
    }

    /// `(min_dist, max_dist)` in one pass over the box.
    #[inline]
    fn box_dists(&self, node: usize, q: &[f64]) -> (f64, f64) {
        let b = &self.boxes[node * 2 * self.dim..(node + 1) * 2 * self.dim];
        let (lo, hi) = b.split_at(self.dim);
        let (mut near, mut far): (f64, f64) = (0.0, 0.0);
        for ((&q, &lo), &hi) in q.iter().zip(lo).zip(hi) {
            let (a, c) = (q - lo, hi - q);
            let v = if a < 0.0 { -a } else if c < 0.0 { -c } else { 0.0 };
            near = near.max(v);
            far = far.max(a.abs().max(c.abs()));
        }
        (near, far)
    }

    fn count(&self, node: usize, q: &[f64], radius: f64) -> usize {
        let (near, far) = self.box_dists(node, q);
        if near >= radius {
            return 0;
        }
        let n = &self.nodes[node];
        if far < radius {
            return n.end - n.start;
        }
        if n.left == NO_CHILD {
            let block = &self.coords[n.start * self.dim..n.end * self.dim];
            return block.chunks_exact(self.dim).filter(|p| chebyshev(q, p) < radius).count();
        }
        self.count(n.left, q, radius) + self.count(n.right, q, radius)
    }

    fn nearest_nz(&self, node: usize, q: &[f64], exclude: usize, best: &mut Option<(usize, f64)>) {
        let bound = best.map_or(f64::INFINITY, |(_, d)| d);
        if self.min_dist(node, q) > bound {
            return;
        }
        let n = &self.nodes[node];
        if n.left == NO_CHILD {
            for slot in n.start..n.end {
                let id = self.ids[slot];
                if id == exclude {
                    continue;
                }
                let d = chebyshev(q, self.point(slot));
                if d > 0.0 && best.is_none_or(|(bi, bd)| d < bd || (d == bd && id < bi)) {
                    *best = Some((id, d));
                }
            }
            return;
        }
        let (dl, dr) = (self.min_dist(n.left, q), self.min_dist(n.right, q));
        let (first, second) = if dl <= dr { (n.left, n.right) } else { (n.right, n.left) };
        self.nearest_nz(first, q, exclude, best);
        self.nearest_nz(second, q, exclude, best);
    }
}

impl KdTree {
    /// Original row indices in tree order; consecutive rows are spatially
    /// close, which keeps batched queries cache friendly.
    pub fn order(&self) -> &[usize] {
        &self.ids
    }
}

/// Radius counting on one-dimensional data by binary search over the
/// sorted values. Uses the same `|q - v| < r` comparison as [`chebyshev`],
/// so counts match the other searches exactly.
#[derive(Debug, Clone)]
pub struct SortedLine {
    sorted: Vec<f64>,
    values: Vec<f64>,
}

impl SortedLine {
    pub fn build(points: &PointSet) -> Self {
        assert_eq!(points.dim(), 1, "SortedLine needs one-dimensional points");
        let values = points.data().to_vec();
        let mut sorted = values.clone();
        sorted.sort_by(f64::total_cmp);
        SortedLine { sorted, values }
    }

    pub fn count_within(&self, q: f64, radius: f64, exclude: usize) -> usize {
        if radius <= 0.0 {
            return 0;
        }
        let (lower, upper) = window(&self.sorted, q, radius);
        let self_hit = self.values.get(exclude).is_some_and(|&v| (q - v).abs() < radius);
        upper - lower - usize::from(self_hit)
    }
}

/// Half-open range of positions in ascending `sorted` whose values satisfy
/// `|q - v| < radius` under the same arithmetic as [`chebyshev`].
fn window(sorted: &[f64], q: f64, radius: f64) -> (usize, usize) {
    let lower = sorted.partition_point(|&v| v < q && q - v >= radius);
    let upper = sorted.partition_point(|&v| v <= q || v - q < radius);
    (lower, upper)
}

/// Strict max-norm radius counts for every row of a two-dimensional set,
/// `radii[i]` around row `i`, excluding the row itself.
///
/// Each query is a rectangle in value-rank space, so all of them are
/// answered in one sweep with a Fenwick tree in `O(n log n)`. Counts equal
/// those of [`BruteForce::count_within`].
pub fn count_within_2d(points: &PointSet, radii: &[f64]) -> Vec<usize> {
    assert_eq!(points.dim(), 2, "count_within_2d needs two-dimensional points");
    let n = points.len();
    assert_eq!(radii.len(), n, "one radius per row");
    let (a, b) = (points.column(0), points.column(1));
    let sorted_pairs = |col: &[f64]| {
        let mut pairs: Vec<(f64, usize)> = col.iter().copied().zip(0..).collect();
        pairs.sort_unstable_by(|p, q| p.0.total_cmp(&q.0));
        pairs.into_iter().unzip::<f64, usize, Vec<f64>, Vec<usize>>()
    };
    let (sorted_a, by_a) = sorted_pairs(&a);
    let (sorted_b, by_b) = sorted_pairs(&b);
    let mut rank_b = vec![0; n];
    for (r, &i) in by_b.iter().enumerate() {
        rank_b[i] = r;
    }

    // events[p]: queries needing the count over the first p rows in a-order
    let mut b_range = vec![(0, 0); n];
    let mut events: Vec<Vec<(usize, bool)>> = vec![Vec::new(); n + 1];
    for i in 0..n {
        if radii[i] <= 0.0 {
            continue;
        }
        let (lo, hi) = window(&sorted_a, a[i], radii[i]);
        b_range[i] = window(&sorted_b, b[i], radii[i]);
        events[lo].push((i, false));
        events[hi].push((i, true));
    }
    let mut fenwick = vec![0usize; n + 1];
    let prefix = |f: &[usize], mut k: usize| {
        let mut s = 0;
        while k > 0 {
            s += f[k];
            k &= k - 1;
        }
        s
    };
    let mut total = vec![0isize; n];
    for p in 0..=n {
        for &(i, add) in &events[p] {
            let (lo, hi) = b_range[i];
            let c = (prefix(&fenwick, hi) - prefix(&fenwick, lo)) as isize;
            total[i] += if add { c } else { -c };
        }
        if p < n {
            let mut k = rank_b[by_a[p]] + 1;
            while k <= n {
                fenwick[k] += 1;
                k += k & k.wrapping_neg();
            }
        }
    }
    // every row lies within a positive radius of itself
    total.iter().zip(radii).map(|(&t, &r)| if r > 0.0 { t as usize - 1 } else { 0 }).collect()
}

impl NeighborSearch for KdTree {
    fn kth_distance(&self, query: &[f64], k: usize, exclude: usize) -> f64 {
        let mut best = SmallestK::new(k);
        if !self.nodes.is_empty() {
            self.knn(0, query, exclude, &mut best);
        }
        best.bound()
    }

    fn k_nearest(&self, query: &[f64], k: usize, exclude: usize) -> Vec<(f64, usize)> {
        let mut best = SmallestK::new(k);
        if !self.nodes.is_empty() {
            self.knn(0, query, exclude, &mut best);
        }
        best.vals
    }

    fn count_within(&self, query: &[f64], radius: f64, exclude: usize) -> usize {
        if self.nodes.is_empty() || radius <= 0.0 {
            return 0;
        }
        let self_hit = exclude < self.slot_of.len()
            && chebyshev(query, self.point(self.slot_of[exclude])) < radius;
        self.count(0, query, radius) - usize::from(self_hit)
    }

    fn nearest_nonzero(&self, query: &[f64], exclude: usize) -> Option<(usize, f64)> {
        let mut best = None;
        if !self.nodes.is_empty() {
            self.nearest_nz(0, query, exclude, &mut best);
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid_points(n: usize, dim: usize, seed: u64) -> PointSet {
        // coarse values to force ties
        let mut s = seed;
        let data = (0..n * dim)
            .map(|_| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((s >> 33) % 7) as f64 * 0.5
            })
            .collect();
        PointSet::new(data, dim)
    }

    #[test]
    fn hstack_and_columns() {
        let a = PointSet::from_columns(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let b = PointSet::from_columns(&[&[5.0, 6.0]]);
        let c = PointSet::hstack(&[&a, &b]);
        assert_eq!(c.row(1), &[2.0, 4.0, 6.0]);
        assert_eq!(c.column(2), vec![5.0, 6.0]);
    }

    #[test]
    fn tree_matches_brute_force_with_ties() {
        for dim in 1..=4 {
            let p = grid_points(300, dim, dim as u64);
            let brute = BruteForce::new(&p);
            let tree = KdTree::build(&p);
            for i in 0..p.len() {
                let q = p.row(i);
                for k in [1, 3, 8] {
                    assert_eq!(tree.kth_distance(q, k, i), brute.kth_distance(q, k, i));
                }
                assert_eq!(tree.k_nearest(q, 5, i), brute.k_nearest(q, 5, i));
                for r in [0.0, 0.5, 0.75, 1.0, 2.0] {
                    assert_eq!(tree.count_within(q, r, i), brute.count_within(q, r, i));
                }
                assert_eq!(
                    tree.nearest_nonzero(q, i).map(|x| x.1),
                    brute.nearest_nonzero(q, i).map(|x| x.1)
                );
            }
        }
    }

    #[test]
    fn sorted_line_matches_brute_force_with_ties() {
        let p = grid_points(400, 1, 9);
        let brute = BruteForce::new(&p);
        let line = SortedLine::build(&p);
        for i in 0..p.len() {
            for r in [0.0, 0.25, 0.5, 0.75, 1.0, 2.0, 10.0] {
                assert_eq!(line.count_within(p.row(i)[0], r, i), brute.count_within(p.row(i), r, i));
            }
        }
    }

    #[test]
    fn row_kth_distance_matches_brute_force_with_ties() {
        for dim in [1, 2, 3, 5] {
            let p = grid_points(300, dim, 3);
            let (tree, brute) = (KdTree::build(&p), BruteForce::new(&p));
            for k in [1, 4, 10] {
                for i in 0..p.len() {
                    assert_eq!(tree.row_kth_distance(i, k), brute.kth_distance(p.row(i), k, i));
                }
            }
        }
    }

    #[test]
    fn planar_counts_match_brute_force_with_ties() {
        let p = grid_points(400, 2, 4);
        let brute = BruteForce::new(&p);
        for r in [0.0, 0.25, 0.5, 0.75, 1.0, 2.0, 10.0] {
            let radii: Vec<f64> = (0..p.len()).map(|i| r * (1 + i % 3) as f64).collect();
            let counts = count_within_2d(&p, &radii);
            for i in 0..p.len() {
                assert_eq!(counts[i], brute.count_within(p.row(i), radii[i], i));
            }
        }
    }

    proptest! {
        #[test]
        fn planar_counts_agree_on_random_points(
            data in prop::collection::vec(-5.0f64..5.0, 2 * 20..2 * 200),
            radii in prop::collection::vec(0.0f64..3.0, 200),
        ) {
            let n = data.len() / 2;
            let p = PointSet::new(data[..2 * n].to_vec(), 2);
            let brute = BruteForce::new(&p);
            let counts = count_within_2d(&p, &radii[..n]);
            for i in 0..n {
                prop_assert_eq!(counts[i], brute.count_within(p.row(i), radii[i], i));
            }
        }

        #[test]
        fn row_kth_distance_agrees_on_random_points(
            data in prop::collection::vec(-5.0f64..5.0, 3 * 10..3 * 150),
            k in 1usize..6,
        ) {
            let n = data.len() / 3;
            let p = PointSet::new(data[..3 * n].to_vec(), 3);
            let (tree, brute) = (KdTree::build(&p), BruteForce::new(&p));
            for i in 0..n {
                prop_assert_eq!(tree.row_kth_distance(i, k), brute.kth_distance(p.row(i), k, i));
            }
        }

        #[test]
        fn sorted_line_agrees_on_random_points(
            data in prop::collection::vec(-5.0f64..5.0, 20..200),
            r in 0.0f64..3.0,
        ) {
            let p = PointSet::new(data, 1);
            let brute = BruteForce::new(&p);
            let line = SortedLine::build(&p);
            for i in 0..p.len() {
                prop_assert_eq!(line.count_within(p.row(i)[0], r, i), brute.count_within(p.row(i), r, i));
            }
        }

        #[test]
        fn tree_agrees_on_random_points(
            data in prop::collection::vec(-5.0f64..5.0, 3 * 40..3 * 120),
            k in 1usize..6,
            r in 0.01f64..3.0,
        ) {
            let n = data.len() / 3;
            let p = PointSet::new(data[..n * 3].to_vec(), 3);
            let brute = BruteForce::new(&p);
            let tree = KdTree::build(&p);
            for i in 0..n {
                let q = p.row(i);
                prop_assert_eq!(tree.kth_distance(q, k, i), brute.kth_distance(q, k, i));
                prop_assert_eq!(tree.count_within(q, r, i), brute.count_within(q, r, i));
            }
        }
    }
}
