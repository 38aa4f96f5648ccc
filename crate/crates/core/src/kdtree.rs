//! Static kd-tree with per-node aggregates: point count, bounding box and a
//! combined value. Used at build time to fill boxes without visiting every
//! point they hold.

use crate::geom::Point;

const LEAF: usize = 8;

struct Node {
    start: usize,
    end: usize,
    children: Option<(usize, usize)>,
}

pub(crate) struct KdTree<V> {
    d: usize,
    /// Coordinates in tree order.
    coords: Vec<f64>,
    /// Per-point values in tree order.
    vals: Vec<V>,
    nodes: Vec<Node>,
    bb_lo: Vec<f64>,
    bb_hi: Vec<f64>,
    node_vals: Vec<V>,
}

/// Points found by a query: count, bounding box and combined value.
pub(crate) struct Hit<V> {
    pub count: usize,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub value: Option<V>,
}

impl<V: Clone> KdTree<V> {
    pub fn new(points: &[Point], d: usize, values: &[V], combine: &impl Fn(&V, &V) -> V) -> Self {
        let mut order: Vec<usize> = (0..points.len()).collect();
        let mut t = KdTree {
            d,
            coords: Vec::new(),
            vals: Vec::new(),
            nodes: Vec::new(),
            bb_lo: Vec::new(),
            bb_hi: Vec::new(),
            node_vals: Vec::new(),
        };
        if !points.is_empty() {
            t.split(points, &mut order, 0, points.len(), 0);
            t.coords = order.iter().flat_map(|&i| points[i].coords.iter().copied()).collect();
            t.vals = order.iter().map(|&i| values[i].clone()).collect();
            t.node_vals = t
                .nodes
                .iter()
                .map(|n| {
                    let first = t.vals[n.start].clone();
                    t.vals[n.start + 1..n.end].iter().fold(first, |a, v| combine(&a, v))
                })
                .collect();
        }
        t
    }

    fn split(&mut self, pts: &[Point], order: &mut [usize], start: usize, end: usize, depth: usize) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node { start, end, children: None });
        for k in 0..self.d {
            let (lo, hi) = order[start..end].iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &i| {
                (l.min(pts[i].coords[k]), h.max(pts[i].coords[k]))
            });
            self.bb_lo.push(lo);
            self.bb_hi.push(hi);
        }
        if end - start > LEAF {
            let axis = depth % self.d;
            let mid = (start + end) / 2;
            order[start..end]
                .select_nth_unstable_by(mid - start, |&a, &b| pts[a].coords[axis].total_cmp(&pts[b].coords[axis]));
            let l = self.split(pts, order, start, mid, depth + 1);
            let r = self.split(pts, order, mid, end, depth + 1);
            self.nodes[id].children = Some((l, r));
        }
        id
    }

    /// Aggregates over the closed box `[lo, hi]`.
    pub fn query(&self, lo: &[f64], hi: &[f64], combine: &impl Fn(&V, &V) -> V) -> Hit<V> {
        let mut hit = Hit { count: 0, lo: vec![f64::INFINITY; self.d], hi: vec![f64::NEG_INFINITY; self.d], value: None };
        if !self.nodes.is_empty() {
            self.visit(0, lo, hi, combine, &mut hit);
        }
        hit
    }

    fn absorb(hit: &mut Hit<V>, count: usize, lo: &[f64], hi: &[f64], v: &V, combine: &impl Fn(&V, &V) -> V) {
        hit.count += count;
        for k in 0..lo.len() {
            hit.lo[k] = hit.lo[k].min(lo[k]);
            hit.hi[k] = hit.hi[k].max(hi[k]);
        }
        hit.value = Some(match hit.value.take() {
            None => v.clone(),
            Some(a) => combine(&a, v),
        });
    }

    fn visit(&self, id: usize, lo: &[f64], hi: &[f64], combine: &impl Fn(&V, &V) -> V, hit: &mut Hit<V>) {
        let d = self.d;
        let (nlo, nhi) = (&self.bb_lo[id * d..id * d + d], &self.bb_hi[id * d..id * d + d]);
        if (0..d).any(|k| nhi[k] < lo[k] || nlo[k] > hi[k]) {
            return;
        }
        let node = &self.nodes[id];
        if (0..d).all(|k| lo[k] <= nlo[k] && nhi[k] <= hi[k]) {
            Self::absorb(hit, node.end - node.start, nlo, nhi, &self.node_vals[id], combine);
            return;
        }
        match node.children {
            Some((l, r)) => {
                self.visit(l, lo, hi, combine, hit);
                self.visit(r, lo, hi, combine, hit);
            }
            None => {
                for i in node.start..node.end {
                    let c = &self.coords[i * d..i * d + d];
                    if (0..d).all(|k| lo[k] <= c[k] && c[k] <= hi[k]) {
                        Self::absorb(hit, 1, c, c, &self.vals[i], combine);
                    }
                }
            }
        }
    }
}
