//! Implicit balanced binary trees over an interval, and balanced prefix covers.

use crate::error::{Error, Result};

pub const MAX_HEIGHT: u32 = 30;

/// Node address: `rank` counts from the left among the `2^depth` nodes at `depth`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId {
    pub depth: u32,
    pub rank: u64,
}

impl NodeId {
    pub const ROOT: NodeId = NodeId { depth: 0, rank: 0 };

    pub fn new(depth: u32, rank: u64) -> Self {
        NodeId { depth, rank }
    }

    pub fn left_child(self) -> NodeId {
        NodeId { depth: self.depth + 1, rank: 2 * self.rank }
    }

    pub fn right_child(self) -> NodeId {
        NodeId { depth: self.depth + 1, rank: 2 * self.rank + 1 }
    }

    pub fn parent(self) -> Option<NodeId> {
        (self.depth > 0).then(|| NodeId { depth: self.depth - 1, rank: self.rank / 2 })
    }

    pub fn is_right_child(self) -> bool {
        self.depth > 0 && self.rank % 2 == 1
    }

    /// Ancestor at `depth` (itself when `depth == self.depth`).
    pub fn ancestor(self, depth: u32) -> NodeId {
        debug_assert!(depth <= self.depth);
        NodeId { depth, rank: self.rank >> (self.depth - depth) }
    }

    /// True when `other` lies in the subtree rooted at `self` (inclusive).
    pub fn is_ancestor_of(self, other: NodeId) -> bool {
        other.depth >= self.depth && other.ancestor(self.depth) == self
    }

    pub fn left_neighbor(self) -> Option<NodeId> {
        (self.rank > 0).then(|| NodeId { depth: self.depth, rank: self.rank - 1 })
    }

    pub fn right_neighbor(self) -> Option<NodeId> {
        (self.rank + 1 < 1u64 << self.depth).then(|| NodeId { depth: self.depth, rank: self.rank + 1 })
    }

    /// Reflection across the vertical axis of the tree.
    pub fn mirror(self) -> NodeId {
        NodeId { depth: self.depth, rank: (1u64 << self.depth) - 1 - self.rank }
    }

    /// Maps a node of the subtree rooted at `root`, given in that subtree's
    /// own coordinates, to the enclosing tree.
    pub fn lift(self, root: NodeId) -> NodeId {
        NodeId { depth: root.depth + self.depth, rank: (root.rank << self.depth) + self.rank }
    }

    /// Inverse of [`NodeId::lift`].
    pub fn relative_to(self, root: NodeId) -> NodeId {
        debug_assert!(root.is_ancestor_of(self));
        let dl = self.depth - root.depth;
        NodeId { depth: dl, rank: self.rank - (root.rank << dl) }
    }
}

/// Two neighbouring nodes at one depth, `u` immediately left of `w`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrefixCoverPair {
    pub u: NodeId,
    pub w: NodeId,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DyadicTree {
    pub z1: f64,
    pub z2: f64,
    pub height: u32,
}

impl DyadicTree {
    pub fn new(z1: f64, z2: f64, height: u32) -> Result<Self> {
        if z1 >= z2 || !z1.is_finite() || !z2.is_finite() {
            return Err(Error::InvalidInterval { lo: z1, hi: z2 });
        }
        if height > MAX_HEIGHT {
            return Err(Error::InvalidParameter(format!("height {height} exceeds {MAX_HEIGHT}")));
        }
        Ok(DyadicTree { z1, z2, height })
    }

    pub fn node_count(&self) -> u64 {
        (1u64 << (self.height + 1)) - 1
    }

    pub fn leaf_count(&self) -> u64 {
        1u64 << self.height
    }

    pub fn is_leaf(&self, u: NodeId) -> bool {
        u.depth == self.height
    }

    pub fn leaf(&self, rank: u64) -> NodeId {
        NodeId::new(self.height, rank)
    }

    fn at(&self, depth: u32, rank: u64) -> f64 {
        self.z1 + (self.z2 - self.z1) * (rank as f64 / (1u64 << depth) as f64)
    }

    pub fn a(&self, u: NodeId) -> f64 {
        self.at(u.depth, u.rank)
    }

    pub fn b(&self, u: NodeId) -> f64 {
        self.at(u.depth, u.rank + 1)
    }

    pub fn m(&self, u: NodeId) -> f64 {
        self.at(u.depth + 1, 2 * u.rank + 1)
    }

    /// Node at `depth` whose half-open interval holds `x`; the last node is closed.
    pub fn node_containing(&self, x: f64, depth: u32) -> Result<NodeId> {
        if !(self.z1..=self.z2).contains(&x) {
            return Err(Error::OutOfRange(format!("{x} outside [{}, {}]", self.z1, self.z2)));
        }
        let count = 1u64 << depth;
        let guess = ((x - self.z1) / (self.z2 - self.z1) * count as f64).floor();
        let mut r = (guess.max(0.0) as u64).min(count - 1);
        while r > 0 && x < self.at(depth, r) {
            r -= 1;
        }
        while r + 1 < count && x >= self.at(depth, r + 1) {
            r += 1;
        }
        Ok(NodeId::new(depth, r))
    }

    pub fn locate_leaf(&self, x: f64) -> Result<NodeId> {
        self.node_containing(x, self.height)
    }

    /// Pairs of neighbours whose left members tile `[z1, a(v)]` with at most
    /// two pairs per depth. The right member of every pair lies in `[z1, b(v)]`.
    pub fn balanced_prefix_cover(&self, v: NodeId) -> Vec<PrefixCoverPair> {
        debug_assert!(self.is_leaf(v));
        // nodes hanging off the left of the root-to-v path, shallowest first
        let mut active: std::collections::VecDeque<NodeId> = (1..=v.depth)
            .map(|dep| v.ancestor(dep))
            .filter(|x| x.is_right_child())
            .map(|x| x.left_neighbor().unwrap())
            .collect();
        active.push_back(v);
        let end = v.rank + 1; // b(v) as a leaf rank
        let mut out = Vec::new();
        while active.len() >= 2 {
            let x1 = active[0];
            let x2 = active[1];
            if x1.depth == x2.depth {
                out.push(PrefixCoverPair { u: x1, w: x2 });
                active.pop_front();
                continue;
            }
            let rn_end = (x1.rank + 2) << (self.height - x1.depth);
            if rn_end <= end {
                out.push(PrefixCoverPair { u: x1, w: x1.right_neighbor().unwrap() });
                active.pop_front();
            } else {
                active.pop_front();
                active.push_front(x1.right_child());
                active.push_front(x1.left_child());
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn leaves(t: &DyadicTree) -> Vec<(f64, f64)> {
        (0..t.leaf_count()).map(|r| (t.a(t.leaf(r)), t.b(t.leaf(r)))).collect()
    }

    fn iv(t: &DyadicTree, u: NodeId) -> (f64, f64) {
        (t.a(u), t.b(u))
    }

    #[test]
    fn construction_examples() {
        let t = DyadicTree::new(0.0, 1.0, 1).unwrap();
        assert_eq!(t.node_count(), 3);
        assert_eq!(leaves(&t), vec![(0.0, 0.5), (0.5, 1.0)]);
        let t = DyadicTree::new(0.0, 1.0, 3).unwrap();
        assert!(leaves(&t).iter().all(|(a, b)| b - a == 0.125));
        let t = DyadicTree::new(0.5, 1.0, 2).unwrap();
        assert!(leaves(&t).iter().all(|(a, b)| b - a == 0.125));
        assert_eq!(t.a(NodeId::ROOT), 0.5);
        assert!(DyadicTree::new(0.5, 0.5, 2).is_err());
        assert!(DyadicTree::new(0.0, 1.0, 31).is_err());
    }

    #[test]
    fn children_halve_parent() {
        let t = DyadicTree::new(0.25, 0.75, 6).unwrap();
        for dep in 0..6 {
            for r in 0..1u64 << dep {
                let u = NodeId::new(dep, r);
                assert_eq!(t.a(u.left_child()), t.a(u));
                assert_eq!(t.b(u.left_child()), t.m(u));
                assert_eq!(t.a(u.right_child()), t.m(u));
                assert_eq!(t.b(u.right_child()), t.b(u));
            }
        }
    }

    #[test]
    fn locate_examples() {
        let t = DyadicTree::new(0.0, 1.0, 3).unwrap();
        assert_eq!(t.locate_leaf(0.0).unwrap(), t.leaf(0));
        assert_eq!(t.locate_leaf(1.0).unwrap(), t.leaf(7));
        assert_eq!(t.locate_leaf(0.6).unwrap(), t.leaf(4));
        assert_eq!(t.locate_leaf(0.5).unwrap(), t.leaf(4));
        assert_eq!(iv(&t, t.leaf(4)), (0.5, 0.625));
        assert!(t.locate_leaf(1.5).is_err());
    }

    #[test]
    fn locate_is_half_open() {
        let t = DyadicTree::new(0.0, 1.0, 10).unwrap();
        for r in 0..t.leaf_count() {
            let u = t.leaf(r);
            assert_eq!(t.locate_leaf(t.a(u)).unwrap(), u);
        }
    }

    #[test]
    fn cover_leftmost_is_empty() {
        let t = DyadicTree::new(0.0, 1.0, 3).unwrap();
        assert!(t.balanced_prefix_cover(t.leaf(0)).is_empty());
    }

    #[test]
    fn cover_examples() {
        let t = DyadicTree::new(0.0, 1.0, 3).unwrap();
        let got: Vec<_> = t.balanced_prefix_cover(t.leaf(1)).iter().map(|p| (iv(&t, p.u), iv(&t, p.w))).collect();
        assert_eq!(got, vec![((0.0, 0.125), (0.125, 0.25))]);
        let got: Vec<_> = t.balanced_prefix_cover(t.leaf(5)).iter().map(|p| (iv(&t, p.u), iv(&t, p.w))).collect();
        assert_eq!(
            got,
            vec![((0.0, 0.25), (0.25, 0.5)), ((0.25, 0.5), (0.5, 0.75)), ((0.5, 0.625), (0.625, 0.75))]
        );
    }

    #[test]
    fn lift_round_trip() {
        let root = NodeId::new(3, 5);
        let local = NodeId::new(2, 3);
        let g = local.lift(root);
        assert_eq!(g, NodeId::new(5, 23));
        assert_eq!(g.relative_to(root), local);
        assert!(root.is_ancestor_of(g));
        assert!(!NodeId::new(3, 4).is_ancestor_of(g));
        assert_eq!(NodeId::new(3, 1).mirror(), NodeId::new(3, 6));
    }
}
