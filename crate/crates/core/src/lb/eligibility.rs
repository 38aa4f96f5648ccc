use super::{HardQuery, RepDiagram, Subproblem};
use crate::dyadic::{DyadicTree, NodeId};
use crate::error::{Error, Result};
use crate::geom::BoxD;

/// Node of `tree` storing a sum whose extent in one dimension is `[lo, hi]`:
/// the highest node whose cut strictly separates the extent, or the leaf
/// reached when no cut does.
fn place_1d(lo: f64, hi: f64, tree: &DyadicTree) -> NodeId {
    let mut u = NodeId::ROOT;
    while !tree.is_leaf(u) {
        let m = tree.m(u);
        if hi <= m {
            u = u.left_child();
        } else if lo >= m {
            u = u.right_child();
        } else {
            break;
        }
    }
    u
}

/// Placement of a sum in the first `dims` trees, from the sum's extent.
pub fn place_sum(extent: &BoxD, tree: &DyadicTree, dims: usize) -> Vec<NodeId> {
    (0..dims).map(|i| place_1d(extent.lo[i], extent.hi[i], tree)).collect()
}

/// Same placement as [`place_sum`], computed as the deepest node whose closed
/// interval contains the extent (the leftmost one on ties).
pub fn place_sum_deepest(extent: &BoxD, tree: &DyadicTree, dims: usize) -> Vec<NodeId> {
    (0..dims)
        .map(|i| {
            let (lo, hi) = ((extent.lo[i] - tree.z1) / (tree.z2 - tree.z1), (extent.hi[i] - tree.z1) / (tree.z2 - tree.z1));
            (0..=tree.height)
                .rev()
                .find_map(|dep| {
                    let scale = (1u64 << dep) as f64;
                    let first = ((hi * scale).ceil() as i64 - 1).max(0);
                    let last = (lo * scale).floor() as i64;
                    (first <= last).then(|| NodeId::new(dep, first as u64))
                })
                .unwrap_or(NodeId::ROOT)
        })
        .collect()
}

/// How much of the hard query is known when judging eligibility.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Knowledge {
    /// The whole query: a sum must sit on the path from `v_i` to `u_i` or in
    /// the subtree of `u_i` in every dimension.
    Full,
    /// Only the first `known` dimensions: in each of them the sum must sit on
    /// the path from `v_i` to `u_i`, stay inside the query range, and reach
    /// into `r(u_i)`. Unknown dimensions impose nothing.
    Partial { known: usize },
}

pub fn is_eligible(
    placement: &[NodeId],
    extent: &BoxD,
    hq: &HardQuery,
    u: &[NodeId],
    tree: &DyadicTree,
    knowledge: Knowledge,
) -> bool {
    match knowledge {
        Knowledge::Full => (0..u.len()).all(|i| {
            let (v, w) = (hq.dims[i].v, placement[i]);
            (v.is_ancestor_of(w) && w.is_ancestor_of(u[i])) || u[i].is_ancestor_of(w)
        }),
        Knowledge::Partial { known } => (0..known.min(u.len())).all(|i| {
            let (t, w) = (&hq.dims[i], placement[i]);
            let on_path = t.v.is_ancestor_of(w) && w.is_ancestor_of(u[i]);
            let inside = extent.lo[i] >= t.x_prime && extent.hi[i] <= t.x;
            let reaches = extent.hi[i] >= tree.a(u[i]) && extent.lo[i] <= tree.b(u[i]);
            on_path && inside && reaches
        }),
    }
}

/// Indices of the eligible sums among `extents`; their number is the potential.
pub fn eligible_sums(
    extents: &[BoxD],
    hq: &HardQuery,
    sub: &Subproblem,
    tree: &DyadicTree,
    knowledge: Knowledge,
) -> Vec<usize> {
    let Subproblem::Defined { u, .. } = sub else {
        return Vec::new();
    };
    extents
        .iter()
        .enumerate()
        .filter(|(_, e)| is_eligible(&place_sum(e, tree, u.len()), e, hq, u, tree, knowledge))
        .map(|(i, _)| i)
        .collect()
}

/// Widens an eligible sum's extent in the two-sided dimensions to cover `r(u_i)`.
pub fn extension(extent: &BoxD, hq: &HardQuery, sub: &Subproblem, tree: &DyadicTree) -> Result<BoxD> {
    let Subproblem::Defined { u, .. } = sub else {
        return Err(Error::Ineligible);
    };
    let placement = place_sum(extent, tree, u.len());
    if !is_eligible(&placement, extent, hq, u, tree, Knowledge::Full) {
        return Err(Error::Ineligible);
    }
    let mut e = extent.clone();
    for (i, &ui) in u.iter().enumerate() {
        e.lo[i] = e.lo[i].min(tree.a(ui));
        e.hi[i] = e.hi[i].max(tree.b(ui));
    }
    Ok(e)
}

impl RepDiagram {
    /// Rectangle from the bottom-left of `gamma(u)` to the right side of
    /// `gamma(u')`, `u'` the right sibling of `u`, and up to the top of `gamma(v)`.
    pub fn type_one_region(&self, v: NodeId, u: NodeId) -> Option<BoxD> {
        let gu = self.region(u)?;
        let gv = self.region(v)?;
        let sib = u.right_neighbor()?;
        Some(BoxD { lo: gu.lo.clone(), hi: vec![self.tree.b(sib), gv.hi[1]] })
    }

    /// Dot of a sum in this diagram: its right end at the mid-height of the
    /// band of the node storing it.
    pub fn sum_dot(&self, extent_hi: f64, w: NodeId) -> Option<[f64; 2]> {
        let g = self.region(w)?;
        Some([extent_hi, 0.5 * (g.lo[1] + g.hi[1])])
    }
}
