//! Query answering: split into `2^k` anchored pieces, tile each piece by a
//! balanced prefix cover per dimension, and cover each tile with the maxima
//! of the eligible anchors plus singletons.

use std::collections::{BTreeMap, BTreeSet};

use super::{side_of, IdsStructure, Side};
use crate::dominance::dominance_cover;
use crate::dyadic::{DyadicTree, NodeId, PrefixCoverPair};
use crate::error::{Error, Result};
use crate::geom::{BoxD, QueryAnswer, NEG_INF};
use crate::semigroup::Semigroup;

/// One anchored part of a query.
#[derive(Clone, Debug, PartialEq)]
pub struct Piece {
    pub orient: u32,
    /// Per two-sided dimension: the child of the split node on this piece's side.
    pub v: Vec<NodeId>,
    pub bounds: BoxD,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Decomposition {
    /// Some two-sided range contains no internal node midpoint.
    SingletonOnly,
    /// Split nodes per dimension and the `2^k` pieces.
    Pieces { split: Vec<NodeId>, pieces: Vec<Piece> },
}

/// Which stored sums and singletons a query used.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct IdsTrace {
    pub sum_ids: Vec<u32>,
    pub singleton_ids: Vec<u32>,
    pub singleton_only: bool,
}

/// Per-dimension tiling of a piece.
struct DimPlan {
    v: NodeId,
    local: DyadicTree,
    /// Leaf holding the far query endpoint, in `local` coordinates.
    u: NodeId,
    /// Global pairs; the left members (right members when mirrored) tile the piece.
    pairs: Vec<PrefixCoverPair>,
    /// The same tiles in `local` coordinates.
    tiles: Vec<NodeId>,
}

impl<S: Semigroup> IdsStructure<S> {
    /// Validates `q` and clamps its two-sided ranges to `[0, 1]`. Returns
    /// `None` when the query is empty.
    fn normalize(&self, q: &BoxD) -> Result<Option<BoxD>> {
        let (d, k) = (self.cfg.d, self.cfg.k);
        if q.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: q.dim() });
        }
        let mut out = q.clone();
        for i in 0..d {
            if q.lo[i] > q.hi[i] {
                return Err(Error::InvalidInterval { lo: q.lo[i], hi: q.hi[i] });
            }
            if i < k {
                out.lo[i] = q.lo[i].max(0.0);
                out.hi[i] = q.hi[i].min(1.0);
                if out.lo[i] > out.hi[i] {
                    return Ok(None);
                }
            } else if q.lo[i] > 0.0 {
                return Err(Error::InvalidParameter(format!("dimension {i} must be one-sided, got lower bound {}", q.lo[i])));
            } else {
                out.lo[i] = NEG_INF;
            }
        }
        Ok(Some(out))
    }

    /// Highest internal node whose midpoint lies in `[a, b]`.
    fn split_node(&self, a: f64, b: f64) -> Option<NodeId> {
        let mut u = NodeId::ROOT;
        while (u.depth as usize) < self.cfg.h {
            let m = self.tree.m(u);
            if b < m {
                u = u.left_child();
            } else if a > m {
                u = u.right_child();
            } else {
                return Some(u);
            }
        }
        None
    }

    pub fn decompose(&self, q: &BoxD) -> Result<Decomposition> {
        let Some(q) = self.normalize(q)? else {
            return Ok(Decomposition::SingletonOnly);
        };
        let k = self.cfg.k;
        let mut split = Vec::with_capacity(k);
        for i in 0..k {
            match self.split_node(q.lo[i], q.hi[i]) {
                Some(v) => split.push(v),
                None => return Ok(Decomposition::SingletonOnly),
            }
        }
        let pieces = (0..self.cfg.orientations())
            .map(|o| {
                let mut bounds = q.clone();
                let v = (0..k)
                    .map(|i| {
                        let m = self.tree.m(split[i]);
                        match side_of(o, i) {
                            Side::R => {
                                bounds.lo[i] = m;
                                split[i].right_child()
                            }
                            Side::L => {
                                bounds.hi[i] = m;
                                split[i].left_child()
                            }
                        }
                    })
                    .collect();
                Piece { orient: o, v, bounds }
            })
            .collect();
        Ok(Decomposition::Pieces { split, pieces })
    }

    pub fn query(&self, q: &BoxD) -> Result<QueryAnswer<S::Value>> {
        Ok(self.query_traced(q)?.0)
    }

    pub fn query_traced(&self, q: &BoxD) -> Result<(QueryAnswer<S::Value>, IdsTrace)> {
        let Some(nq) = self.normalize(q)? else {
            return Ok((QueryAnswer::empty(), IdsTrace::default()));
        };
        let inside = self.grid.collect_in_box(&self.points, &nq);
        let mut trace = IdsTrace::default();
        let mut singles: Vec<usize> = Vec::new();
        let mut used: BTreeSet<u32> = BTreeSet::new();

        match self.decompose(&nq)? {
            Decomposition::SingletonOnly => {
                trace.singleton_only = true;
                singles = inside;
            }
            Decomposition::Pieces { split, pieces } => {
                let k = self.cfg.k;
                let mut by_piece: Vec<Vec<usize>> = vec![Vec::new(); pieces.len()];
                for &p in &inside {
                    let c = &self.points[p].coords;
                    let o = (0..k).fold(0u32, |o, i| if c[i] >= self.tree.m(split[i]) { o | 1 << i } else { o });
                    by_piece[o as usize].push(p);
                }
                for (piece, pts) in pieces.iter().zip(by_piece) {
                    if !pts.is_empty() {
                        self.answer_piece(&nq, piece, &pts, &mut used, &mut singles)?;
                    }
                }
            }
        }

        for &id in &used {
            let region = &self.sums[id as usize].region;
            assert!(nq.contains_box(region), "stored sum {id} with box {region} escapes query {nq}");
        }
        let mut values: Vec<&S::Value> = used.iter().map(|&id| &self.sums[id as usize].value).collect();
        values.extend(singles.iter().map(|&i| &self.weights[i]));
        let value = if values.is_empty() { None } else { Some(self.sg.combine_all(values)?) };
        trace.sum_ids = used.into_iter().collect();
        trace.singleton_ids = singles.iter().map(|&i| self.points[i].id).collect();
        trace.singleton_ids.sort_unstable();
        let ans = QueryAnswer { value, sums_used: trace.sum_ids.len(), singletons_used: singles.len() };
        Ok((ans, trace))
    }

    fn plan(&self, q: &BoxD, piece: &Piece, i: usize) -> Result<DimPlan> {
        let v = piece.v[i];
        let local = DyadicTree::new(self.tree.a(v), self.tree.b(v), self.cfg.h as u32 - v.depth)?;
        let (u, local_pairs) = match side_of(piece.orient, i) {
            Side::R => {
                let u = local.locate_leaf(q.hi[i])?;
                (u, local.balanced_prefix_cover(u))
            }
            Side::L => {
                let u = local.locate_leaf(q.lo[i])?;
                let mirrored = local
                    .balanced_prefix_cover(u.mirror())
                    .into_iter()
                    .map(|p| PrefixCoverPair { u: p.u.mirror(), w: p.w.mirror() })
                    .collect();
                (u, mirrored)
            }
        };
        let tiles = local_pairs.iter().map(|p| p.u).collect();
        let pairs = local_pairs.iter().map(|p| PrefixCoverPair { u: p.u.lift(v), w: p.w.lift(v) }).collect();
        Ok(DimPlan { v, local, u, pairs, tiles })
    }

    fn answer_piece(
        &self,
        q: &BoxD,
        piece: &Piece,
        pts: &[usize],
        used: &mut BTreeSet<u32>,
        singles: &mut Vec<usize>,
    ) -> Result<()> {
        let k = self.cfg.k;
        let plans = (0..k).map(|i| self.plan(q, piece, i)).collect::<Result<Vec<_>>>()?;

        // bucket every point by its tile in each dimension; edge points become singletons
        let mut buckets: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        'points: for &p in pts {
            let c = &self.points[p].coords;
            let mut key = Vec::with_capacity(k);
            for (i, plan) in plans.iter().enumerate() {
                let leaf = plan.local.locate_leaf(c[i])?;
                let edge = match side_of(piece.orient, i) {
                    Side::R => leaf.rank >= plan.u.rank,
                    Side::L => leaf.rank <= plan.u.rank,
                };
                if edge {
                    singles.push(p);
                    continue 'points;
                }
                let j = plan.tiles.iter().position(|t| t.is_ancestor_of(leaf)).expect("tiles cover the piece");
                key.push(j);
            }
            buckets.entry(key).or_default().push(p);
        }

        for (key, bucket) in buckets {
            let cands = self.candidates(q, piece, &plans, &key);
            let cand_proj: Vec<&[f64]> = cands.iter().map(|&(_, x)| &x[k..]).collect();
            let targets: Vec<&[f64]> = bucket.iter().map(|&p| &self.points[p].coords[k..]).collect();
            let (chosen, residual) = dominance_cover(&cand_proj, &targets);
            for c in chosen {
                used.insert(cands[c].0);
            }
            singles.extend(residual.into_iter().map(|t| bucket[t]));
        }
        Ok(())
    }

    /// Stored sums whose anchors are eligible for the tile tuple `key`, with
    /// the anchor coordinates.
    fn candidates<'a>(&'a self, q: &BoxD, piece: &Piece, plans: &[DimPlan], key: &[usize]) -> Vec<(u32, &'a [f64])> {
        let (d, k) = (self.cfg.d, self.cfg.k);
        let o = piece.orient;
        // allowed family depths per dimension: the depth-z ancestor of w must
        // have a neighbour on the anchored side inside the subtree of v
        let mut depths: Vec<Vec<usize>> = Vec::with_capacity(k);
        let mut ws = Vec::with_capacity(k);
        for (i, plan) in plans.iter().enumerate() {
            let w = plan.pairs[key[i]].w;
            ws.push(w);
            let zs: Vec<usize> = (plan.v.depth + 1..=w.depth)
                .filter(|&z| {
                    let c = w.ancestor(z).relative_to(plan.v);
                    match side_of(o, i) {
                        Side::R => c.rank > 0,
                        Side::L => c.rank + 1 < 1u64 << c.depth,
                    }
                })
                .map(|z| z as usize)
                .collect();
            if zs.is_empty() {
                return Vec::new();
            }
            depths.push(zs);
        }

        let mut out = Vec::new();
        let mut index = vec![0usize; k];
        let mut odo = vec![0usize; k];
        loop {
            for i in 0..k {
                index[i] = depths[i][odo[i]];
            }
            let flat = self.flat_index(&index);
            let set = &self.anchors[flat];
            let (a0, b0) = (self.tree.a(ws[0]), self.tree.b(ws[0]));
            let start = set.partition_point(|x| x.coords[0] < a0);
            for (pos, x) in set.iter().enumerate().skip(start) {
                let c = &x.coords;
                if c[0] > b0 {
                    break;
                }
                let ok = (0..k).all(|i| {
                    let in_w = self.tree.node_containing(c[i], ws[i].depth).map(|n| n == ws[i]).unwrap_or(false);
                    let in_q = match side_of(o, i) {
                        Side::R => c[i] <= q.hi[i],
                        Side::L => c[i] >= q.lo[i],
                    };
                    in_w && in_q
                }) && (k..d).all(|j| c[j] <= q.hi[j]);
                if ok {
                    if let Some(id) = self.sum_of[flat][pos * self.cfg.orientations() as usize + o as usize] {
                        out.push((id, c.as_slice()));
                    }
                }
            }
            // advance the odometer over the depth tuples
            let mut i = 0;
            loop {
                if i == k {
                    return out;
                }
                odo[i] += 1;
                if odo[i] < depths[i].len() {
                    break;
                }
                odo[i] = 0;
                i += 1;
            }
        }
    }
}
