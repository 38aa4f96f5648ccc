//! Linear-space structure for `(d+k)`-sided queries: two-sided in the first
//! `k` dimensions, one-sided (bounded above) in the rest.
//!
//! A collectively well-distributed family `D_I`, `I in [h]^k`, supplies the
//! anchor points. Each anchor `X` in `D_I` yields one box per orientation, and
//! every box holding at least two input points becomes a stored sum.

mod query;

use crate::cwd::{build_cwd_family, CwdFamily};
use crate::dyadic::DyadicTree;
use crate::error::{Error, Result};
use crate::geom::{BoxD, Point, PointSet, NEG_INF};
use crate::grid::GridIndex;
use crate::kdtree::KdTree;
use crate::semigroup::Semigroup;

pub use self::query::{Decomposition, IdsTrace, Piece};

/// Per-dimension side of a query piece. Orientations over the first `k`
/// dimensions are bitmasks: bit `i` set means dimension `i` is right-anchored.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    /// Box extends left from the anchor to a node boundary: `[a(lnb), x]`.
    R,
    /// Mirror image: `[x, b(rnb)]`.
    L,
}

pub fn side_of(orient: u32, dim: usize) -> Side {
    if orient >> dim & 1 == 1 {
        Side::R
    } else {
        Side::L
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IdsConfig {
    pub d: usize,
    pub k: usize,
    /// Tree height, `ceil(log2 n)`.
    pub h: usize,
    /// Target size of each family set, `max(1, floor(n / h^k))`.
    pub big_n: usize,
}

impl IdsConfig {
    pub fn new(n: usize, d: usize, k: usize) -> Result<Self> {
        if k == 0 || k >= d {
            return Err(Error::InvalidParameter(format!("need 1 <= k < d, got k={k}, d={d}")));
        }
        if n < 4 {
            return Err(Error::InvalidParameter(format!("need at least 4 points, got {n}")));
        }
        let h = (usize::BITS - (n - 1).leading_zeros()) as usize;
        let hk = h.checked_pow(k as u32).ok_or_else(|| Error::TooLarge(format!("h^k for h={h}, k={k}")))?;
        Ok(IdsConfig { d, k, h, big_n: (n / hk).max(1) })
    }

    pub fn orientations(&self) -> u32 {
        1 << self.k
    }
}

/// The box `B(X)` for anchor `x`, family index `index` (1-based depths) and
/// orientation; `None` when the depth-`i_j` node holding `x` has no neighbour
/// on the anchored side.
pub fn box_of(x: &[f64], index: &[usize], orient: u32, tree: &DyadicTree) -> Option<BoxD> {
    let k = index.len();
    let mut lo = vec![NEG_INF; x.len()];
    let mut hi = x.to_vec();
    for j in 0..k {
        let c = tree.node_containing(x[j], index[j] as u32).ok()?;
        match side_of(orient, j) {
            Side::R => lo[j] = tree.a(c.left_neighbor()?),
            Side::L => {
                lo[j] = x[j];
                hi[j] = tree.b(c.right_neighbor()?);
            }
        }
    }
    Some(BoxD { lo, hi })
}

#[derive(Clone, Debug, PartialEq)]
pub struct StoredSum<V> {
    pub id: u32,
    /// Family index `I` (1-based).
    pub index: Vec<usize>,
    pub orient: u32,
    /// Id of the anchor point in the family.
    pub anchor: u32,
    /// The box `B(X)`.
    pub region: BoxD,
    /// Bounding box of the input points inside `region`.
    pub tight: BoxD,
    pub value: V,
    pub count: usize,
}

#[derive(Clone, Debug)]
pub struct IdsStructure<S: Semigroup> {
    sg: S,
    cfg: IdsConfig,
    points: Vec<Point>,
    weights: Vec<S::Value>,
    grid: GridIndex,
    tree: DyadicTree,
    family: CwdFamily,
    /// Per flat family index: anchors sorted by first coordinate.
    anchors: Vec<Vec<Point>>,
    /// Per flat family index: sum id for `anchor * 2^k + orient`.
    sum_of: Vec<Vec<Option<u32>>>,
    sums: Vec<StoredSum<S::Value>>,
}

/// Builds the structure with canonical id-derived weights.
pub fn build_ids<S: Semigroup>(p: &PointSet, k: usize, sg: S) -> Result<IdsStructure<S>> {
    let weights = p.iter().map(|q| sg.weight(q.id)).collect();
    IdsStructure::build(p, weights, k, sg)
}

impl<S: Semigroup> IdsStructure<S> {
    pub fn build(p: &PointSet, weights: Vec<S::Value>, k: usize, sg: S) -> Result<Self> {
        let cfg = IdsConfig::new(p.len(), p.dim(), k)?;
        if weights.len() != p.len() {
            return Err(Error::DimensionMismatch { expected: p.len(), found: weights.len() });
        }
        let family = build_cwd_family(cfg.big_n, cfg.h, k, cfg.d)?;
        Self::with_family(p, weights, cfg, family, sg)
    }

    /// Builds on a caller-supplied family, which must match `cfg`.
    pub fn with_family(p: &PointSet, weights: Vec<S::Value>, cfg: IdsConfig, family: CwdFamily, sg: S) -> Result<Self> {
        if family.h != cfg.h || family.k != cfg.k || family.d != cfg.d {
            return Err(Error::InvalidParameter("family does not match the configuration".into()));
        }
        let tree = DyadicTree::new(0.0, 1.0, cfg.h as u32)?;
        let points = p.points().to_vec();
        let grid = GridIndex::build(&points, cfg.d);
        let combine = |a: &S::Value, b: &S::Value| sg.combine(a, b);
        let kd = KdTree::new(&points, cfg.d, &weights, &combine);
        let orients = cfg.orientations();
        let mut anchors = Vec::with_capacity(family.sets().len());
        let mut sum_of = Vec::with_capacity(family.sets().len());
        let mut sums = Vec::new();
        for index in family.indices() {
            let mut set = family.get(&index)?.points().to_vec();
            set.sort_by(|a, b| a.coords[0].total_cmp(&b.coords[0]));
            let mut ids = Vec::with_capacity(set.len() * orients as usize);
            for x in &set {
                for o in 0..orients {
                    let id = box_of(&x.coords, &index, o, &tree).and_then(|region| {
                        let hit = kd.query(&region.lo, &region.hi, &combine);
                        if hit.count < 2 {
                            return None;
                        }
                        let id = sums.len() as u32;
                        sums.push(StoredSum {
                            id,
                            index: index.clone(),
                            orient: o,
                            anchor: x.id,
                            region,
                            tight: BoxD { lo: hit.lo, hi: hit.hi },
                            value: hit.value.unwrap(),
                            count: hit.count,
                        });
                        Some(id)
                    });
                    ids.push(id);
                }
            }
            anchors.push(set);
            sum_of.push(ids);
        }
        Ok(IdsStructure { sg, cfg, points, weights, grid, tree, family, anchors, sum_of, sums })
    }

    pub fn config(&self) -> IdsConfig {
        self.cfg
    }

    pub fn semigroup(&self) -> &S {
        &self.sg
    }

    pub fn tree(&self) -> &DyadicTree {
        &self.tree
    }

    pub fn family(&self) -> &CwdFamily {
        &self.family
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn weights(&self) -> &[S::Value] {
        &self.weights
    }

    pub fn sums(&self) -> &[StoredSum<S::Value>] {
        &self.sums
    }

    pub fn sum(&self, id: u32) -> &StoredSum<S::Value> {
        &self.sums[id as usize]
    }

    /// Number of stored non-singleton sums.
    pub fn s_plus(&self) -> usize {
        self.sums.len()
    }

    /// Ids of the input points inside `b`.
    pub fn ids_in_box(&self, b: &BoxD) -> Vec<u32> {
        let mut out: Vec<u32> = self.grid.collect_in_box(&self.points, b).into_iter().map(|i| self.points[i].id).collect();
        out.sort_unstable();
        out
    }

    fn flat_index(&self, index: &[usize]) -> usize {
        index.iter().fold(0, |acc, &i| acc * self.cfg.h + i - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointgen::{hammersley_wd, uniform_random};
    use crate::semigroup::{IdSet, Ids, MaxReal};

    #[test]
    fn box_of_examples() {
        let tree = DyadicTree::new(0.0, 1.0, 4).unwrap();
        let b = box_of(&[0.6, 0.3], &[2], 1, &tree).unwrap();
        assert_eq!(b.lo, vec![0.25, NEG_INF]);
        assert_eq!(b.hi, vec![0.6, 0.3]);
        assert!(box_of(&[0.3, 0.3], &[1], 1, &tree).is_none());
        let b = box_of(&[0.3, 0.3], &[1], 0, &tree).unwrap();
        assert_eq!((b.lo[0], b.hi[0]), (0.3, 1.0));
        assert!(box_of(&[0.6, 0.3], &[1], 0, &tree).is_none());
    }

    #[test]
    fn config_values() {
        let c = IdsConfig::new(16, 2, 1).unwrap();
        assert_eq!((c.h, c.big_n), (4, 4));
        let c = IdsConfig::new(17, 2, 1).unwrap();
        assert_eq!(c.h, 5);
        let c = IdsConfig::new(4096, 3, 2).unwrap();
        assert_eq!((c.h, c.big_n), (12, 28));
        assert!(IdsConfig::new(16, 2, 2).is_err());
        assert!(IdsConfig::new(3, 2, 1).is_err());
    }

    #[test]
    fn storage_bound_and_family_size() {
        let p = hammersley_wd(256, 2).unwrap();
        let s = build_ids(&p, 1, MaxReal).unwrap();
        assert!(s.s_plus() <= 512, "{}", s.s_plus());
        let p = uniform_random(16, 2, 1).unwrap();
        let s = build_ids(&p, 1, MaxReal).unwrap();
        assert_eq!(s.family().sets().len(), 4);
        assert_eq!(s.family().total_points(), 16);
    }

    #[test]
    fn stored_values_match_scan() {
        for (d, k) in [(2, 1), (3, 1), (3, 2)] {
            let p = uniform_random(64, d, 2).unwrap();
            let s = build_ids(&p, k, IdSet).unwrap();
            for sum in s.sums() {
                let want: Ids = p.iter().filter(|q| sum.region.contains_coords(&q.coords)).map(|q| q.id).collect();
                assert_eq!(sum.value, want);
                assert_eq!(sum.count, want.len());
                assert!(sum.count >= 2);
                assert!(sum.region.contains_box(&sum.tight));
            }
        }
    }
}
