use crate::dyadic::{DyadicTree, NodeId};
use crate::error::{Error, Result};
use crate::geom::BoxD;

/// The unit square cut into `h` horizontal bands, one per internal depth
/// `0..h`; band `l` holds the regions of the depth-`l` nodes, split at their
/// interval boundaries. Leaves have no region.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RepDiagram {
    pub tree: DyadicTree,
}

impl RepDiagram {
    pub fn new(h: u32) -> Result<Self> {
        if h == 0 {
            return Err(Error::InvalidParameter("diagram needs height >= 1".into()));
        }
        Ok(RepDiagram { tree: DyadicTree::new(0.0, 1.0, h)? })
    }

    pub fn height(&self) -> u32 {
        self.tree.height
    }

    /// Region `[a(v), b(v)] x [1 - (l+1)/h, 1 - l/h]` of the depth-`l` node `v`.
    pub fn region(&self, v: NodeId) -> Option<BoxD> {
        let h = self.height();
        (v.depth < h).then(|| BoxD {
            lo: vec![self.tree.a(v), 1.0 - (v.depth + 1) as f64 / h as f64],
            hi: vec![self.tree.b(v), 1.0 - v.depth as f64 / h as f64],
        })
    }

    /// Band index of height `z`; band boundaries belong to the band below.
    pub fn band(&self, z: f64) -> u32 {
        let h = self.height();
        (((1.0 - z) * h as f64).floor().max(0.0) as u32).min(h - 1)
    }

    /// Node whose region holds `(x, z)`.
    pub fn node_at(&self, x: f64, z: f64) -> Result<NodeId> {
        if !(0.0..=1.0).contains(&z) {
            return Err(Error::OutOfRange(format!("z={z}")));
        }
        self.tree.node_containing(x, self.band(z))
    }
}
