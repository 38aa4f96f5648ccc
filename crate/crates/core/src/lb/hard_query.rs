use rand::Rng;

use super::RepDiagram;
use crate::dyadic::NodeId;
use crate::error::{Error, Result};
use crate::geom::{BoxD, Point, NEG_INF};

/// One two-sided dimension of a hard query.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HardDim {
    /// Sampled point of the diagram.
    pub x: f64,
    pub z: f64,
    /// Node whose region holds `(x, z)`.
    pub v: NodeId,
    /// Left end of the query range, `a(v)`.
    pub x_prime: f64,
}

impl HardDim {
    pub fn depth(&self) -> u32 {
        self.v.depth
    }
}

/// A query `[x'_1, x_1] x ... x [x'_{d-1}, x_{d-1}] x (-inf, y]`.
#[derive(Clone, Debug, PartialEq)]
pub struct HardQuery {
    pub dims: Vec<HardDim>,
    pub y: f64,
}

impl HardQuery {
    pub fn to_box(&self) -> BoxD {
        let mut lo: Vec<f64> = self.dims.iter().map(|t| t.x_prime).collect();
        let mut hi: Vec<f64> = self.dims.iter().map(|t| t.x).collect();
        lo.push(NEG_INF);
        hi.push(self.y);
        BoxD { lo, hi }
    }

    /// The query's upper corner.
    pub fn dot(&self) -> Vec<f64> {
        let mut c: Vec<f64> = self.dims.iter().map(|t| t.x).collect();
        c.push(self.y);
        c
    }

    /// Marker in diagram `i`: the horizontal segment `[x'_i, x_i]` at height `z_i`.
    pub fn marker(&self, i: usize) -> (f64, f64, f64) {
        let t = &self.dims[i];
        (t.x_prime, t.x, t.z)
    }
}

/// Samples `(x_i, z_i)` uniformly in each of the `d - 1` diagrams and `y` uniformly.
pub fn sample_hard_query<R: Rng + ?Sized>(rng: &mut R, diagram: &RepDiagram, d: usize) -> Result<HardQuery> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("hard queries need d >= 2, got {d}")));
    }
    let dims = (0..d - 1)
        .map(|_| {
            let (x, z): (f64, f64) = (rng.gen(), rng.gen());
            let v = diagram.node_at(x, z)?;
            Ok(HardDim { x, z, v, x_prime: diagram.tree.a(v) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HardQuery { dims, y: rng.gen() })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Check {
    /// `depth(v_i) + j_i` is not an internal depth, so `u_i` would have no region.
    I { dim: usize },
    /// The depth-`(l_i + j_i)` node holding the query is a left child.
    II { dim: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Subproblem {
    Defined {
        j: Vec<usize>,
        /// Left siblings of the nodes holding the query corner.
        u: Vec<NodeId>,
        /// `r(u_1) x ... x r(u_{d-1}) x (-inf, y]`.
        region: BoxD,
    },
    Undefined(Check),
}

pub fn subproblem(hq: &HardQuery, diagram: &RepDiagram, j: &[usize]) -> Result<Subproblem> {
    if j.len() != hq.dims.len() {
        return Err(Error::DimensionMismatch { expected: hq.dims.len(), found: j.len() });
    }
    if j.contains(&0) {
        return Err(Error::InvalidParameter("subproblem indices start at 1".into()));
    }
    let h = diagram.height() as usize;
    for (i, t) in hq.dims.iter().enumerate() {
        if t.depth() as usize + j[i] > h - 1 {
            return Ok(Subproblem::Undefined(Check::I { dim: i }));
        }
    }
    let mut u = Vec::with_capacity(j.len());
    for (i, t) in hq.dims.iter().enumerate() {
        let holder = diagram.tree.node_containing(t.x, t.depth() + j[i] as u32)?;
        if !holder.is_right_child() {
            return Ok(Subproblem::Undefined(Check::II { dim: i }));
        }
        u.push(holder.left_neighbor().unwrap());
    }
    let mut lo: Vec<f64> = u.iter().map(|&n| diagram.tree.a(n)).collect();
    let mut hi: Vec<f64> = u.iter().map(|&n| diagram.tree.b(n)).collect();
    lo.push(NEG_INF);
    hi.push(hq.y);
    Ok(Subproblem::Defined { j: j.to_vec(), u, region: BoxD { lo, hi } })
}

/// `ceil(delta h^(d-1) / (j_1 ... j_{d-1}) * n / s_plus)`, at least 1.
pub fn lambda(delta: f64, h: usize, j: &[usize], n: usize, s_plus: usize) -> usize {
    let jprod: f64 = j.iter().map(|&x| x as f64).product();
    let v = delta * (h as f64).powi(j.len() as i32) / jprod * n as f64 / s_plus.max(1) as f64;
    (v.ceil() as usize).max(1)
}

#[derive(Clone, Debug, PartialEq)]
pub struct TopBox {
    pub region: BoxD,
    pub beta: f64,
    /// Ids of the `lambda` points inside, highest first.
    pub ids: Vec<u32>,
}

/// The slab of a defined subproblem cut from below so it holds exactly
/// `lambda` points; `None` if the slab holds fewer.
pub fn top_box(sub: &Subproblem, points: &[Point], lambda: usize) -> Result<Option<TopBox>> {
    let Subproblem::Defined { region, .. } = sub else {
        return Err(Error::InvalidParameter("top box of an undefined subproblem".into()));
    };
    if lambda == 0 {
        return Err(Error::InvalidParameter("lambda must be positive".into()));
    }
    let last = region.dim() - 1;
    let mut inside: Vec<&Point> = points.iter().filter(|p| region.contains_coords(&p.coords)).collect();
    if inside.len() < lambda {
        return Ok(None);
    }
    inside.sort_by(|a, b| b.coords[last].total_cmp(&a.coords[last]));
    let bottom = inside[lambda - 1].coords[last];
    let y = region.hi[last];
    let mut b = region.clone();
    b.lo[last] = bottom;
    Ok(Some(TopBox { region: b, beta: y - bottom, ids: inside[..lambda].iter().map(|p| p.id).collect() }))
}
