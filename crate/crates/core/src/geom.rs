//! Points, boxes and query answers.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};

/// Lower bound of a box side that is unbounded from below.
pub const NEG_INF: f64 = f64::NEG_INFINITY;

#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    pub id: u32,
    pub coords: Vec<f64>,
}

impl Point {
    pub fn new(id: u32, coords: Vec<f64>) -> Self {
        Point { id, coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Weak dominance: every coordinate of `self` is at most the matching one of `other`.
    pub fn dominated_by(&self, other: &[f64]) -> bool {
        self.coords.iter().zip(other).all(|(a, b)| a <= b)
    }
}

/// Points in the unit cube with unique ids.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    d: usize,
    points: Vec<Point>,
}

impl PointSet {
    pub fn new(d: usize, points: Vec<Point>) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        let mut seen = HashSet::with_capacity(points.len());
        for p in &points {
            if p.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, found: p.dim() });
            }
            if let Some(c) = p.coords.iter().find(|c| !(0.0..=1.0).contains(*c)) {
                return Err(Error::OutOfRange(format!("coordinate {c} of point {} outside [0, 1]", p.id)));
            }
            if !seen.insert(p.id) {
                return Err(Error::InvalidParameter(format!("duplicate point id {}", p.id)));
            }
        }
        Ok(PointSet { d, points })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Point> {
        self.points.iter()
    }

    pub fn into_points(self) -> Vec<Point> {
        self.points
    }

    pub fn ids(&self) -> Vec<u32> {
        self.points.iter().map(|p| p.id).collect()
    }

    /// True when no two points share a coordinate value in any dimension.
    pub fn has_distinct_coordinates(&self) -> bool {
        (0..self.d).all(|i| {
            let mut seen = HashSet::with_capacity(self.points.len());
            self.points.iter().all(|p| seen.insert(p.coords[i].to_bits()))
        })
    }
}

/// Closed axis-aligned box; a side may be unbounded below (`lo == NEG_INF`).
#[derive(Clone, Debug, PartialEq)]
pub struct BoxD {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoxD {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch { expected: lo.len(), found: hi.len() });
        }
        for (&l, &h) in lo.iter().zip(&hi) {
            if !h.is_finite() || l.is_nan() || (l.is_finite() && l > h) || l == f64::INFINITY {
                return Err(Error::InvalidInterval { lo: l, hi: h });
            }
        }
        Ok(BoxD { lo, hi })
    }

    /// The unit cube `[0,1]^d`.
    pub fn unit(d: usize) -> Self {
        BoxD { lo: vec![0.0; d], hi: vec![1.0; d] }
    }

    /// The dominance region `(-inf, q_1] x ... x (-inf, q_d]`.
    pub fn dominance(q: &[f64]) -> Self {
        BoxD { lo: vec![NEG_INF; q.len()], hi: q.to_vec() }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains_coords(&self, c: &[f64]) -> bool {
        self.lo.iter().zip(&self.hi).zip(c).all(|((&l, &h), &x)| l <= x && x <= h)
    }

    pub fn contains(&self, p: &Point) -> Result<bool> {
        box_contains_point(self, p)
    }

    /// True when `other` lies inside `self` (closed comparisons).
    pub fn contains_box(&self, other: &BoxD) -> bool {
        self.dim() == other.dim()
            && (0..self.dim()).all(|i| self.lo[i] <= other.lo[i] && other.hi[i] <= self.hi[i])
    }

    pub fn volume(&self, clip_lo: f64) -> f64 {
        box_volume(self, clip_lo)
    }
}

impl fmt::Display for BoxD {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim() {
            if i > 0 {
                f.write_str("x")?;
            }
            if self.lo[i] == NEG_INF {
                write!(f, "(-inf,{}]", self.hi[i])?;
            } else {
                write!(f, "[{},{}]", self.lo[i], self.hi[i])?;
            }
        }
        Ok(())
    }
}

pub fn box_contains_point(b: &BoxD, p: &Point) -> Result<bool> {
    if b.dim() != p.dim() {
        return Err(Error::DimensionMismatch { expected: b.dim(), found: p.dim() });
    }
    Ok(b.contains_coords(&p.coords))
}

/// Product of side lengths, with unbounded lower ends replaced by `clip_lo`.
pub fn box_volume(b: &BoxD, clip_lo: f64) -> f64 {
    b.lo.iter().zip(&b.hi).map(|(&l, &h)| (h - l.max(clip_lo)).max(0.0)).product()
}

/// Result of a range query with its cost in semigroup additions.
#[derive(Clone, Debug, PartialEq)]
pub struct QueryAnswer<V> {
    /// `None` exactly when the range holds no input point.
    pub value: Option<V>,
    /// Stored non-singleton sums used.
    pub sums_used: usize,
    pub singletons_used: usize,
}

impl<V> QueryAnswer<V> {
    pub fn empty() -> Self {
        QueryAnswer { value: None, sums_used: 0, singletons_used: 0 }
    }

    pub fn total_cost(&self) -> usize {
        self.sums_used + self.singletons_used
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point {
        Point::new(0, vec![x, y])
    }

    #[test]
    fn containment_examples() {
        let b = BoxD::new(vec![0.0, NEG_INF], vec![1.0, 1.0]).unwrap();
        assert!(box_contains_point(&b, &p(0.5, 0.5)).unwrap());
        let b = BoxD::new(vec![0.6, NEG_INF], vec![0.7, 1.0]).unwrap();
        assert!(!box_contains_point(&b, &p(0.5, 0.5)).unwrap());
        let b = BoxD::new(vec![0.5, NEG_INF], vec![0.5, 0.5]).unwrap();
        assert!(box_contains_point(&b, &p(0.5, 0.5)).unwrap());
    }

    #[test]
    fn containment_dimension_mismatch() {
        let b = BoxD::unit(3);
        assert!(matches!(
            box_contains_point(&b, &p(0.5, 0.5)),
            Err(Error::DimensionMismatch { expected: 3, found: 2 })
        ));
    }

    #[test]
    fn volume_examples() {
        assert_eq!(box_volume(&BoxD::unit(2), 0.0), 1.0);
        let b = BoxD::new(vec![0.25, NEG_INF], vec![0.75, 0.5]).unwrap();
        assert_eq!(box_volume(&b, 0.0), 0.25);
        let b = BoxD::new(vec![0.3, 0.0], vec![0.3, 1.0]).unwrap();
        assert_eq!(box_volume(&b, 0.0), 0.0);
    }

    #[test]
    fn rejects_inverted_interval() {
        assert!(matches!(BoxD::new(vec![0.6], vec![0.5]), Err(Error::InvalidInterval { .. })));
        assert!(BoxD::new(vec![NEG_INF], vec![0.5]).is_ok());
    }

    #[test]
    fn point_set_validation() {
        assert!(PointSet::new(2, vec![Point::new(0, vec![0.1, 1.2])]).is_err());
        assert!(PointSet::new(2, vec![Point::new(0, vec![0.1, 0.2]), Point::new(0, vec![0.3, 0.4])]).is_err());
        assert!(PointSet::new(2, vec![Point::new(0, vec![0.1])]).is_err());
        let ps = PointSet::new(2, vec![Point::new(0, vec![0.1, 0.2]), Point::new(1, vec![0.3, 0.2])]).unwrap();
        assert!(!ps.has_distinct_coordinates());
    }

    #[test]
    fn answer_cost() {
        let a: QueryAnswer<f64> = QueryAnswer { value: Some(1.0), sums_used: 2, singletons_used: 3 };
        assert_eq!(a.total_cost(), 5);
        assert_eq!(QueryAnswer::<f64>::empty().total_cost(), 0);
    }
}
