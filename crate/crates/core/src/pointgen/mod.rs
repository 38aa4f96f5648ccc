//! Well-distributed point sets: a Hammersley construction, uniform random
//! sets, and a checker for the volume/count conditions.

mod io;

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use self::io::{parse_point_set, read_point_set, write_point_set, format_point_set};
use crate::error::{Error, Result};
use crate::geom::{BoxD, Point, PointSet};
use crate::kdtree::KdTree;

const PRIMES: [u64; 5] = [2, 3, 5, 7, 11];

/// Largest number of candidate rectangles the exact checker will enumerate.
pub const EXACT_LIMIT: f64 = 1e9;

/// Rectangles drawn by the sampled checker.
pub const SAMPLED_RECTANGLES: usize = 100_000;

/// Radical inverse of `i` in `base`, computed as one exact-as-possible division.
pub fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut rev: u64 = 0;
    let mut denom: u64 = 1;
    while i > 0 {
        rev = rev * base + i % base;
        denom *= base;
        i /= base;
    }
    rev as f64 / denom as f64
}

/// Hammersley set: point `i` is `((i + 0.5)/n, phi_2(i), phi_3(i), ...)`.
pub fn hammersley_wd(n: usize, d: usize) -> Result<PointSet> {
    if d == 0 || n == 0 {
        return Err(Error::InvalidParameter(format!("need n >= 1 and d >= 1, got n={n}, d={d}")));
    }
    if d > 6 {
        return Err(Error::Unsupported(format!("hammersley_wd supports d <= 6, got {d}")));
    }
    if n > u32::MAX as usize {
        return Err(Error::TooLarge(format!("n={n}")));
    }
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(d);
    cols.push((0..n).map(|i| (i as f64 + 0.5) / n as f64).collect());
    for &base in &PRIMES[..d - 1] {
        let mut col: Vec<f64> = (0..n as u64).map(|i| radical_inverse(i, base)).collect();
        enforce_distinct(&mut col, 0.5 / n as f64 / base as f64);
        cols.push(col);
    }
    let points = (0..n).map(|i| Point::new(i as u32, cols.iter().map(|c| c[i]).collect())).collect();
    PointSet::new(d, points)
}

/// Nudges repeated values upward by multiples of `step` until all are distinct.
/// Radical inverses of distinct integers never collide, so this is a safeguard.
fn enforce_distinct(col: &mut [f64], step: f64) {
    let mut seen = HashSet::with_capacity(col.len());
    for v in col.iter_mut() {
        while !seen.insert(v.to_bits()) {
            *v = (*v + step).min(1.0);
            if *v == 1.0 && seen.contains(&1.0f64.to_bits()) {
                *v -= step * 0.5;
            }
        }
    }
}

/// `n` independent uniform points; a coordinate equal to an earlier one in
/// the same dimension is redrawn.
pub fn uniform_random(n: usize, d: usize, seed: u64) -> Result<PointSet> {
    if d == 0 || n == 0 {
        return Err(Error::InvalidParameter(format!("need n >= 1 and d >= 1, got n={n}, d={d}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen: Vec<HashSet<u64>> = vec![HashSet::with_capacity(n); d];
    let points = (0..n)
        .map(|i| {
            let coords = (0..d)
                .map(|k| loop {
                    let c: f64 = rng.gen();
                    if seen[k].insert(c.to_bits()) {
                        break c;
                    }
                })
                .collect();
            Point::new(i as u32, coords)
        })
        .collect();
    PointSet::new(d, points)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WdMode {
    /// Every rectangle whose facets pass through point coordinates.
    Exact,
    /// Random rectangles, each shrunk to the bounding box of what it holds.
    /// Can only certify failure, never the universal property.
    Sampled { rectangles: usize, seed: u64 },
}

impl WdMode {
    pub fn sampled(seed: u64) -> Self {
        WdMode::Sampled { rectangles: SAMPLED_RECTANGLES, seed }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WdReport {
    pub passed: bool,
    /// Largest epsilon for which the volume condition held on every examined
    /// rectangle holding at least two points (infinite if there were none).
    pub epsilon_observed: f64,
    /// Rectangle attaining `epsilon_observed`; the unit cube if none examined.
    pub worst_rectangle: BoxD,
    pub mode: WdMode,
    /// The count condition `count <= ceil(v n / eps)` at the requested epsilon.
    pub count_condition_holds: bool,
    pub rectangles_examined: u64,
}

struct Tracker {
    n: f64,
    eps: f64,
    best: f64,
    worst: Option<BoxD>,
    count_ok: bool,
    examined: u64,
}

impl Tracker {
    fn new(n: usize, eps: f64) -> Self {
        Tracker { n: n as f64, eps, best: f64::INFINITY, worst: None, count_ok: true, examined: 0 }
    }

    #[inline]
    fn observe(&mut self, count: usize, vol: f64, rect: impl FnOnce() -> BoxD) {
        self.examined += 1;
        if count < 2 {
            return;
        }
        let ratio = vol * self.n / count as f64;
        if ratio < self.best {
            self.best = ratio;
            self.worst = Some(rect());
        }
        if count as f64 > (vol * self.n / self.eps).ceil() {
            self.count_ok = false;
        }
    }

    fn finish(self, d: usize, mode: WdMode) -> WdReport {
        WdReport {
            passed: self.best >= self.eps,
            epsilon_observed: self.best,
            worst_rectangle: self.worst.unwrap_or_else(|| BoxD::unit(d)),
            mode,
            count_condition_holds: self.count_ok,
            rectangles_examined: self.examined,
        }
    }
}

/// Upper bound on the number of rectangles the exact checker visits.
pub fn exact_candidate_bound(n: usize, d: usize) -> f64 {
    (2..=n).map(|l| (n - l + 1) as f64 * ((l * (l - 1) / 2) as f64).powi(d as i32 - 1)).sum()
}

/// Checks the volume condition (any rectangle with `c >= 2` points has volume
/// at least `eps c / n`) and the count condition on the same rectangles.
pub fn check_well_distributed(p: &PointSet, eps: f64, mode: WdMode) -> Result<WdReport> {
    let n = p.len();
    let d = p.dim();
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 points, got {n}")));
    }
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {eps}")));
    }
    let mut t = Tracker::new(n, eps);
    match mode {
        WdMode::Exact => {
            let bound = exact_candidate_bound(n, d);
            if bound > EXACT_LIMIT {
                return Err(Error::TooLarge(format!("exact check of n={n}, d={d} needs ~{bound:.3e} rectangles")));
            }
            let coords: Vec<&[f64]> = p.iter().map(|q| q.coords.as_slice()).collect();
            let mut lo = Vec::with_capacity(d);
            let mut hi = Vec::with_capacity(d);
            exact_rec(&coords, (0..n).collect(), 0, 1.0, &mut lo, &mut hi, &mut t);
        }
        WdMode::Sampled { rectangles, seed } => {
            let unit = |_: &(), _: &()| ();
            let rc = KdTree::new(p.points(), d, &vec![(); n], &unit);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (mut lo, mut hi) = (vec![0.0; d], vec![0.0; d]);
            for _ in 0..rectangles {
                for k in 0..d {
                    let (a, b): (f64, f64) = (rng.gen(), rng.gen());
                    lo[k] = a.min(b);
                    hi[k] = a.max(b);
                }
                let hit = rc.query(&lo, &hi, &unit);
                if hit.count < 2 {
                    t.examined += 1;
                    continue;
                }
                let vol: f64 = (0..d).map(|k| hit.hi[k] - hit.lo[k]).product();
                t.observe(hit.count, vol, || BoxD { lo: hit.lo.clone(), hi: hit.hi.clone() });
            }
        }
    }
    Ok(t.finish(d, mode))
}

/// Fixes the extent of dimension `dim` to every pair of coordinates from
/// `idx`, recursing on the points inside the slab.
fn exact_rec(
    pts: &[&[f64]],
    mut idx: Vec<usize>,
    dim: usize,
    vol: f64,
    lo: &mut Vec<f64>,
    hi: &mut Vec<f64>,
    t: &mut Tracker,
) {
    let d = pts[0].len();
    idx.sort_unstable_by(|&a, &b| pts[a][dim].total_cmp(&pts[b][dim]));
    let m = idx.len();
    for a in 0..m {
        let x0 = pts[idx[a]][dim];
        for b in a + 1..m {
            let x1 = pts[idx[b]][dim];
            let v = vol * (x1 - x0);
            if dim + 1 == d {
                t.observe(b - a + 1, v, || {
                    let mut l = lo.clone();
                    let mut h = hi.clone();
                    l.push(x0);
                    h.push(x1);
                    BoxD { lo: l, hi: h }
                });
            } else {
                lo.push(x0);
                hi.push(x1);
                exact_rec(pts, idx[a..=b].to_vec(), dim + 1, v, lo, hi, t);
                lo.pop();
                hi.pop();
            }
        }
    }
}
