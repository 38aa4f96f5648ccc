//! Uniform bucket grid over the unit cube for enumerating points in a box.
//!
//! Lookups here are retrieval work, not semigroup additions, so they never
//! show up in query costs.

use crate::geom::{BoxD, Point};

#[derive(Clone, Debug)]
pub struct GridIndex {
    d: usize,
    cells_per_dim: usize,
    /// CSR layout: points of cell `c` are `items[starts[c]..starts[c + 1]]`.
    starts: Vec<u32>,
    items: Vec<u32>,
}

impl GridIndex {
    /// Roughly one point per cell: `ceil(n^(1/d))` cells per side.
    pub fn build(points: &[Point], d: usize) -> Self {
        let n = points.len().max(1);
        let mut g = (n as f64).powf(1.0 / d as f64).ceil() as usize;
        while g > 1 && g.pow(d as u32) > 4 * n {
            g -= 1;
        }
        Self::with_cells(points, d, g.max(1))
    }

    pub fn with_cells(points: &[Point], d: usize, cells_per_dim: usize) -> Self {
        let total = cells_per_dim.pow(d as u32);
        let mut counts = vec![0u32; total + 1];
        let cell_of: Vec<usize> = points
            .iter()
            .map(|p| {
                p.coords.iter().fold(0usize, |acc, &c| acc * cells_per_dim + Self::cell(c, cells_per_dim))
            })
            .collect();
        for &c in &cell_of {
            counts[c + 1] += 1;
        }
        for c in 0..total {
            counts[c + 1] += counts[c];
        }
        let mut fill = counts.clone();
        let mut items = vec![0u32; points.len()];
        for (i, &c) in cell_of.iter().enumerate() {
            items[fill[c] as usize] = i as u32;
            fill[c] += 1;
        }
        GridIndex { d, cells_per_dim, starts: counts, items }
    }

    fn cell(c: f64, g: usize) -> usize {
        if c <= 0.0 {
            0
        } else {
            ((c * g as f64) as usize).min(g - 1)
        }
    }

    /// Calls `f` with the index of every point inside `b` (closed).
    pub fn for_each_in_box(&self, points: &[Point], b: &BoxD, mut f: impl FnMut(usize)) {
        debug_assert_eq!(b.dim(), self.d);
        let g = self.cells_per_dim;
        let mut lo = Vec::with_capacity(self.d);
        let mut hi = Vec::with_capacity(self.d);
        for i in 0..self.d {
            if b.hi[i] < 0.0 || b.lo[i] > 1.0 {
                return;
            }
            lo.push(Self::cell(b.lo[i], g));
            hi.push(Self::cell(b.hi[i], g));
        }
        let mut cur = lo.clone();
        loop {
            let c = cur.iter().fold(0usize, |acc, &x| acc * g + x);
            let (s, e) = (self.starts[c] as usize, self.starts[c + 1] as usize);
            for &i in &self.items[s..e] {
                if b.contains_coords(&points[i as usize].coords) {
                    f(i as usize);
                }
            }
            // odometer over the cell range, last dimension fastest
            let mut k = self.d;
            loop {
                if k == 0 {
                    return;
                }
                k -= 1;
                if cur[k] < hi[k] {
                    cur[k] += 1;
                    break;
                }
                cur[k] = lo[k];
            }
        }
    }

    pub fn collect_in_box(&self, points: &[Point], b: &BoxD) -> Vec<usize> {
        let mut out = Vec::new();
        self.for_each_in_box(points, b, |i| out.push(i));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::NEG_INF;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matches_linear_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for d in 1..=3 {
            let pts: Vec<Point> =
                (0..500).map(|i| Point::new(i, (0..d).map(|_| rng.gen::<f64>()).collect())).collect();
            let grid = GridIndex::build(&pts, d);
            for _ in 0..200 {
                let mut lo = Vec::new();
                let mut hi = Vec::new();
                for _ in 0..d {
                    let (a, b): (f64, f64) = (rng.gen(), rng.gen());
                    lo.push(if rng.gen_bool(0.3) { NEG_INF } else { a.min(b) });
                    hi.push(a.max(b));
                }
                let b = BoxD::new(lo, hi).unwrap();
                let mut got = grid.collect_in_box(&pts, &b);
                got.sort_unstable();
                let want: Vec<usize> = (0..pts.len()).filter(|&i| b.contains_coords(&pts[i].coords)).collect();
                assert_eq!(got, want);
            }
        }
    }

    #[test]
    fn boundary_points_are_found() {
        let pts = vec![Point::new(0, vec![0.0, 1.0]), Point::new(1, vec![1.0, 0.0])];
        let grid = GridIndex::build(&pts, 2);
        assert_eq!(grid.collect_in_box(&pts, &BoxD::unit(2)).len(), 2);
        let corner = BoxD::new(vec![1.0, NEG_INF], vec![1.0, 0.0]).unwrap();
        assert_eq!(grid.collect_in_box(&pts, &corner), vec![1]);
    }
}
