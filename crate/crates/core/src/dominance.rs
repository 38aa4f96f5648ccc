//! Sampled dominance sums: one stored sum per sample point, queries answered by
//! the maxima of the dominated samples plus singletons for what they miss.

use crate::error::{Error, Result};
use crate::geom::{BoxD, Point, PointSet, QueryAnswer, NEG_INF};
use crate::grid::GridIndex;
use crate::pointgen::hammersley_wd;
use crate::semigroup::Semigroup;

fn dominates(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x >= y)
}

/// Indices of the points not dominated by any other point. Of several equal
/// points only the first is kept.
pub fn maxima(points: &[&[f64]]) -> Vec<usize> {
    let n = points.len();
    if n == 0 {
        return Vec::new();
    }
    if points[0].len() == 2 {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            points[b][0].total_cmp(&points[a][0]).then(points[b][1].total_cmp(&points[a][1])).then(a.cmp(&b))
        });
        let mut best = f64::NEG_INFINITY;
        let mut out = Vec::new();
        for i in order {
            if points[i][1] > best {
                best = points[i][1];
                out.push(i);
            }
        }
        out.sort_unstable();
        return out;
    }
    (0..n)
        .filter(|&i| {
            !(0..n).any(|j| j != i && dominates(points[j], points[i]) && (points[j] != points[i] || j < i))
        })
        .collect()
}

/// Covers `targets` with candidate boxes, where candidate `c` covers every
/// target it dominates. Returns the candidates actually used (by index into
/// `cands`) and the targets left over.
pub(crate) fn dominance_cover(cands: &[&[f64]], targets: &[&[f64]]) -> (Vec<usize>, Vec<usize>) {
    let m = maxima(cands);
    let mut used = vec![false; cands.len()];
    let mut residual = Vec::new();
    if m.is_empty() {
        return (Vec::new(), (0..targets.len()).collect());
    }
    if cands[0].len() == 2 {
        // staircase: x ascending means y descending
        let mut stair = m.clone();
        stair.sort_by(|&a, &b| cands[a][0].total_cmp(&cands[b][0]));
        for (t, p) in targets.iter().enumerate() {
            let pos = stair.partition_point(|&c| cands[c][0] < p[0]);
            match stair.get(pos) {
                Some(&c) if cands[c][1] >= p[1] => used[c] = true,
                _ => residual.push(t),
            }
        }
    } else {
        for (t, p) in targets.iter().enumerate() {
            match m.iter().find(|&&c| dominates(cands[c], p)) {
                Some(&c) => used[c] = true,
                None => residual.push(t),
            }
        }
    }
    ((0..cands.len()).filter(|&c| used[c]).collect(), residual)
}

#[derive(Clone, Debug)]
pub struct DominanceStructure<S: Semigroup> {
    sg: S,
    d: usize,
    points: Vec<Point>,
    weights: Vec<S::Value>,
    samples: Vec<Vec<f64>>,
    /// Combined weight of the points each sample dominates; `None` if it dominates none.
    sums: Vec<Option<S::Value>>,
    grid: GridIndex,
}

/// Which stored sums and singletons a query used.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DominanceTrace {
    /// Size of the maxima of the dominated samples.
    pub maxima: usize,
    pub samples_used: Vec<usize>,
    pub singleton_ids: Vec<u32>,
}

/// Builds the structure with `s` Hammersley samples and canonical weights.
pub fn build_dominance<S: Semigroup>(p: &PointSet, s: usize, sg: S) -> Result<DominanceStructure<S>> {
    if s == 0 || s > p.len() {
        return Err(Error::InvalidParameter(format!("sample count {s} must be in 1..={}", p.len())));
    }
    let samples = hammersley_wd(s, p.dim())?.into_points().into_iter().map(|q| q.coords).collect();
    let weights = p.iter().map(|q| sg.weight(q.id)).collect();
    DominanceStructure::with_samples(p, weights, samples, sg)
}

impl<S: Semigroup> DominanceStructure<S> {
    pub fn with_samples(p: &PointSet, weights: Vec<S::Value>, samples: Vec<Vec<f64>>, sg: S) -> Result<Self> {
        let d = p.dim();
        if weights.len() != p.len() {
            return Err(Error::DimensionMismatch { expected: p.len(), found: weights.len() });
        }
        if let Some(bad) = samples.iter().find(|s| s.len() != d) {
            return Err(Error::DimensionMismatch { expected: d, found: bad.len() });
        }
        let points = p.points().to_vec();
        let grid = GridIndex::build(&points, d);
        let sums = samples
            .iter()
            .map(|s| {
                let mut acc: Option<S::Value> = None;
                grid.for_each_in_box(&points, &BoxD::dominance(s), |i| {
                    acc = Some(match acc.take() {
                        None => weights[i].clone(),
                        Some(a) => sg.combine(&a, &weights[i]),
                    });
                });
                acc
            })
            .collect();
        Ok(DominanceStructure { sg, d, points, weights, samples, sums, grid })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn samples(&self) -> &[Vec<f64>] {
        &self.samples
    }

    pub fn stored_sum(&self, sample: usize) -> Option<&S::Value> {
        self.sums[sample].as_ref()
    }

    /// Number of stored sums, one per sample.
    pub fn storage(&self) -> usize {
        self.samples.len()
    }

    pub fn query(&self, q: &[f64]) -> Result<QueryAnswer<S::Value>> {
        Ok(self.query_traced(q)?.0)
    }

    pub fn query_traced(&self, q: &[f64]) -> Result<(QueryAnswer<S::Value>, DominanceTrace)> {
        if q.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, found: q.len() });
        }
        let dominated: Vec<usize> = (0..self.samples.len()).filter(|&i| dominates(q, &self.samples[i])).collect();
        let refs: Vec<&[f64]> = dominated.iter().map(|&i| self.samples[i].as_slice()).collect();
        let m: Vec<usize> = maxima(&refs).into_iter().map(|j| dominated[j]).collect();
        let used: Vec<usize> = m.iter().copied().filter(|&i| self.sums[i].is_some()).collect();
        let residual = self.residual_points(q, &m);

        let mut values: Vec<&S::Value> = used.iter().map(|&i| self.sums[i].as_ref().unwrap()).collect();
        values.extend(residual.iter().map(|&i| &self.weights[i]));
        let value = if values.is_empty() { None } else { Some(self.sg.combine_all(values)?) };
        let trace = DominanceTrace {
            maxima: m.len(),
            samples_used: used.clone(),
            singleton_ids: residual.iter().map(|&i| self.points[i].id).collect(),
        };
        Ok((QueryAnswer { value, sums_used: used.len(), singletons_used: residual.len() }, trace))
    }

    /// Points dominated by `q` but by no member of `m`.
    fn residual_points(&self, q: &[f64], m: &[usize]) -> Vec<usize> {
        let mut out = Vec::new();
        if self.d == 2 {
            let mut stair: Vec<&[f64]> = m.iter().map(|&i| self.samples[i].as_slice()).collect();
            stair.sort_by(|a, b| a[0].total_cmp(&b[0]));
            let mut prev_x = NEG_INF;
            for s in &stair {
                let b = BoxD { lo: vec![prev_x, s[1]], hi: vec![s[0], q[1]] };
                self.grid.for_each_in_box(&self.points, &b, |i| {
                    let c = &self.points[i].coords;
                    if c[0] > prev_x && c[1] > s[1] {
                        out.push(i);
                    }
                });
                prev_x = s[0];
            }
            let b = BoxD { lo: vec![prev_x, NEG_INF], hi: q.to_vec() };
            self.grid.for_each_in_box(&self.points, &b, |i| {
                if self.points[i].coords[0] > prev_x {
                    out.push(i);
                }
            });
        } else {
            self.grid.for_each_in_box(&self.points, &BoxD::dominance(q), |i| {
                let c = &self.points[i].coords;
                if !m.iter().any(|&j| dominates(&self.samples[j], c)) {
                    out.push(i);
                }
            });
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::{IdSet, Ids, MaxReal};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn refs(v: &[Vec<f64>]) -> Vec<&[f64]> {
        v.iter().map(|p| p.as_slice()).collect()
    }

    fn pairwise_maxima(v: &[Vec<f64>]) -> Vec<usize> {
        (0..v.len()).filter(|&i| !(0..v.len()).any(|j| j != i && dominates(&v[j], &v[i]))).collect()
    }

    #[test]
    fn maxima_examples() {
        let a = vec![vec![1.0, 3.0], vec![2.0, 2.0], vec![3.0, 1.0]];
        assert_eq!(maxima(&refs(&a)), vec![0, 1, 2]);
        let b = vec![vec![1.0, 1.0], vec![2.0, 2.0]];
        assert_eq!(maxima(&refs(&b)), vec![1]);
    }

    #[test]
    fn maxima_match_pairwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in 1..=4 {
            for _ in 0..50 {
                let v: Vec<Vec<f64>> = (0..10).map(|_| (0..d).map(|_| rng.gen()).collect()).collect();
                assert_eq!(maxima(&refs(&v)), pairwise_maxima(&v));
            }
        }
    }

    fn example() -> (PointSet, DominanceStructure<IdSet>) {
        let p = PointSet::new(
            2,
            vec![
                Point::new(0, vec![0.1, 0.1]),
                Point::new(1, vec![0.2, 0.3]),
                Point::new(2, vec![0.6, 0.2]),
                Point::new(3, vec![0.7, 0.8]),
            ],
        )
        .unwrap();
        let w = p.iter().map(|q| IdSet.weight(q.id)).collect();
        let ds = DominanceStructure::with_samples(&p, w, vec![vec![0.5, 0.5]], IdSet).unwrap();
        (p, ds)
    }

    #[test]
    fn query_examples() {
        let (_, ds) = example();
        let a = ds.query(&[0.9, 0.9]).unwrap();
        assert_eq!((a.sums_used, a.singletons_used), (1, 2));
        assert_eq!(a.value.unwrap(), Ids::from_iter([0, 1, 2, 3]));
        let a = ds.query(&[0.65, 0.4]).unwrap();
        assert_eq!((a.sums_used, a.singletons_used), (0, 3));
        assert_eq!(a.value.unwrap(), Ids::from_iter([0, 1, 2]));
        let a = ds.query(&[0.0, 0.0]).unwrap();
        assert_eq!(a, QueryAnswer::empty());
        assert_eq!(ds.stored_sum(0).unwrap(), &Ids::from_iter([0, 1]));
    }

    #[test]
    fn sample_count_bounds() {
        let p = crate::pointgen::uniform_random(8, 2, 1).unwrap();
        assert!(build_dominance(&p, 0, MaxReal).is_err());
        assert!(build_dominance(&p, 9, MaxReal).is_err());
        assert_eq!(build_dominance(&p, 1, MaxReal).unwrap().storage(), 1);
    }

    #[test]
    fn stored_sums_match_scan() {
        let p = crate::pointgen::uniform_random(8, 2, 3).unwrap();
        let ds = build_dominance(&p, 2, MaxReal).unwrap();
        for (i, s) in ds.samples().iter().enumerate() {
            let want = p.iter().filter(|q| q.dominated_by(s)).map(|q| MaxReal.weight(q.id)).reduce(f64::max);
            assert_eq!(ds.stored_sum(i).copied(), want);
        }
    }

    #[test]
    fn idset_queries_are_exact() {
        for d in [2, 3] {
            let p = crate::pointgen::uniform_random(500, d, 5).unwrap();
            let ds = build_dominance(&p, 40, IdSet).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(6);
            for _ in 0..300 {
                let q: Vec<f64> = (0..d).map(|_| rng.gen()).collect();
                let (a, tr) = ds.query_traced(&q).unwrap();
                let want: Ids = p.iter().filter(|x| x.dominated_by(&q)).map(|x| x.id).collect();
                assert_eq!(a.value.unwrap_or_else(Ids::empty), want);
                for &s in &tr.samples_used {
                    assert!(dominates(&q, &ds.samples()[s]));
                }
            }
        }
    }

    #[test]
    fn cover_helper() {
        let c = vec![vec![0.5, 0.5], vec![0.4, 0.4], vec![0.9, 0.1]];
        let t = vec![vec![0.2, 0.2], vec![0.8, 0.05], vec![0.95, 0.0]];
        let (used, res) = dominance_cover(&refs(&c), &refs(&t));
        assert_eq!(used, vec![0, 2]);
        assert_eq!(res, vec![2]);
    }
}
