//! Collectively well-distributed families, built by slicing a Hammersley set
//! in `d + k` dimensions along its last `k` axes and projecting each cell
//! down to the first `d`.

use std::path::Path;

use crate::error::{Error, Result};
use crate::geom::{Point, PointSet};
use crate::pointgen::{check_well_distributed, hammersley_wd, read_point_set, write_point_set, WdMode, WdReport};

pub const MAX_BASE_POINTS: usize = 10_000_000;
pub const MAX_UNIONS: usize = 10_000;

#[derive(Clone, Debug, PartialEq)]
pub struct CwdFamily {
    pub h: usize,
    pub k: usize,
    pub d: usize,
    /// Target size of each set.
    pub n: usize,
    /// Indexed row-major by `I in [h]^k`, first component most significant.
    sets: Vec<PointSet>,
}

/// Slab of `c` among `h` half-open slabs of `[0, 1]`, the last one closed; 1-based.
pub fn slab_index(c: f64, h: usize) -> usize {
    ((c * h as f64).floor() as usize).min(h - 1) + 1
}

pub fn build_cwd_family(n: usize, h: usize, k: usize, d: usize) -> Result<CwdFamily> {
    if n == 0 || h == 0 || k == 0 || d == 0 {
        return Err(Error::InvalidParameter(format!("N, h, k, d must be positive (N={n}, h={h}, k={k}, d={d})")));
    }
    if k > 3 || d + k > 6 {
        return Err(Error::TooLarge(format!("k={k}, d={d}: need k <= 3 and d + k <= 6")));
    }
    let cells = h.checked_pow(k as u32).filter(|&c| c <= MAX_BASE_POINTS);
    let total = cells.and_then(|c| c.checked_mul(n)).filter(|&t| t <= MAX_BASE_POINTS);
    let (cells, total) = match (cells, total) {
        (Some(c), Some(t)) => (c, t),
        _ => return Err(Error::TooLarge(format!("N * h^k exceeds {MAX_BASE_POINTS}"))),
    };
    let base = hammersley_wd(total, d + k)?;
    let mut buckets: Vec<Vec<Point>> = vec![Vec::new(); cells];
    for p in base.into_points() {
        let cell = p.coords[d..].iter().fold(0usize, |acc, &c| acc * h + slab_index(c, h) - 1);
        buckets[cell].push(Point::new(p.id, p.coords[..d].to_vec()));
    }
    let sets = buckets.into_iter().map(|b| PointSet::new(d, b)).collect::<Result<Vec<_>>>()?;
    Ok(CwdFamily { h, k, d, n, sets })
}

impl CwdFamily {
    fn flat(&self, index: &[usize]) -> Result<usize> {
        if index.len() != self.k {
            return Err(Error::DimensionMismatch { expected: self.k, found: index.len() });
        }
        index.iter().try_fold(0usize, |acc, &i| {
            if (1..=self.h).contains(&i) {
                Ok(acc * self.h + i - 1)
            } else {
                Err(Error::OutOfRange(format!("index {i} outside 1..={}", self.h)))
            }
        })
    }

    pub fn get(&self, index: &[usize]) -> Result<&PointSet> {
        Ok(&self.sets[self.flat(index)?])
    }

    /// All indices of `[h]^k` in storage order.
    pub fn indices(&self) -> Vec<Vec<usize>> {
        box_indices(&vec![(1, self.h); self.k])
    }

    pub fn sets(&self) -> &[PointSet] {
        &self.sets
    }

    pub fn total_points(&self) -> usize {
        self.sets.iter().map(|s| s.len()).sum()
    }

    /// Union of `P_I` over the index box `[i_1, j_1] x ... x [i_k, j_k]`.
    pub fn family_union(&self, ranges: &[(usize, usize)]) -> Result<PointSet> {
        if ranges.len() != self.k {
            return Err(Error::DimensionMismatch { expected: self.k, found: ranges.len() });
        }
        for &(i, j) in ranges {
            if i < 1 || i > j || j > self.h {
                return Err(Error::OutOfRange(format!("index range [{i}, {j}] not inside 1..={}", self.h)));
            }
        }
        let mut pts = Vec::new();
        for idx in box_indices(ranges) {
            pts.extend(self.get(&idx)?.points().iter().cloned());
        }
        PointSet::new(self.d, pts)
    }

    /// Runs the well-distribution check on every contiguous index box.
    pub fn verify(&self, eps: f64, mode: WdMode) -> Result<CwdReport> {
        let per_side = self.h * (self.h + 1) / 2;
        let count = per_side.checked_pow(self.k as u32).unwrap_or(usize::MAX);
        if count > MAX_UNIONS {
            return Err(Error::TooLarge(format!("{count} unions exceed {MAX_UNIONS}")));
        }
        let one_side: Vec<(usize, usize)> = (1..=self.h).flat_map(|i| (i..=self.h).map(move |j| (i, j))).collect();
        let mut combos: Vec<Vec<(usize, usize)>> = vec![Vec::new()];
        for _ in 0..self.k {
            combos = combos
                .into_iter()
                .flat_map(|c| {
                    one_side.iter().map(move |&r| {
                        let mut c = c.clone();
                        c.push(r);
                        c
                    })
                })
                .collect();
        }
        let mut unions = Vec::with_capacity(combos.len());
        for ranges in combos {
            let u = self.family_union(&ranges)?;
            let report = check_well_distributed(&u, eps, mode)?;
            unions.push((ranges, report));
        }
        let worst_epsilon = unions.iter().map(|(_, r)| r.epsilon_observed).fold(f64::INFINITY, f64::min);
        let all_passed = unions.iter().all(|(_, r)| r.passed);
        Ok(CwdReport { unions, worst_epsilon, all_passed })
    }

    /// Writes `manifest` (`h k d N`) and one point-set file per index.
    pub fn write_dir(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("manifest"), format!("{} {} {} {}\n", self.h, self.k, self.d, self.n))?;
        for idx in self.indices() {
            write_point_set(dir.join(set_file_name(&idx)), self.get(&idx)?)?;
        }
        Ok(())
    }

    pub fn read_dir(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let manifest = std::fs::read_to_string(dir.join("manifest"))?;
        let nums = manifest
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|e| Error::Parse(format!("manifest: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        let [h, k, d, n] = nums[..] else {
            return Err(Error::Parse(format!("manifest needs 4 fields, got {}", nums.len())));
        };
        let indices = box_indices(&vec![(1, h); k]);
        let sets = indices
            .iter()
            .map(|idx| read_point_set(dir.join(set_file_name(idx))))
            .collect::<Result<Vec<_>>>()?;
        Ok(CwdFamily { h, k, d, n, sets })
    }
}

pub fn set_file_name(index: &[usize]) -> String {
    let parts: Vec<String> = index.iter().map(|i| i.to_string()).collect();
    format!("P_{}.txt", parts.join("_"))
}

fn box_indices(ranges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    for &(i, j) in ranges {
        out = out.into_iter().flat_map(|p| (i..=j).map(move |x| [p.clone(), vec![x]].concat())).collect();
    }
    out
}

#[derive(Clone, Debug)]
pub struct CwdReport {
    pub unions: Vec<(Vec<(usize, usize)>, WdReport)>,
    /// Smallest observed epsilon over all unions.
    pub worst_epsilon: f64,
    pub all_passed: bool,
}
