//! Query workloads shared by benchmarks and tests.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geom::{BoxD, NEG_INF};
use crate::lb::{sample_hard_query, RepDiagram};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QueryDist {
    /// Each two-sided range from two independent uniforms, reordered; upper
    /// bounds of the one-sided dimensions uniform.
    Uniform,
    /// The lower-bound distribution; needs `k = d - 1`.
    Hard,
}

impl fmt::Display for QueryDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QueryDist::Uniform => "uniform",
            QueryDist::Hard => "hard",
        })
    }
}

impl FromStr for QueryDist {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(QueryDist::Uniform),
            "hard" => Ok(QueryDist::Hard),
            _ => Err(Error::Parse(format!("unknown query distribution {s:?}"))),
        }
    }
}

/// Independent generator for query `query_id` of a run seeded with `seed`.
pub fn query_rng(seed: u64, query_id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(query_id);
    rng
}

pub fn uniform_query<R: Rng + ?Sized>(rng: &mut R, d: usize, k: usize) -> BoxD {
    let mut lo = vec![NEG_INF; d];
    let mut hi = vec![0.0; d];
    for i in 0..d {
        if i < k {
            let (a, b): (f64, f64) = (rng.gen(), rng.gen());
            lo[i] = a.min(b);
            hi[i] = a.max(b);
        } else {
            hi[i] = rng.gen();
        }
    }
    BoxD { lo, hi }
}

/// Samples a query of the given distribution for a `(d+k)`-sided structure of height `h`.
pub fn sample_query<R: Rng + ?Sized>(rng: &mut R, dist: QueryDist, d: usize, k: usize, h: u32) -> Result<BoxD> {
    match dist {
        QueryDist::Uniform => Ok(uniform_query(rng, d, k)),
        QueryDist::Hard => {
            if d < 2 || k + 1 != d {
                return Err(Error::InvalidParameter(format!("hard queries need d >= 2 and k = d - 1, got d={d}, k={k}")));
            }
            Ok(sample_hard_query(rng, &RepDiagram::new(h)?, d)?.to_box())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_independent_and_reproducible() {
        let a: f64 = query_rng(5, 1).gen();
        let b: f64 = query_rng(5, 1).gen();
        let c: f64 = query_rng(5, 2).gen();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn uniform_shape() {
        let mut rng = query_rng(1, 0);
        for _ in 0..100 {
            let q = uniform_query(&mut rng, 3, 2);
            assert!(q.lo[0] <= q.hi[0] && q.lo[1] <= q.hi[1]);
            assert_eq!(q.lo[2], NEG_INF);
        }
    }

    #[test]
    fn hard_needs_matching_k() {
        let mut rng = query_rng(1, 0);
        assert!(sample_query(&mut rng, QueryDist::Hard, 3, 1, 8).is_err());
        assert!(sample_query(&mut rng, QueryDist::Hard, 1, 0, 8).is_err());
        let q = sample_query(&mut rng, QueryDist::Hard, 2, 1, 8).unwrap();
        assert_eq!(q.dim(), 2);
        assert_eq!("hard".parse::<QueryDist>().unwrap(), QueryDist::Hard);
    }
}
