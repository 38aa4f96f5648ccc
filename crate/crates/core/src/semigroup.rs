//! Idempotent commutative semigroups used as point weights.
//!
//! Three semigroups ship with the crate. [`MaxReal`] and [`BitOr64`] are the
//! cheap ones used for storage and scaling runs. [`IdSet`] is the verification
//! instrument: the weight of a point is the singleton set of its id, so the
//! aggregate over any correct covering is exactly the id-set of the points in
//! the query.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};

/// Selector for the shipped semigroups.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SemigroupKind {
    MaxReal,
    BitOr64,
    IdSet,
}

impl SemigroupKind {
    pub const ALL: [SemigroupKind; 3] = [Self::MaxReal, Self::BitOr64, Self::IdSet];

    pub fn cli_name(self) -> &'static str {
        match self {
            Self::MaxReal => "max",
            Self::BitOr64 => "or",
            Self::IdSet => "idset",
        }
    }
}

impl fmt::Display for SemigroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.cli_name())
    }
}

impl FromStr for SemigroupKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max" | "MaxReal" => Ok(Self::MaxReal),
            "or" | "BitOr64" => Ok(Self::BitOr64),
            "idset" | "IdSet" => Ok(Self::IdSet),
            other => Err(Error::Parse(format!("unknown semigroup `{other}`"))),
        }
    }
}

/// An associative, commutative and idempotent binary operation.
///
/// There is no identity element; an empty aggregate is an error and query
/// answers over empty ranges carry no value at all.
pub trait Semigroup: Clone + Send + Sync {
    type Value: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn kind(&self) -> SemigroupKind;

    fn combine(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;

    /// Left fold of [`Semigroup::combine`] over a nonempty sequence.
    fn combine_all<'a, I>(&self, values: I) -> Result<Self::Value>
    where
        I: IntoIterator<Item = &'a Self::Value>,
        Self::Value: 'a,
    {
        let mut it = values.into_iter();
        let first = it.next().ok_or(Error::EmptyAggregate)?.clone();
        Ok(it.fold(first, |acc, v| self.combine(&acc, v)))
    }

    /// Canonical weight of the point with the given id.
    fn weight(&self, id: u32) -> Self::Value;

    /// An arbitrary value, used to exercise the semigroup laws.
    fn random_value<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Value;
}

/// Combine a nonempty sequence of values.
pub fn combine_all<S: Semigroup>(values: &[S::Value], sg: &S) -> Result<S::Value> {
    sg.combine_all(values.iter())
}

fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Maximum over the reals.
#[derive(Clone, Copy, Debug, Default)]
pub struct MaxReal;

impl Semigroup for MaxReal {
    type Value = f64;

    fn kind(&self) -> SemigroupKind {
        SemigroupKind::MaxReal
    }

    fn combine(&self, a: &f64, b: &f64) -> f64 {
        a.max(*b)
    }

    fn weight(&self, id: u32) -> f64 {
        (mix64(id as u64) >> 11) as f64 / (1u64 << 53) as f64
    }

    fn random_value<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        rng.gen_range(-1.0e6..1.0e6)
    }
}

/// Bitwise OR on 64-bit words.
#[derive(Clone, Copy, Debug, Default)]
pub struct BitOr64;

impl Semigroup for BitOr64 {
    type Value = u64;

    fn kind(&self) -> SemigroupKind {
        SemigroupKind::BitOr64
    }

    fn combine(&self, a: &u64, b: &u64) -> u64 {
        a | b
    }

    fn weight(&self, id: u32) -> u64 {
        1u64 << (mix64(id as u64) % 64)
    }

    fn random_value<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.gen()
    }
}

/// Union of sets of point ids.
#[derive(Clone, Copy, Debug, Default)]
pub struct IdSet;

impl Semigroup for IdSet {
    type Value = Ids;

    fn kind(&self) -> SemigroupKind {
        SemigroupKind::IdSet
    }

    fn combine(&self, a: &Ids, b: &Ids) -> Ids {
        let mut acc = IdsAccumulator::default();
        acc.add(a);
        acc.add(b);
        acc.finish()
    }

    fn combine_all<'a, I>(&self, values: I) -> Result<Ids>
    where
        I: IntoIterator<Item = &'a Ids>,
    {
        let mut acc = IdsAccumulator::default();
        let mut any = false;
        for v in values {
            acc.add(v);
            any = true;
        }
        if !any {
            return Err(Error::EmptyAggregate);
        }
        Ok(acc.finish())
    }

    fn weight(&self, id: u32) -> Ids {
        Ids::single(id)
    }

    fn random_value<R: Rng + ?Sized>(&self, rng: &mut R) -> Ids {
        let len = rng.gen_range(0..40);
        let span = if rng.gen_bool(0.5) { 64 } else { 4096 };
        (0..len).map(|_| rng.gen_range(0..span)).collect()
    }
}

#[derive(Clone, Debug)]
enum IdsRepr {
    Sparse(Vec<u32>),
    Dense(Vec<u64>),
}

/// A set of point ids.
///
/// Small or scattered sets are kept as a sorted list, dense ones as a bitset.
/// Equality is set equality regardless of representation.
#[derive(Clone, Debug)]
pub struct Ids(IdsRepr);

impl Ids {
    pub fn empty() -> Self {
        Ids(IdsRepr::Sparse(Vec::new()))
    }

    pub fn single(id: u32) -> Self {
        Ids(IdsRepr::Sparse(vec![id]))
    }

    fn from_sorted(ids: Vec<u32>) -> Self {
        let words = ids.last().map_or(0, |&m| m as usize / 64 + 1);
        if ids.len() >= 2 * words && words > 0 {
            let mut bits = vec![0u64; words];
            for id in ids {
                bits[id as usize / 64] |= 1 << (id % 64);
            }
            Ids(IdsRepr::Dense(bits))
        } else {
            Ids(IdsRepr::Sparse(ids))
        }
    }

    pub fn len(&self) -> usize {
        match &self.0 {
            IdsRepr::Sparse(v) => v.len(),
            IdsRepr::Dense(b) => b.iter().map(|w| w.count_ones() as usize).sum(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, id: u32) -> bool {
        match &self.0 {
            IdsRepr::Sparse(v) => v.binary_search(&id).is_ok(),
            IdsRepr::Dense(b) => b
                .get(id as usize / 64)
                .is_some_and(|w| w & (1 << (id % 64)) != 0),
        }
    }

    /// Ids in increasing order.
    pub fn iter(&self) -> Box<dyn Iterator<Item = u32> + '_> {
        match &self.0 {
            IdsRepr::Sparse(v) => Box::new(v.iter().copied()),
            IdsRepr::Dense(b) => Box::new(b.iter().enumerate().flat_map(|(wi, &w)| {
                (0..64u32).filter(move |bit| w & (1 << bit) != 0).map(move |bit| wi as u32 * 64 + bit)
            })),
        }
    }

    pub fn to_vec(&self) -> Vec<u32> {
        self.iter().collect()
    }

    pub fn is_subset(&self, other: &Ids) -> bool {
        self.iter().all(|id| other.contains(id))
    }
}

impl PartialEq for Ids {
    fn eq(&self, other: &Self) -> bool {
        self.iter().eq(other.iter())
    }
}

impl FromIterator<u32> for Ids {
    fn from_iter<T: IntoIterator<Item = u32>>(iter: T) -> Self {
        let mut v: Vec<u32> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Ids::from_sorted(v)
    }
}

#[derive(Default)]
struct IdsAccumulator {
    bits: Vec<u64>,
}

impl IdsAccumulator {
    fn add(&mut self, ids: &Ids) {
        match &ids.0 {
            IdsRepr::Sparse(v) => {
                if let Some(&m) = v.last() {
                    self.grow(m as usize / 64 + 1);
                }
                for &id in v {
                    self.bits[id as usize / 64] |= 1 << (id % 64);
                }
            }
            IdsRepr::Dense(b) => {
                self.grow(b.len());
                for (dst, src) in self.bits.iter_mut().zip(b) {
                    *dst |= src;
                }
            }
        }
    }

    fn grow(&mut self, words: usize) {
        if self.bits.len() < words {
            self.bits.resize(words, 0);
        }
    }

    fn finish(mut self) -> Ids {
        while self.bits.last() == Some(&0) {
            self.bits.pop();
        }
        let count: usize = self.bits.iter().map(|w| w.count_ones() as usize).sum();
        if count >= 2 * self.bits.len() {
            Ids(IdsRepr::Dense(self.bits))
        } else {
            let ids = Ids(IdsRepr::Dense(self.bits)).to_vec();
            Ids(IdsRepr::Sparse(ids))
        }
    }
}
