//! Range searching over idempotent semigroups with linear space on
//! well-distributed inputs, plus the tooling to probe the matching lower bound.

pub mod cwd;
pub mod dominance;
pub mod dyadic;
pub mod error;
pub mod geom;
pub mod grid;
pub mod ids;
mod kdtree;
pub mod lb;
pub mod pointgen;
pub mod semigroup;
pub mod workload;

pub use error::{Error, Result};
pub use geom::{box_contains_point, box_volume, BoxD, Point, PointSet, QueryAnswer, NEG_INF};
pub use semigroup::{BitOr64, Ids, IdSet, MaxReal, Semigroup, SemigroupKind};
pub use ids::{build_ids, IdsStructure};
pub use pointgen::{check_well_distributed, hammersley_wd, uniform_random, WdMode, WdReport};
