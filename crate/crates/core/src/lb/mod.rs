//! Geometric machinery of the lower-bound argument, made executable: the
//! representative diagram, the hard query distribution, subproblems and their
//! top boxes, sum placement and eligibility, and an exact minimum cover for
//! tiny instances.

mod diagram;
mod eligibility;
mod hard_query;
mod mincover;

pub use diagram::RepDiagram;
pub use eligibility::{eligible_sums, extension, is_eligible, place_sum, place_sum_deepest, Knowledge};
pub use hard_query::{lambda, sample_hard_query, subproblem, top_box, Check, HardDim, HardQuery, Subproblem, TopBox};
pub use mincover::{min_cover, MIN_COVER_LIMIT};

/// Default constant in the top-box size.
pub const DEFAULT_DELTA: f64 = 0.01;
