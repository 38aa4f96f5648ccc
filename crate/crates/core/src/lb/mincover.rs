use crate::error::{Error, Result};

/// Largest number of targets, and of usable sums, the exact search accepts.
pub const MIN_COVER_LIMIT: usize = 20;

/// Smallest number of stored sums plus singletons whose union is exactly
/// `targets`. A sum holding any point outside `targets` cannot be used.
pub fn min_cover(targets: &[u32], sums: &[Vec<u32>]) -> Result<usize> {
    let t = targets.len();
    if t > MIN_COVER_LIMIT {
        return Err(Error::TooLarge(format!("{t} targets exceed {MIN_COVER_LIMIT}")));
    }
    let bit = |id: u32| targets.iter().position(|&x| x == id);
    let mut masks: Vec<u32> = sums
        .iter()
        .filter_map(|s| s.iter().try_fold(0u32, |m, &id| bit(id).map(|b| m | 1 << b)))
        .filter(|&m| m != 0)
        .collect();
    masks.sort_unstable();
    masks.dedup();
    if masks.len() > MIN_COVER_LIMIT {
        return Err(Error::TooLarge(format!("{} usable sums exceed {MIN_COVER_LIMIT}", masks.len())));
    }
    let mut best = t;
    for subset in 1u32..1 << masks.len() {
        let used = subset.count_ones() as usize;
        if used >= best {
            continue;
        }
        let covered = (0..masks.len()).filter(|&i| subset >> i & 1 == 1).fold(0u32, |c, i| c | masks[i]);
        best = best.min(used + t - covered.count_ones() as usize);
    }
    Ok(best)
}
