//! The three worked instances, with the smallest byte-aligned `d`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::instance::ProblemInstance;

/// `(N, s, d, demand offsets)`: user `j` demands `(j + o) mod N` for each offset `o`.
const WORKED: [(usize, usize, usize, &[usize]); 3] =
    [(5, 3, 16, &[3]), (4, 2, 24, &[2]), (7, 4, 16, &[4, 5])];

/// Worked example `1`, `2`, or `3`.
pub fn example(which: usize) -> Result<ProblemInstance> {
    let &(n, s, d, offsets) =
        which
            .checked_sub(1)
            .and_then(|i| WORKED.get(i))
            .ok_or(Error::Index {
                index: which,
                limit: WORKED.len() + 1,
            })?;
    let demands: BTreeMap<usize, Vec<usize>> = (0..n)
        .map(|j| (j, offsets.iter().map(|o| (j + o) % n).collect()))
        .collect();
    ProblemInstance::new(n, s, 0, d, Some(demands))
}
