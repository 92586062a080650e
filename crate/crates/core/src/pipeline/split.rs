//! By-child splits: all sessions (and therefore all windows) of one child
//! land on exactly one side, so near-duplicate windows can never leak across
//! the train/test boundary.

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;

use crate::data::WritingSession;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub(super) struct ChildSplit {
    pub train: Vec<String>,
    pub val: Vec<String>,
    pub test: Vec<String>,
}

/// Unique child ids in cohort order.
pub(super) fn unique_children(cohort: &[WritingSession]) -> Vec<String> {
    let mut seen = Vec::new();
    for s in cohort {
        if !seen.contains(&s.meta.child_id) {
            seen.push(s.meta.child_id.clone());
        }
    }
    seen
}

/// Sessions belonging to the given children, in cohort order.
pub(super) fn sessions_of<'a>(
    cohort: &'a [WritingSession],
    children: &[String],
) -> Vec<&'a WritingSession> {
    cohort
        .iter()
        .filter(|s| children.contains(&s.meta.child_id))
        .collect()
}

/// Shuffles the unique children and cuts test/val/train groups. Test and
/// validation get at least one child each (rounded shares), the rest train.
pub(super) fn split_children(
    cohort: &[WritingSession],
    fracs: (f64, f64, f64),
    rng: &mut ChaCha8Rng,
) -> Result<ChildSplit> {
    let mut children = unique_children(cohort);
    let n = children.len();
    if n < 3 {
        return Err(Error::TooFewChildren {
            children: n,
            needed: 3,
        });
    }
    let (_, val_frac, test_frac) = fracs;
    let n_test = ((test_frac * n as f64).round() as usize).max(1);
    let n_val = ((val_frac * n as f64).round() as usize).max(1);
    if n_test + n_val >= n {
        return Err(Error::TooFewChildren {
            children: n,
            needed: n_test + n_val + 1,
        });
    }
    children.shuffle(rng);
    let test = children[..n_test].to_vec();
    let val = children[n_test..n_test + n_val].to_vec();
    let train = children[n_test + n_val..].to_vec();
    Ok(ChildSplit { train, val, test })
}
