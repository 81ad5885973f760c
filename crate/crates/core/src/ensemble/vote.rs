use crate::tree::argmax_lowest;

/// Plurality class among `votes`; ties go to the lowest class index.
///
/// # Panics
///
/// If a vote is not below `n_classes`.
pub fn majority_vote<I: IntoIterator<Item = usize>>(votes: I, n_classes: usize) -> usize {
    let mut tally = vec![0u64; n_classes];
    for v in votes {
        tally[v] += 1;
    }
    argmax_lowest(&tally)
}
