//! Replicate fan-out with per-index seeds.
//!
//! Replicate `i` always draws from `path_rng(replicate_seed(seed, i))` and
//! results come back in index order, so output does not depend on how many
//! worker threads ran.

use rayon::prelude::*;

use crate::models::{path_rng, replicate_seed, PathRng};

/// Runs `f` once per replicate index and returns results in index order.
///
/// `f` also receives a scratch buffer that is reused within a worker.
pub fn map_replicates<T, F>(replicates: usize, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut PathRng, &mut Vec<f64>) -> T + Sync,
{
    (0..replicates)
        .into_par_iter()
        .map_init(Vec::new, |buf, i| {
            let mut rng = path_rng(replicate_seed(seed, i as u64));
            f(&mut rng, buf)
        })
        .collect()
}
