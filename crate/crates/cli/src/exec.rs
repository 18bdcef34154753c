use std::ops::Range;

use rayon::prelude::*;
use spiral_erw_core::stats::Executor;

/// Fans jobs out over the global rayon pool; results keep index order.
#[derive(Debug, Clone, Copy, Default)]
pub struct Rayon;

impl Executor for Rayon {
    fn map_indices<T, F>(&self, range: Range<u64>, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        range.into_par_iter().map(job).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use spiral_erw_core::stats::Sequential;

    #[test]
    fn matches_sequential_order() {
        let f = |i: u64| i * i + 1;
        assert_eq!(Rayon.map_indices(3..200, f), Sequential.map_indices(3..200, f));
    }
}
