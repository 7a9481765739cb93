//! Compensated and deterministic blocked summation.
//!
//! All reductions that feed reported numbers go through [`NeumaierSum`] and,
//! when parallel, through [`blocked_sum`], whose result depends only on the
//! block size and never on how many worker threads ran.

use rayon::prelude::*;

/// Block length used by the grid kernels.
pub const BLOCK: usize = 64;

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl std::iter::FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = NeumaierSum::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Compensated sum of an iterator.
pub fn compensated<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<NeumaierSum>().value()
}

/// Sums `f(item)` over `items` in fixed blocks of [`BLOCK`].
///
/// Each block is accumulated with compensation, blocks may run on any worker,
/// and the block partials are reduced sequentially in block order.
pub fn blocked_sum<T, F>(items: &[T], f: F) -> f64
where
    T: Sync,
    F: Fn(&T, &mut NeumaierSum) + Sync,
{
    let partials: Vec<f64> = items
        .par_chunks(BLOCK)
        .map(|chunk| {
            let mut acc = NeumaierSum::new();
            for item in chunk {
                f(item, &mut acc);
            }
            acc.value()
        })
        .collect();
    compensated(partials)
}
