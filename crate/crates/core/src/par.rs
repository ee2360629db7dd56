//! Index-parallel maps that collect in order, so downstream reductions see
//! the same sequence whatever the thread count.

use num_complex::Complex64;

#[cfg(feature = "parallel")]
pub(crate) fn map_range<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_range<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

pub(crate) fn map_slice<S, T, F>(items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    map_range(items.len(), |i| f(&items[i]))
}

/// Pairwise (cascade) summation.
pub fn pairwise_sum(xs: &[Complex64]) -> Complex64 {
    const LEAF: usize = 32;
    if xs.len() <= LEAF {
        return xs.iter().fold(Complex64::new(0.0, 0.0), |a, b| a + b);
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

pub fn pairwise_sum_real(xs: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum_real(&xs[..mid]) + pairwise_sum_real(&xs[mid..])
}
