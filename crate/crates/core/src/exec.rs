//! Execution layer: data-parallel maps and deterministic reductions.
//!
//! With the `parallel` feature (default) work is spread over rayon's pool;
//! without it every helper runs sequentially. Reductions always use the same
//! pairwise tree, so serial and parallel runs agree bitwise.

use std::ops::Add;

use num_complex::Complex64;

/// Leaf size of the pairwise summation tree.
const LEAF: usize = 32;
/// Below this many terms a subtree is summed on the calling thread.
#[cfg(feature = "parallel")]
const SPLIT_MIN: usize = 1 << 13;

/// Values that can be accumulated by [`pairwise_sum_by`].
pub trait Summand: Copy + Send + Sync + Add<Output = Self> {
    const ZERO: Self;
}

impl Summand for f64 {
    const ZERO: Self = 0.0;
}

impl Summand for Complex64 {
    const ZERO: Self = Complex64::new(0.0, 0.0);
}

/// Pairwise (cascade) sum of `term(0) + ... + term(len - 1)`.
///
/// The split points depend only on `len`, never on the thread count.
pub fn pairwise_sum_by<T, F>(len: usize, term: F) -> T
where
    T: Summand,
    F: Fn(usize) -> T + Sync,
{
    sum_range(0, len, &term)
}

/// Pairwise sum of a slice.
pub fn pairwise_sum<T: Summand>(values: &[T]) -> T {
    pairwise_sum_by(values.len(), |i| values[i])
}

fn sum_range<T, F>(lo: usize, hi: usize, term: &F) -> T
where
    T: Summand,
    F: Fn(usize) -> T + Sync,
{
    let len = hi - lo;
    if len <= LEAF {
        let mut acc = T::ZERO;
        for i in lo..hi {
            acc = acc + term(i);
        }
        return acc;
    }
    let mid = lo + len / 2;
    #[cfg(feature = "parallel")]
    {
        if len >= SPLIT_MIN {
            let (a, b) = rayon::join(|| sum_range(lo, mid, term), || sum_range(mid, hi, term));
            return a + b;
        }
    }
    sum_range(lo, mid, term) + sum_range(mid, hi, term)
}

/// Order-preserving map over a slice.
pub fn map<I, T, F>(items: &[I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Order-preserving fallible map; the first error in input order wins.
pub fn try_map<I, T, E, F>(items: &[I], f: F) -> Result<Vec<T>, E>
where
    I: Sync,
    T: Send,
    E: Send,
    F: Fn(&I) -> Result<T, E> + Sync + Send,
{
    map(items, f).into_iter().collect()
}

/// Order-preserving map over `0..len`.
pub fn map_indices<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..len).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).map(f).collect()
    }
}

/// Runs two closures, potentially in parallel.
pub fn join<A, B, RA, RB>(a: A, b: B) -> (RA, RB)
where
    A: FnOnce() -> RA + Send,
    B: FnOnce() -> RB + Send,
    RA: Send,
    RB: Send,
{
    #[cfg(feature = "parallel")]
    {
        rayon::join(a, b)
    }
    #[cfg(not(feature = "parallel"))]
    {
        (a(), b())
    }
}

/// Runs `f` on a dedicated pool of `threads` workers.
///
/// Without the `parallel` feature this simply calls `f`.
pub fn with_threads<R, F>(threads: usize, f: F) -> R
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    #[cfg(feature = "parallel")]
    {
        match rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build()
        {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        f()
    }
}

/// Caps the global pool. Returns false if the pool was already initialised.
pub fn init_global_threads(threads: usize) -> bool {
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build_global()
            .is_ok()
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        true
    }
}

/// Number of workers the current pool uses.
pub fn current_threads() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}
