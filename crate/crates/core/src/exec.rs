//! Data-parallel helpers for lattice-ball sums.
//!
//! Every lattice sum in the crate maps a closure over an enumerated ball of
//! integer points and then folds the results *sequentially in enumeration
//! order*, so the parallel (default) and sequential builds produce bitwise
//! identical values.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `items`, in parallel when the `parallel` feature is on.
/// Output order always matches input order.
pub fn map_collect<I, T, F>(items: &[I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Sequential twin of [`map_collect`], kept for benchmark baselines.
pub fn map_collect_seq<I, T, F>(items: &[I], f: F) -> Vec<T>
where
    F: Fn(&I) -> T,
{
    items.iter().map(f).collect()
}

/// Enumerate integer points of the L-infinity ball of the given radius in
/// `dim` dimensions, lexicographically from (-r, ..., -r) to (r, ..., r).
/// All summations in the crate use this order.
pub fn ball(dim: usize, radius: i64) -> Vec<Vec<i64>> {
    let side = (2 * radius + 1) as usize;
    let total = side.pow(dim as u32);
    let mut out = Vec::with_capacity(total);
    let mut point = vec![-radius; dim];
    loop {
        out.push(point.clone());
        let mut i = dim;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if point[i] < radius {
                point[i] += 1;
                for p in point.iter_mut().skip(i + 1) {
                    *p = -radius;
                }
                break;
            }
        }
    }
}

/// Integer points with L-infinity norm in `(inner, outer]`.
pub fn shell(dim: usize, inner: i64, outer: i64) -> Vec<Vec<i64>> {
    ball(dim, outer)
        .into_iter()
        .filter(|p| p.iter().map(|x| x.abs()).max().unwrap_or(0) > inner)
        .collect()
}
