//! Deterministic data-parallel reductions.
//!
//! Floating-point addition is not associative, so a naive parallel reduce
//! would make results depend on thread scheduling. Every reduction here
//! instead follows one fixed order regardless of backend:
//!
//! 1. split the index range into chunks of [`CHUNK`] items,
//! 2. accumulate each chunk sequentially in index order,
//! 3. combine the chunk results sequentially in chunk order.
//!
//! With the `parallel` feature (default) step 2 runs on the rayon pool;
//! without it everything is sequential. Both paths produce bitwise
//! identical results, which the tests check directly.
//!
//! The `_seq` variants are always compiled so benchmarks can compare the
//! two backends inside one binary.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Items per chunk. Fixed: changing it changes rounding, so it is part of
/// the determinism contract, not a tuning knob to expose.
pub const CHUNK: usize = 1024;

fn chunk_bounds(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n.div_ceil(CHUNK)).map(move |c| (c * CHUNK, ((c + 1) * CHUNK).min(n)))
}

/// Sum `f(i)` for `i` in `0..n` in the fixed chunked order.
pub fn sum_range<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    #[cfg(feature = "parallel")]
    {
        let partials: Vec<f64> = (0..n.div_ceil(CHUNK))
            .into_par_iter()
            .map(|c| {
                let lo = c * CHUNK;
                let hi = ((c + 1) * CHUNK).min(n);
                (lo..hi).map(&f).sum::<f64>()
            })
            .collect();
        partials.into_iter().sum()
    }
    #[cfg(not(feature = "parallel"))]
    {
        sum_range_seq(n, f)
    }
}

/// Sequential twin of [`sum_range`]; same chunked summation order.
pub fn sum_range_seq<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64,
{
    chunk_bounds(n)
        .map(|(lo, hi)| (lo..hi).map(&f).sum::<f64>())
        .sum()
}

/// Accumulate `dim`-length vectors: `f(i, acc)` adds item `i`'s
/// contribution into `acc`. Chunk-local accumulators are combined in
/// chunk order, component-wise.
pub fn accumulate_range<F>(n: usize, dim: usize, f: F) -> Vec<f64>
where
    F: Fn(usize, &mut [f64]) + Sync,
{
    #[cfg(feature = "parallel")]
    {
        let partials: Vec<Vec<f64>> = (0..n.div_ceil(CHUNK))
            .into_par_iter()
            .map(|c| {
                let lo = c * CHUNK;
                let hi = ((c + 1) * CHUNK).min(n);
                let mut acc = vec![0.0; dim];
                for i in lo..hi {
                    f(i, &mut acc);
                }
                acc
            })
            .collect();
        let mut out = vec![0.0; dim];
        for part in partials {
            for (o, p) in out.iter_mut().zip(&part) {
                *o += p;
            }
        }
        out
    }
    #[cfg(not(feature = "parallel"))]
    {
        accumulate_range_seq(n, dim, f)
    }
}

/// Sequential twin of [`accumulate_range`].
pub fn accumulate_range_seq<F>(n: usize, dim: usize, f: F) -> Vec<f64>
where
    F: Fn(usize, &mut [f64]),
{
    let mut out = vec![0.0; dim];
    for (lo, hi) in chunk_bounds(n) {
        let mut acc = vec![0.0; dim];
        for i in lo..hi {
            f(i, &mut acc);
        }
        for (o, p) in out.iter_mut().zip(&acc) {
            *o += p;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn backends_agree_bitwise_on_sums() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let xs: Vec<f64> = (0..10_000).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let f = |i: usize| (xs[i] * 1.7).sin() + xs[i] * xs[i];
        let a = sum_range(xs.len(), f);
        let b = sum_range_seq(xs.len(), f);
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn backends_agree_bitwise_on_accumulation() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let xs: Vec<f64> = (0..5000).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let f = |i: usize, acc: &mut [f64]| {
            acc[0] += xs[i];
            acc[1] += xs[i] * xs[i];
            acc[2] += (xs[i] * 0.3).cos();
        };
        let a = accumulate_range(xs.len(), 3, f);
        let b = accumulate_range_seq(xs.len(), 3, f);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn empty_and_partial_chunks() {
        assert_eq!(sum_range(0, |_| 1.0), 0.0);
        assert_eq!(sum_range(CHUNK + 7, |_| 1.0), (CHUNK + 7) as f64);
        assert_eq!(accumulate_range(0, 2, |_, _| ()), vec![0.0, 0.0]);
    }
}
