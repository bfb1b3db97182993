//! Block-seeded Monte-Carlo engine.
//!
//! The sample index space is split into fixed-size blocks; each block owns a
//! generator seeded from (seed, stream, block index), and per-block partial
//! results are reduced in block order. Output is therefore byte-identical
//! across worker counts, and identical whether the `parallel` feature is on
//! or off.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Number of sample indices handled by one generator block.
pub const BLOCK_SIZE: usize = 4096;

/// Named seed substreams; estimators that must be independent draw from
/// disjoint streams of the same user seed.
pub mod stream {
    pub const SAMPLE: u64 = 0;
    pub const ALPHA: u64 = 1;
    pub const BETA: u64 = 2;
    pub const SCORE_ALPHA_1: u64 = 3;
    pub const SCORE_ALPHA_2: u64 = 4;
    pub const SCORE_BETA: u64 = 5;
    pub const DIVERGENCE: u64 = 6;
    pub const NN_TRAIN: u64 = 7;
    pub const NN_TEST: u64 = 8;
    pub const POINTS: u64 = 9;
    pub const SCORE_VALUE: u64 = 10;
}

/// splitmix64 finalizer; used to stretch (seed, stream, block) into key bytes.
pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministic generator for one block of one substream.
pub fn block_rng(seed: u64, stream: u64, block: u64) -> ChaCha8Rng {
    let mut state = mix(seed ^ mix(stream ^ mix(block)));
    let mut key = [0u8; 32];
    for chunk in key.chunks_mut(8) {
        state = mix(state);
        chunk.copy_from_slice(&state.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// A Monte-Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanSe {
    pub mean: f64,
    pub std_error: f64,
    pub n: u64,
}

fn reduce_moments(partials: &[(f64, f64)], n: usize) -> MeanSe {
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for (s, s2) in partials {
        sum += s;
        sum_sq += s2;
    }
    let nf = n as f64;
    let mean = sum / nf;
    let std_error = if n > 1 {
        let var = ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0);
        (var / nf).sqrt()
    } else {
        0.0
    };
    MeanSe {
        mean,
        std_error,
        n: n as u64,
    }
}

fn n_blocks(n: usize) -> usize {
    n.div_ceil(BLOCK_SIZE)
}

fn block_len(n: usize, b: usize) -> usize {
    BLOCK_SIZE.min(n - b * BLOCK_SIZE)
}

/// Sequential mean of `f` over `n` indexed draws.
pub fn mc_mean_seq<F>(n: usize, seed: u64, stream: u64, f: F) -> MeanSe
where
    F: Fn(&mut ChaCha8Rng) -> f64,
{
    let partials: Vec<(f64, f64)> = (0..n_blocks(n))
        .map(|b| block_moments(n, seed, stream, b, &f))
        .collect();
    reduce_moments(&partials, n)
}

/// Parallel mean of `f` over `n` indexed draws; bit-identical to the
/// sequential path.
#[cfg(feature = "parallel")]
pub fn mc_mean_par<F>(n: usize, seed: u64, stream: u64, f: F) -> MeanSe
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let partials: Vec<(f64, f64)> = (0..n_blocks(n))
        .into_par_iter()
        .map(|b| block_moments(n, seed, stream, b, &f))
        .collect();
    reduce_moments(&partials, n)
}

fn block_moments<F>(n: usize, seed: u64, stream: u64, b: usize, f: &F) -> (f64, f64)
where
    F: Fn(&mut ChaCha8Rng) -> f64,
{
    let mut rng = block_rng(seed, stream, b as u64);
    let mut s = 0.0;
    let mut s2 = 0.0;
    for _ in 0..block_len(n, b) {
        let x = f(&mut rng);
        s += x;
        s2 += x * x;
    }
    (s, s2)
}

/// Mean of `f` over `n` draws; parallel when the feature is enabled.
pub fn mc_mean<F>(n: usize, seed: u64, stream: u64, f: F) -> MeanSe
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    #[cfg(feature = "parallel")]
    {
        mc_mean_par(n, seed, stream, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        mc_mean_seq(n, seed, stream, f)
    }
}

/// Generate `n` values, one per index, under the block-seeding contract.
pub fn generate_seq<T, F>(n: usize, seed: u64, stream: u64, f: F) -> Vec<T>
where
    F: Fn(&mut ChaCha8Rng) -> T,
{
    let mut out = Vec::with_capacity(n);
    for b in 0..n_blocks(n) {
        let mut rng = block_rng(seed, stream, b as u64);
        for _ in 0..block_len(n, b) {
            out.push(f(&mut rng));
        }
    }
    out
}

#[cfg(feature = "parallel")]
pub fn generate_par<T, F>(n: usize, seed: u64, stream: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng) -> T + Sync,
{
    let blocks: Vec<Vec<T>> = (0..n_blocks(n))
        .into_par_iter()
        .map(|b| {
            let mut rng = block_rng(seed, stream, b as u64);
            (0..block_len(n, b)).map(|_| f(&mut rng)).collect()
        })
        .collect();
    blocks.into_iter().flatten().collect()
}

pub fn generate<T, F>(n: usize, seed: u64, stream: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng) -> T + Sync,
{
    #[cfg(feature = "parallel")]
    {
        generate_par(n, seed, stream, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        generate_seq(n, seed, stream, f)
    }
}

/// Deterministic mean of `f` over a fixed slice: fixed-size chunks, partial
/// sums folded in chunk order. The common-random-number objective for the
/// Bayes-act search is built on this.
pub fn chunked_mean<T, F>(items: &[T], f: F) -> f64
where
    T: Sync,
    F: Fn(&T) -> f64 + Sync,
{
    chunked_mean_se(items, f).mean
}

pub fn chunked_mean_se<T, F>(items: &[T], f: F) -> MeanSe
where
    T: Sync,
    F: Fn(&T) -> f64 + Sync,
{
    let moments = |chunk: &[T]| {
        let mut s = 0.0;
        let mut s2 = 0.0;
        for it in chunk {
            let x = f(it);
            s += x;
            s2 += x * x;
        }
        (s, s2)
    };
    #[cfg(feature = "parallel")]
    let partials: Vec<(f64, f64)> = items.par_chunks(BLOCK_SIZE).map(moments).collect();
    #[cfg(not(feature = "parallel"))]
    let partials: Vec<(f64, f64)> = items.chunks(BLOCK_SIZE).map(moments).collect();
    reduce_moments(&partials, items.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn seq_and_default_paths_agree_bitwise() {
        let f = |rng: &mut ChaCha8Rng| rng.gen::<f64>();
        let n = 3 * BLOCK_SIZE + 17;
        let a = mc_mean_seq(n, 7, stream::BETA, f);
        let b = mc_mean(n, 7, stream::BETA, f);
        assert_eq!(a, b);
    }

    #[test]
    fn streams_are_disjoint() {
        let f = |rng: &mut ChaCha8Rng| rng.gen::<f64>();
        let a = mc_mean(1000, 7, stream::ALPHA, f);
        let b = mc_mean(1000, 7, stream::BETA, f);
        assert_ne!(a.mean, b.mean);
    }

    #[test]
    fn generate_matches_block_layout() {
        let n = BLOCK_SIZE + 3;
        let xs = generate(n, 1, stream::SAMPLE, |rng| rng.gen::<f64>());
        let ys = generate_seq(n, 1, stream::SAMPLE, |rng| rng.gen::<f64>());
        assert_eq!(xs, ys);
        assert_eq!(xs.len(), n);
    }

    #[test]
    fn chunked_mean_of_constant() {
        let items = vec![2.5_f64; 10_000];
        let m = chunked_mean_se(&items, |x| *x);
        assert_eq!(m.mean, 2.5);
        assert_eq!(m.std_error, 0.0);
    }
}
