//! Seed handling and deterministic parallel Monte-Carlo.
//!
//! A job with seed `s` splits its `n` samples into fixed blocks of
//! [`BLOCK`] draws. Block `b` uses `ChaCha8Rng::seed_from_u64(s)` with
//! stream number `b`, so results do not depend on the worker count. Nested
//! jobs derive their seed from the parent with [`derive_seed`].

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub type Rng = ChaCha8Rng;

/// Samples per block; block boundaries never depend on the thread count.
pub const BLOCK: usize = 4096;

pub fn substream(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// SplitMix64 finalizer over `(seed, tag)`.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(0x6A09_E667_F3BC_C909);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Run `n` draws in blocks and fold the per-block results with a fixed
/// pairwise tree. `block` receives the block's RNG and its sample count.
pub fn run_blocks<T, F, M>(n: usize, seed: u64, block: F, merge: M) -> Option<T>
where
    T: Send,
    F: Fn(&mut Rng, usize) -> T + Sync,
    M: Fn(T, T) -> T + Sync,
{
    let nblocks = n.div_ceil(BLOCK);
    let parts: Vec<T> = (0..nblocks)
        .into_par_iter()
        .map(|b| {
            let count = BLOCK.min(n - b * BLOCK);
            let mut rng = substream(seed, b as u64);
            block(&mut rng, count)
        })
        .collect();
    pairwise_reduce(parts, &merge)
}

/// Deterministic balanced reduction: the tree shape depends only on `items.len()`.
pub fn pairwise_reduce<T, M>(mut items: Vec<T>, merge: &M) -> Option<T>
where
    M: Fn(T, T) -> T,
{
    while items.len() > 1 {
        let mut next = Vec::with_capacity(items.len().div_ceil(2));
        let mut it = items.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(merge(a, b)),
                None => next.push(a),
            }
        }
        items = next;
    }
    items.pop()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng as _;

    #[test]
    fn result_independent_of_thread_count() {
        let job = || {
            run_blocks(50_000, 9, |rng, k| (0..k).map(|_| rng.random::<f64>()).sum::<f64>(), |a, b| a + b).unwrap()
        };
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(job);
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap().install(job);
        assert_eq!(one.to_bits(), four.to_bits());
    }

    #[test]
    fn streams_differ() {
        let a: u64 = substream(1, 0).random();
        let b: u64 = substream(1, 1).random();
        assert_ne!(a, b);
        assert_ne!(derive_seed(1, 0), derive_seed(1, 1));
    }

    #[test]
    fn pairwise_reduce_shapes() {
        assert_eq!(pairwise_reduce(Vec::<i32>::new(), &|a, b| a + b), None);
        assert_eq!(pairwise_reduce(vec![1, 2, 3, 4, 5], &|a, b| a + b), Some(15));
        let order = pairwise_reduce(vec!["a".to_string(), "b".into(), "c".into()], &|a, b| format!("({a}{b})"));
        assert_eq!(order.unwrap(), "((ab)c)");
    }
}
