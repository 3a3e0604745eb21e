#![allow(dead_code)]

use bsm_core::Instance;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Every nonempty subset of `{1..=width}` as a distinct instance, with
/// every target from 1 to one past its total.
pub fn exhaustive_distinct(width: u64) -> Vec<Instance> {
    let mut out = Vec::new();
    for mask in 1u32..1 << width {
        let elems: Vec<u64> = (1..=width).filter(|v| mask >> (v - 1) & 1 == 1).collect();
        let total: u64 = elems.iter().sum();
        for t in 1..=total + 1 {
            out.push(Instance::new(elems.clone(), t).unwrap());
        }
    }
    out
}

/// `count` instances with `1 ≤ n ≤ max_n`, elements in `[1, max_elem]`
/// (duplicates allowed), targets uniform in `[1, Σ + 1]`.
pub fn random_small(seed: u64, count: usize, max_n: usize, max_elem: u64) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(1..=max_n);
            let elems: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=max_elem)).collect();
            let total: u64 = elems.iter().sum();
            Instance::new(elems, rng.gen_range(1..=total + 1)).unwrap()
        })
        .collect()
}

/// Instances with `n ≤ max_n` and element bit-lengths up to `max_bits`;
/// half of them draw from a narrow pool to force duplicates, half the
/// targets are planted subset sums.
pub fn random_wide(seed: u64, count: usize, max_n: usize, max_bits: u32) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let n = rng.gen_range(1..=max_n);
            let bits = rng.gen_range(1..=max_bits);
            let max = (1u64 << bits) - 1;
            let pool = if i % 2 == 0 { max.min(n as u64 / 2 + 1) } else { max };
            let elems: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=pool)).collect();
            let total: u64 = elems.iter().sum();
            let t = if rng.gen_bool(0.5) {
                elems.iter().filter(|_| rng.gen_bool(0.5)).sum::<u64>().max(1)
            } else {
                rng.gen_range(1..=total + 1)
            };
            Instance::new(elems, t).unwrap()
        })
        .collect()
}

/// Dense distinct instances: `n` distinct values below `2^bits`, planted
/// target.
pub fn dense_distinct(seed: u64, n: usize, bits: u32) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max = (1usize << bits) - 1;
    let elems: Vec<u64> = rand::seq::index::sample(&mut rng, max, n).into_iter().map(|i| i as u64 + 1).collect();
    let t = loop {
        let t: u64 = elems.iter().filter(|_| rng.gen_bool(0.5)).sum();
        if t > 0 {
            break t;
        }
    };
    Instance::new(elems, t).unwrap()
}
