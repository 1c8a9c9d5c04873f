#![allow(dead_code)]

use flatlab_core::Origami;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Connected origamis with at most `max_n` squares.
pub fn origami_strategy(max_n: usize) -> impl Strategy<Value = Origami> {
    (1usize..=max_n)
        .prop_flat_map(|n| {
            let id: Vec<usize> = (0..n).collect();
            (Just(id.clone()).prop_shuffle(), Just(id).prop_shuffle())
        })
        .prop_filter_map("connected", |(h, v)| Origami::new(h, v).ok())
}

pub fn random_origamis(seed: u64, count: usize, max_n: usize) -> Vec<Origami> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let n = rand::Rng::gen_range(&mut rng, 1..=max_n);
        let mut h: Vec<usize> = (0..n).collect();
        let mut v = h.clone();
        h.shuffle(&mut rng);
        v.shuffle(&mut rng);
        if let Ok(o) = Origami::new(h, v) {
            out.push(o);
        }
    }
    out
}

/// Number of permutations commuting with both `h` and `v`.
pub fn automorphism_count(o: &Origami) -> usize {
    let n = o.n();
    (0..n)
        .filter(|&j| {
            let mut sigma = vec![usize::MAX; n];
            sigma[0] = j;
            let mut stack = vec![0];
            while let Some(x) = stack.pop() {
                for p in [o.h(), o.v()] {
                    let (y, z) = (p[x], p[sigma[x]]);
                    if sigma[y] == usize::MAX {
                        sigma[y] = z;
                        stack.push(y);
                    } else if sigma[y] != z {
                        return false;
                    }
                }
            }
            true
        })
        .count()
}
