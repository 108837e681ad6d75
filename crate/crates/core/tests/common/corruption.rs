//! Corruption patterns for the tree audit.

use std::collections::BTreeSet;

use mvba_core::NodeId;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// A set of at most `t` nodes out of `n`: uniform, a contiguous block, or an
/// arithmetic stride, so that subtrees get both spread and clustered faults.
pub fn pattern(n: usize, t: usize, rng: &mut ChaCha8Rng) -> BTreeSet<NodeId> {
    let size = if rng.gen_bool(0.75) { t } else { rng.gen_range(0..=t) };
    let slots: Vec<usize> = match rng.gen_range(0..3) {
        0 => {
            let mut all: Vec<usize> = (0..n).collect();
            all.shuffle(rng);
            all.truncate(size);
            all
        }
        1 => {
            let start = rng.gen_range(0..n);
            (0..size).map(|i| (start + i) % n).collect()
        }
        _ => {
            let stride = rng.gen_range(1..=n.max(2) / 2);
            let start = rng.gen_range(0..n);
            let mut order: Vec<usize> = Vec::with_capacity(2 * n);
            order.extend((0..n).map(|k| (start + k * stride) % n));
            order.extend(0..n);
            let mut seen = BTreeSet::new();
            order.retain(|&s| seen.insert(s));
            order.truncate(size);
            order
        }
    };
    slots.into_iter().map(NodeId::from_slot).collect()
}
