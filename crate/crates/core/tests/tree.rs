mod common;

use mvba_core::tree::{NetworkTree, DEFAULT_LEAF_SIZE};
use mvba_core::{fault_threshold, NodeId};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn split_examples() {
    let t = NetworkTree::build(10, 4);
    assert_eq!(t.group(2).unwrap().size(), 5);
    assert_eq!(t.group(3).unwrap().size(), 5);
    let t = NetworkTree::build(7, 4);
    assert_eq!(t.group(2).unwrap().size(), 3);
    assert_eq!(t.group(3).unwrap().size(), 4);
    let t = NetworkTree::build(4, 4);
    assert!(t.is_leaf(1));
    assert!(t.group(2).is_none());
}

#[test]
fn one_level_of_recursion_at_eight() {
    let t = NetworkTree::build(8, DEFAULT_LEAF_SIZE);
    for slot in 0..8 {
        assert_eq!(t.chain(NodeId::from_slot(slot)).len(), 2);
    }
}

#[test]
fn good_chain_under_random_patterns() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for n in [4usize, 5, 8, 13, 16, 31, 32, 64] {
        let tree = NetworkTree::build(n, DEFAULT_LEAF_SIZE);
        let t = fault_threshold(n);
        for _ in 0..500 {
            let faulty = common::corruption::pattern(n, t, &mut rng);
            let chain = tree.good_chain(&faulty).expect("good chain");
            assert_eq!(chain[0], 1);
            assert!(tree.is_leaf(*chain.last().unwrap()));
        }
    }
}

proptest! {
    #[test]
    fn halves_partition_every_group(n in 1usize..200, leaf in 1usize..9) {
        let tree = NetworkTree::build(n, leaf);
        for (g, group) in tree.groups() {
            if tree.is_leaf(g) {
                prop_assert!(group.size() <= leaf);
                continue;
            }
            let (l, r) = (tree.group(2 * g).unwrap(), tree.group(2 * g + 1).unwrap());
            prop_assert_eq!(l.size(), group.size() / 2);
            prop_assert_eq!(l.size() + r.size(), group.size());
            let mut joined: Vec<NodeId> = l.members().iter().chain(r.members()).copied().collect();
            joined.sort();
            prop_assert_eq!(joined.as_slice(), group.members());
        }
    }

    #[test]
    fn chains_end_in_a_leaf_holding_the_node(n in 1usize..200, slot in any::<prop::sample::Index>()) {
        let tree = NetworkTree::build(n, DEFAULT_LEAF_SIZE);
        let id = NodeId::from_slot(slot.index(n));
        let chain = tree.chain(id);
        for &g in &chain {
            prop_assert!(tree.group(g).unwrap().contains(id));
        }
        prop_assert!(tree.is_leaf(*chain.last().unwrap()));
    }
}
