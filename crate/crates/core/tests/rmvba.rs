use std::sync::Arc;

use bytes::Bytes;
use mvba_core::netsim::{self, AdversaryKind, SchedulerKind, SimConfig};
use mvba_core::rmvba::{RmvbaNode, RmvbaParams};
use mvba_core::tree::{NetworkTree, DEFAULT_LEAF_SIZE};
use mvba_core::types::MAGIC_SUFFIX;
use mvba_core::{NodeId, Predicate};

fn inputs(n: usize, len: usize, seed: u64) -> Vec<Bytes> {
    (0..n)
        .map(|i| {
            let mut v: Vec<u8> = (0..len).map(|k| (k as u64 * 7 + i as u64 * 13 + seed) as u8).collect();
            v.extend_from_slice(&MAGIC_SUFFIX);
            Bytes::from(v)
        })
        .collect()
}

fn run(n: usize, t: usize, seed: u64, adversary: AdversaryKind, scheduler: SchedulerKind) -> netsim::RunOutcome {
    let tree = Arc::new(NetworkTree::build(n, DEFAULT_LEAF_SIZE));
    let params = RmvbaParams {
        mvba_id: Bytes::from_static(b"test"),
        predicate: Predicate::MagicSuffix,
    };
    let factory = move |id: NodeId, w: Bytes| {
        Box::new(RmvbaNode::new(id, tree.clone(), params.clone(), w)) as Box<dyn mvba_core::machine::Machine>
    };
    let mut cfg = SimConfig::new(n, t, seed);
    cfg.adversary = adversary;
    cfg.scheduler = scheduler;
    netsim::run(&cfg, &inputs(n, 32, seed), &factory).unwrap()
}

#[test]
fn honest_runs_agree() {
    for n in [4usize, 7, 10, 16, 25] {
        for seed in 0..5 {
            let o = run(n, (n - 1) / 3, seed, AdversaryKind::None, SchedulerKind::Random);
            assert!(o.metrics.is_clean(), "n={n} seed={seed}: {:?}", o.metrics.violations);
            assert_eq!(o.metrics.decided.len(), n);
            let first = o.metrics.decided.values().next().unwrap();
            assert!(o.metrics.decided.values().all(|v| v == first));
        }
    }
}

#[test]
fn faulty_runs_agree() {
    for adv in AdversaryKind::ALL {
        for n in [7usize, 10, 16] {
            for seed in 0..4 {
                let o = run(n, (n - 1) / 3, seed, adv, SchedulerKind::Random);
                assert!(
                    o.metrics.is_clean(),
                    "{adv:?} n={n} seed={seed}: {:?}",
                    o.metrics.violations
                );
                let vals: Vec<_> = o.metrics.decided.values().collect();
                assert!(vals.windows(2).all(|w| w[0] == w[1]), "{adv:?} n={n} seed={seed}");
            }
        }
    }
}
