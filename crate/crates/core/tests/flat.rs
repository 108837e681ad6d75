use mvba_core::harness::{simulate, Protocol, Scenario};
use mvba_core::netsim::{AdversaryKind, SchedulerKind};

fn check(protocol: Protocol, sizes: &[usize], seeds: u64) {
    for &n in sizes {
        for adversary in AdversaryKind::ALL {
            for scheduler in SchedulerKind::ALL {
                for seed in 0..seeds {
                    let s = Scenario {
                        adversary,
                        scheduler,
                        ..Scenario::new(protocol, n, protocol.max_faults(n), 48)
                    };
                    let o = simulate(&s, seed, false).unwrap();
                    let m = &o.metrics;
                    let tag = format!("{protocol} n={n} {adversary:?} {scheduler:?} seed={seed}");
                    assert!(m.is_clean(), "{tag}: {:?}", m.violations);
                    assert_eq!(m.decided.len(), o.honest.len(), "{tag}");
                    let mut values = m.decided.values();
                    let first = values.next().unwrap();
                    assert!(values.all(|v| v == first), "{tag}");
                    assert!(m.election_rounds.unwrap() >= 1, "{tag}");
                }
            }
        }
    }
}

#[test]
fn rr_agrees_under_every_adversary() {
    check(Protocol::Rr, &[6, 11], 3);
}

#[test]
fn hash_agrees_under_every_adversary() {
    check(Protocol::Hash, &[4, 7, 10], 3);
}

#[test]
fn hash_with_short_digests() {
    for seed in 0..5 {
        let s = Scenario {
            kappa: Some(64),
            adversary: AdversaryKind::ForgeShares,
            ..Scenario::new(Protocol::Hash, 7, 2, 48)
        };
        assert!(simulate(&s, seed, false).unwrap().metrics.is_clean());
    }
}
