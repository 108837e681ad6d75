//! Ideal common coin / election oracle owned by the simulator.
//!
//! An instance fixes its value when the `threshold`-th activation from a node
//! that is honest at activation time arrives. The value is derived from
//! `SHA-256(seed | key)`, so distinct keys draw independent values and runs
//! are reproducible. Values are released to every activator, honest or not,
//! only after they are fixed.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use sha2::{Digest, Sha256};

use crate::machine::{CoinKey, CoinPurpose, CoinRequest};
use crate::types::NodeId;

#[derive(Debug, Default)]
struct Instance {
    honest: BTreeSet<NodeId>,
    waiting: Vec<NodeId>,
    value: Option<u32>,
}

#[derive(Debug)]
pub struct CoinOracle {
    seed: u64,
    instances: HashMap<CoinKey, Instance>,
    resolved: u64,
    resolved_elections: u64,
    by_group: BTreeMap<u32, u64>,
}

/// A coin value ready for delivery to `node`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoinRelease {
    pub node: NodeId,
    pub key: CoinKey,
    pub value: u32,
}

impl CoinOracle {
    pub fn new(seed: u64) -> Self {
        CoinOracle {
            seed,
            instances: HashMap::new(),
            resolved: 0,
            resolved_elections: 0,
            by_group: BTreeMap::new(),
        }
    }

    /// The value drawn for `key` over a range of `range` values, starting at
    /// 1 for elections and 0 for binary coins.
    pub fn draw(seed: u64, key: &CoinKey, range: u32) -> u32 {
        let mut h = Sha256::new();
        h.update(b"coin");
        h.update(seed.to_be_bytes());
        h.update([key.tag.mvba_id.len() as u8]);
        h.update(&key.tag.mvba_id);
        h.update(key.tag.group.to_be_bytes());
        h.update(format!("{:?}", key.tag.sub).as_bytes());
        match key.purpose {
            CoinPurpose::Election => h.update([0u8]),
            CoinPurpose::Binary(r) => {
                h.update([1u8]);
                h.update(r.to_be_bytes());
            }
        }
        let d = h.finalize();
        let x = u64::from_be_bytes(d[..8].try_into().unwrap());
        let v = (x % range as u64) as u32;
        match key.purpose {
            CoinPurpose::Election => v + 1,
            CoinPurpose::Binary(_) => v,
        }
    }

    /// Register an activation; returns every release it triggers.
    pub fn activate(&mut self, node: NodeId, honest: bool, req: &CoinRequest) -> Vec<CoinRelease> {
        let inst = self.instances.entry(req.key.clone()).or_default();
        if let Some(value) = inst.value {
            return vec![CoinRelease {
                node,
                key: req.key.clone(),
                value,
            }];
        }
        if !inst.waiting.contains(&node) {
            inst.waiting.push(node);
        }
        if honest {
            inst.honest.insert(node);
        }
        if inst.honest.len() < req.threshold {
            return Vec::new();
        }
        let value = Self::draw(self.seed, &req.key, req.range);
        inst.value = Some(value);
        self.resolved += 1;
        *self.by_group.entry(req.key.tag.group).or_default() += 1;
        if req.key.purpose == CoinPurpose::Election {
            self.resolved_elections += 1;
        }
        inst.waiting
            .drain(..)
            .map(|node| CoinRelease {
                node,
                key: req.key.clone(),
                value,
            })
            .collect()
    }

    /// Whether the value of `key` has been fixed.
    pub fn is_resolved(&self, key: &CoinKey) -> bool {
        self.instances.get(key).is_some_and(|i| i.value.is_some())
    }

    pub fn resolved(&self) -> u64 {
        self.resolved
    }

    pub fn resolved_elections(&self) -> u64 {
        self.resolved_elections
    }

    /// Resolved instances per tree group of the coin's tag.
    pub fn resolved_by_group(&self) -> &BTreeMap<u32, u64> {
        &self.by_group
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{ProtocolTag, Sub};
    use bytes::Bytes;

    fn req(r: u16, threshold: usize) -> CoinRequest {
        CoinRequest {
            key: CoinKey {
                tag: ProtocolTag::new(Bytes::from_static(b"c"), 1, Sub::Round(r)),
                purpose: CoinPurpose::Election,
            },
            threshold,
            range: 7,
        }
    }

    #[test]
    fn consistent_after_quorum() {
        let mut c = CoinOracle::new(9);
        let r = req(1, 2);
        assert!(c.activate(NodeId(1), true, &r).is_empty());
        let rel = c.activate(NodeId(2), true, &r);
        assert_eq!(rel.len(), 2);
        assert_eq!(rel[0].value, rel[1].value);
        let late = c.activate(NodeId(3), true, &r);
        assert_eq!(late[0].value, rel[0].value);
        assert!((1..=7).contains(&rel[0].value));
    }

    #[test]
    fn below_threshold_stays_pending() {
        let mut c = CoinOracle::new(9);
        let r = req(1, 3);
        assert!(c.activate(NodeId(1), true, &r).is_empty());
        assert!(c.activate(NodeId(2), true, &r).is_empty());
        // corrupted activations never count
        assert!(c.activate(NodeId(3), false, &r).is_empty());
        assert!(c.activate(NodeId(4), false, &r).is_empty());
        assert!(!c.is_resolved(&r.key));
        assert_eq!(c.resolved(), 0);
    }
}
