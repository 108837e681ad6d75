//! Recursive validated agreement over the network tree.
//!
//! A node takes part in every group on its root-to-leaf chain. The leaf
//! group runs the base-case agreement. Every inner level takes the value
//! agreed by the node's own half, disperses it to the other half, runs one
//! reliable agreement per half, and uses READY/FINISH rounds plus a biased
//! and a plain binary agreement per half to pick which half's value the
//! whole group outputs. A level's output feeds the parent; the root's output
//! is the decision.

use std::collections::BTreeSet;
use std::sync::Arc;

use bytes::Bytes;

use crate::aba::Aba;
use crate::abbba::Abbba;
use crate::base::BaseMvba;
use crate::machine::{CoinKey, CoinPurpose, Fact, Machine, Outbox};
use crate::rba::{Rba, RbaEvent};
use crate::shmdm::Shmdm;
use crate::tree::{Group, NetworkTree};
use crate::types::{layer_round, NodeId, Predicate, ProtocolTag, Sub};
use crate::wire::Payload;

#[derive(Clone, Debug)]
pub struct RmvbaParams {
    pub mvba_id: Bytes,
    pub predicate: Predicate,
}

/// One inner group on the node's chain.
#[derive(Debug)]
struct Level {
    group: Group,
    round: u8,
    /// The half holding this node.
    half: u8,
    predicate: Predicate,
    shmdm: [Shmdm; 2],
    rba: [Rba; 2],
    ready: [bool; 2],
    finish: [bool; 2],
    confirm: [bool; 2],
    ready_from: [BTreeSet<NodeId>; 2],
    finish_from: [BTreeSet<NodeId>; 2],
    abbba: [Abbba; 2],
    aba: [Aba; 2],
    bit_sent: [bool; 2],
    /// Index of the half currently being decided on.
    stage: usize,
    output: Option<Bytes>,
}

impl Level {
    fn new(me: NodeId, tree: &NetworkTree, g: u32, params: &RmvbaParams) -> Self {
        let group = tree.group(g).expect("group on chain").clone();
        let tag = |sub| ProtocolTag::new(params.mvba_id.clone(), g, sub);
        let halves = [
            tree.group(2 * g).unwrap().clone(),
            tree.group(2 * g + 1).unwrap().clone(),
        ];
        let shmdm = [0u8, 1].map(|l| Shmdm::new(tag(Sub::Subset(l)), &group, halves[l as usize].clone()));
        let rba = [0u8, 1].map(|l| Rba::new(tag(Sub::Subset(l)), group.clone(), me));
        let abbba = [0u16, 1].map(|e| Abbba::new(tag(Sub::Election(e)), group.clone()));
        let aba = [0u16, 1].map(|e| Aba::new(tag(Sub::Election(e)), group.clone()));
        Level {
            round: layer_round(g),
            half: tree.subset_of(g, me),
            predicate: params.predicate,
            group,
            shmdm,
            rba,
            ready: [false; 2],
            finish: [false; 2],
            confirm: [false; 2],
            ready_from: Default::default(),
            finish_from: Default::default(),
            abbba,
            aba,
            bit_sent: [false; 2],
            stage: 0,
            output: None,
        }
    }

    fn tag(&self) -> ProtocolTag {
        self.shmdm[0].tag().with_sub(Sub::None)
    }

    fn on_child_output(&mut self, z: Bytes, out: &mut Outbox) -> Option<Bytes> {
        let l = self.half as usize;
        if let Ok(Some(z)) = self.shmdm[l].input(z, out) {
            self.on_shmdm(l, z, out);
        }
        self.advance(out)
    }

    fn on_shmdm(&mut self, l: usize, z: Bytes, out: &mut Outbox) {
        if self.predicate.check(&z) {
            if let Ok(ev) = self.rba[l].input(z, out) {
                self.absorb(l, ev, out);
            }
        }
    }

    fn absorb(&mut self, l: usize, ev: Vec<RbaEvent>, out: &mut Outbox) {
        for e in ev {
            if e == RbaEvent::Vote(true) && !self.ready[l] {
                self.ready[l] = true;
                out.multicast(
                    self.group.members(),
                    &self.tag(),
                    Payload::TreeReady {
                        round: self.round,
                        subset: l as u8,
                    },
                );
            }
        }
    }

    fn handle(&mut self, from: NodeId, sub: Sub, payload: &Payload, out: &mut Outbox) -> Option<Bytes> {
        let quorum = self.group.size() - self.group.t();
        match (sub, payload) {
            (Sub::None, &Payload::TreeReady { round, subset }) if round == self.round && subset <= 1 => {
                let l = subset as usize;
                if self.ready_from[l].insert(from) && self.ready_from[l].len() >= quorum && !self.finish[l] {
                    self.finish[l] = true;
                    out.multicast(self.group.members(), &self.tag(), Payload::TreeFinish { round, subset });
                }
            }
            (Sub::None, &Payload::TreeFinish { round, subset }) if round == self.round && subset <= 1 => {
                let l = subset as usize;
                if self.finish_from[l].insert(from) && self.finish_from[l].len() >= quorum {
                    self.confirm[l] = true;
                }
            }
            (Sub::Subset(l), Payload::Initial(_)) if l <= 1 => {
                let l = l as usize;
                if let Some(z) = self.shmdm[l].handle(from, payload, out) {
                    self.on_shmdm(l, z, out);
                }
            }
            (Sub::Subset(l), _) if l <= 1 => {
                let l = l as usize;
                let ev = self.rba[l].handle(from, payload, out);
                self.absorb(l, ev, out);
            }
            (Sub::Election(e), &Payload::AbbaValue { a, b }) if e <= 1 => {
                self.abbba[e as usize].on_value(from, a, b, out);
            }
            (Sub::Election(e), _) if e <= 1 => {
                self.aba[e as usize].handle(from, payload, out);
            }
            _ => return None,
        }
        self.advance(out)
    }

    fn on_coin(&mut self, e: u16, round: u16, value: bool, out: &mut Outbox) -> Option<Bytes> {
        if e <= 1 {
            self.aba[e as usize].on_coin(round, value, out);
        }
        self.advance(out)
    }

    fn advance(&mut self, out: &mut Outbox) -> Option<Bytes> {
        if self.output.is_some() || !(self.confirm[0] || self.confirm[1]) {
            return None;
        }
        while self.stage < 2 {
            let e = self.stage;
            let _ = self.abbba[e].input(self.ready[e], self.finish[e], out);
            let bit = self.abbba[e].output()?;
            let _ = self.aba[e].input(bit, out);
            if self.aba[e].decided()? {
                if !self.bit_sent[e] {
                    self.bit_sent[e] = true;
                    let ev = self.rba[e].decision_bit(out);
                    self.absorb(e, ev, out);
                }
                if let Some(Some(v)) = self.rba[e].output() {
                    if self.predicate.check(v) {
                        let v = v.clone();
                        self.output = Some(v.clone());
                        return Some(v);
                    }
                } else if self.rba[e].output().is_none() {
                    return None;
                }
            }
            self.stage += 1;
        }
        None
    }
}

/// Per-node machine of the recursive protocol.
pub struct RmvbaNode {
    me: NodeId,
    params: RmvbaParams,
    chain: Vec<u32>,
    /// Inner levels, indexed like `chain` (the last chain entry is the leaf).
    levels: Vec<Level>,
    leaf: BaseMvba,
    /// Chain entries deeper than this index are cancelled.
    live_depth: usize,
    input: Bytes,
    decision: Option<Bytes>,
}

impl RmvbaNode {
    pub fn new(me: NodeId, tree: Arc<NetworkTree>, params: RmvbaParams, input: Bytes) -> Self {
        let chain = tree.chain(me);
        let leaf_g = *chain.last().unwrap();
        let levels = chain[..chain.len() - 1]
            .iter()
            .map(|&g| Level::new(me, &tree, g, &params))
            .collect();
        let leaf = BaseMvba::new(
            params.mvba_id.clone(),
            leaf_g,
            tree.group(leaf_g).unwrap().clone(),
            params.predicate,
        );
        RmvbaNode {
            me,
            live_depth: chain.len() - 1,
            chain,
            levels,
            leaf,
            params,
            input,
            decision: None,
        }
    }

    fn depth_of(&self, g: u32) -> Option<usize> {
        self.chain
            .iter()
            .position(|&x| x == g)
            .filter(|&d| d <= self.live_depth)
    }

    fn is_leaf_depth(&self, d: usize) -> bool {
        d + 1 == self.chain.len()
    }

    /// Output of the chain entry at depth `d` travels up the chain.
    fn level_output(&mut self, mut d: usize, mut v: Bytes, out: &mut Outbox) {
        loop {
            if self.live_depth > d {
                self.live_depth = d;
            }
            if d == 0 {
                if self.decision.is_none() {
                    self.decision = Some(v.clone());
                    out.fact(Fact::Decided { value: v });
                }
                return;
            }
            d -= 1;
            match self.levels[d].on_child_output(v, out) {
                Some(next) => v = next,
                None => return,
            }
        }
    }
}

impl Machine for RmvbaNode {
    fn start(&mut self, out: &mut Outbox) {
        let _ = self.leaf.input(self.input.clone(), out);
    }

    fn handle(&mut self, from: NodeId, tag: &ProtocolTag, payload: &Payload, out: &mut Outbox) {
        if tag.mvba_id != self.params.mvba_id || tag.layer_round != layer_round(tag.group) {
            return;
        }
        let Some(d) = self.depth_of(tag.group) else { return };
        let result = if self.is_leaf_depth(d) {
            match tag.sub {
                Sub::Member(pos) => self.leaf.handle(from, pos, payload, out),
                _ => None,
            }
        } else {
            if !self.levels[d].group.contains(from) {
                return;
            }
            self.levels[d].handle(from, tag.sub, payload, out)
        };
        if let Some(v) = result {
            self.level_output(d, v, out);
        }
    }

    fn on_coin(&mut self, key: &CoinKey, value: u32, out: &mut Outbox) {
        let CoinPurpose::Binary(round) = key.purpose else {
            return;
        };
        let Some(d) = self.depth_of(key.tag.group) else { return };
        let result = match key.tag.sub {
            Sub::Member(pos) if self.is_leaf_depth(d) => self.leaf.on_coin(pos, round, value == 1, out),
            Sub::Election(e) if !self.is_leaf_depth(d) => self.levels[d].on_coin(e, round, value == 1, out),
            _ => None,
        };
        if let Some(v) = result {
            self.level_output(d, v, out);
        }
    }

    fn decision(&self) -> Option<&Bytes> {
        self.decision.as_ref()
    }
}

impl std::fmt::Debug for RmvbaNode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RmvbaNode")
            .field("me", &self.me)
            .field("chain", &self.chain)
            .field("live_depth", &self.live_depth)
            .field("decided", &self.decision.is_some())
            .finish()
    }
}
