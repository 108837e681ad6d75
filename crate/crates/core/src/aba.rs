//! Binary Byzantine agreement with a common coin.
//!
//! Each round broadcasts the estimate (BVAL, relayed at `t+1`, accepted at
//! `2t+1`), then AUX with an accepted value, then CONF with the accepted set,
//! and finally asks the binary coin. A node that decides broadcasts TERM;
//! `t+1` matching TERMs let any node decide and `n−t` let it stop sending.
//! Decided nodes keep running rounds until they stop, so undecided nodes
//! always find their quorums.

use std::collections::{BTreeMap, BTreeSet};

use crate::machine::{CoinKey, CoinPurpose, Fact, Outbox, RepeatedInput};
use crate::tree::Group;
use crate::types::{NodeId, ProtocolTag};
use crate::wire::Payload;

#[derive(Clone, Debug, Default)]
struct RoundState {
    bval: [BTreeSet<NodeId>; 2],
    bval_sent: [bool; 2],
    /// Accepted values as a bitset.
    bin: u8,
    aux: BTreeMap<NodeId, u8>,
    aux_sent: bool,
    conf: BTreeMap<NodeId, u8>,
    conf_sent: bool,
    vals: Option<u8>,
}

#[derive(Clone, Debug)]
pub struct Aba {
    tag: ProtocolTag,
    group: Group,
    /// Current round; 0 before the input.
    round: u16,
    est: bool,
    input: Option<bool>,
    rounds: BTreeMap<u16, RoundState>,
    decided: Option<bool>,
    term_sent: bool,
    terms: [BTreeSet<NodeId>; 2],
    halted: bool,
}

impl Aba {
    pub fn new(tag: ProtocolTag, group: Group) -> Self {
        Aba {
            tag,
            group,
            round: 0,
            est: false,
            input: None,
            rounds: BTreeMap::new(),
            decided: None,
            term_sent: false,
            terms: [BTreeSet::new(), BTreeSet::new()],
            halted: false,
        }
    }

    pub fn tag(&self) -> &ProtocolTag {
        &self.tag
    }

    pub fn decided(&self) -> Option<bool> {
        self.decided
    }

    pub fn has_input(&self) -> bool {
        self.input.is_some()
    }

    pub fn round(&self) -> u16 {
        self.round
    }

    pub fn halted(&self) -> bool {
        self.halted
    }

    pub fn coin_key(&self, round: u16) -> CoinKey {
        CoinKey {
            tag: self.tag.clone(),
            purpose: CoinPurpose::Binary(round),
        }
    }

    /// Provide the local bit; returns a decision made as a consequence.
    pub fn input(&mut self, bit: bool, out: &mut Outbox) -> Result<Option<bool>, RepeatedInput> {
        if self.input.is_some() {
            return Err(RepeatedInput);
        }
        let before = self.decided;
        self.input = Some(bit);
        self.est = bit;
        out.fact(Fact::AbaInput {
            tag: self.tag.clone(),
            bit,
        });
        self.enter_round(1, out);
        Ok(self.newly(before))
    }

    /// Handle one of this instance's frames; returns a new decision.
    pub fn handle(&mut self, from: NodeId, payload: &Payload, out: &mut Outbox) -> Option<bool> {
        if !self.group.contains(from) {
            return None;
        }
        let before = self.decided;
        match *payload {
            Payload::AbaBval { round, value } if value <= 1 && round >= 1 => {
                let b = value as usize;
                let t = self.group.t();
                let rs = self.rounds.entry(round).or_default();
                if !rs.bval[b].insert(from) {
                    return None;
                }
                let count = rs.bval[b].len();
                if count > 2 * t {
                    rs.bin |= 1 << b;
                }
                if count > t && self.round >= round {
                    self.send_bval(round, b, out);
                }
                self.progress(out);
            }
            Payload::AbaAux { round, value } if value <= 1 && round >= 1 => {
                self.rounds.entry(round).or_default().aux.entry(from).or_insert(value);
                self.progress(out);
            }
            Payload::AbaConf { round, values } if (1..=3).contains(&values) && round >= 1 => {
                self.rounds.entry(round).or_default().conf.entry(from).or_insert(values);
                self.progress(out);
            }
            Payload::AbaTerm { value } if value <= 1 => {
                let b = value as usize;
                self.terms[b].insert(from);
                if self.terms[b].len() > self.group.t() {
                    self.decide(b == 1, out);
                }
                self.check_halt();
            }
            _ => {}
        }
        self.newly(before)
    }

    /// Deliver the binary coin of `round`.
    pub fn on_coin(&mut self, round: u16, coin: bool, out: &mut Outbox) -> Option<bool> {
        if round != self.round || self.halted {
            return None;
        }
        let vals = self.rounds.get(&round).and_then(|rs| rs.vals)?;
        let before = self.decided;
        match vals {
            1 | 2 => {
                let b = vals == 2;
                if b == coin {
                    self.decide(b, out);
                }
                self.est = b;
            }
            _ => self.est = coin,
        }
        if !self.halted {
            self.enter_round(round + 1, out);
        }
        self.newly(before)
    }

    fn newly(&self, before: Option<bool>) -> Option<bool> {
        if before.is_none() {
            self.decided
        } else {
            None
        }
    }

    fn broadcast(&self, payload: Payload, out: &mut Outbox) {
        if !self.halted {
            out.multicast(self.group.members(), &self.tag, payload);
        }
    }

    fn send_bval(&mut self, round: u16, b: usize, out: &mut Outbox) {
        let rs = self.rounds.entry(round).or_default();
        if rs.bval_sent[b] {
            return;
        }
        rs.bval_sent[b] = true;
        self.broadcast(Payload::AbaBval { round, value: b as u8 }, out);
    }

    fn enter_round(&mut self, round: u16, out: &mut Outbox) {
        self.round = round;
        self.send_bval(round, self.est as usize, out);
        let t = self.group.t();
        for b in 0..2 {
            if self.rounds[&round].bval[b].len() > t {
                self.send_bval(round, b, out);
            }
        }
        self.progress(out);
    }

    fn progress(&mut self, out: &mut Outbox) {
        if self.halted || self.round == 0 {
            return;
        }
        let r = self.round;
        let quorum = self.group.size() - self.group.t();
        let est = self.est as u8;
        let rs = self.rounds.entry(r).or_default();
        let mut sends = Vec::new();
        let mut coin = false;
        if !rs.aux_sent && rs.bin != 0 {
            let v = if rs.bin & (1 << est) != 0 { est } else { 1 - est };
            rs.aux_sent = true;
            sends.push(Payload::AbaAux { round: r, value: v });
        }
        if rs.aux_sent && !rs.conf_sent {
            let bin = rs.bin;
            let support = rs.aux.values().filter(|&&v| bin & (1 << v) != 0).count();
            if support >= quorum {
                rs.conf_sent = true;
                sends.push(Payload::AbaConf { round: r, values: bin });
            }
        }
        if rs.conf_sent && rs.vals.is_none() {
            let bin = rs.bin;
            let mut union = 0u8;
            let mut count = 0;
            for &v in rs.conf.values() {
                if v & !bin == 0 {
                    union |= v;
                    count += 1;
                }
            }
            if count >= quorum {
                rs.vals = Some(union);
                coin = true;
            }
        }
        for p in sends {
            self.broadcast(p, out);
        }
        if coin {
            out.coin(self.coin_key(r), self.group.t() + 1, 2);
        }
    }

    fn decide(&mut self, b: bool, out: &mut Outbox) {
        if self.decided.is_some() {
            return;
        }
        self.decided = Some(b);
        out.fact(Fact::AbaDecided {
            tag: self.tag.clone(),
            bit: b,
        });
        if !self.term_sent {
            self.term_sent = true;
            self.broadcast(Payload::AbaTerm { value: b as u8 }, out);
        }
        self.check_halt();
    }

    fn check_halt(&mut self) {
        if let Some(b) = self.decided {
            if self.terms[b as usize].len() >= self.group.size() - self.group.t() {
                self.halted = true;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coin::CoinOracle;
    use bytes::Bytes;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Random-order delivery among `n` honest nodes; coins are released on request.
    fn run(inputs: &[bool], seed: u64) -> Vec<Option<bool>> {
        let n = inputs.len();
        let group = Group::all(n);
        let tag = ProtocolTag::new(Bytes::from_static(b"aba"), 1, crate::types::Sub::None);
        let mut nodes: Vec<Aba> = (0..n).map(|_| Aba::new(tag.clone(), group.clone())).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut queue: Vec<(NodeId, NodeId, Payload)> = Vec::new();
        let mut coins: Vec<(NodeId, u16)> = Vec::new();
        let flush = |me: NodeId, out: Outbox, queue: &mut Vec<_>, coins: &mut Vec<_>| {
            for (to, _, p) in out.network {
                queue.push((me, to, p));
            }
            for c in out.coins {
                if let CoinPurpose::Binary(r) = c.key.purpose {
                    coins.push((me, r));
                }
            }
        };
        for (i, &b) in inputs.iter().enumerate() {
            let me = NodeId::from_slot(i);
            let mut out = Outbox::new(me);
            nodes[i].input(b, &mut out).unwrap();
            while let Some((_, p)) = out.next_local() {
                nodes[i].handle(me, &p, &mut out);
            }
            flush(me, out, &mut queue, &mut coins);
        }
        let mut steps = 0;
        while (!queue.is_empty() || !coins.is_empty()) && steps < 200_000 {
            steps += 1;
            let mut out;
            let me;
            if !coins.is_empty() && rng.gen_bool(0.2) {
                let (node, r) = coins.swap_remove(rng.gen_range(0..coins.len()));
                me = node;
                out = Outbox::new(me);
                let key = nodes[me.slot()].coin_key(r);
                let v = CoinOracle::draw(seed, &key, 2) == 1;
                nodes[me.slot()].on_coin(r, v, &mut out);
            } else if !queue.is_empty() {
                let (from, to, p) = queue.swap_remove(rng.gen_range(0..queue.len()));
                me = to;
                out = Outbox::new(me);
                nodes[me.slot()].handle(from, &p, &mut out);
            } else {
                continue;
            }
            while let Some((_, p)) = out.next_local() {
                nodes[me.slot()].handle(me, &p, &mut out);
            }
            flush(me, out, &mut queue, &mut coins);
        }
        nodes.iter().map(|a| a.decided()).collect()
    }

    #[test]
    fn unanimous_inputs_decide_that_value() {
        for seed in 0..20 {
            for b in [false, true] {
                let d = run(&[b; 7], seed);
                assert!(d.iter().all(|x| *x == Some(b)), "seed {seed}: {d:?}");
            }
        }
    }

    #[test]
    fn mixed_inputs_agree() {
        for seed in 0..40 {
            let inputs: Vec<bool> = (0..10).map(|i| (i + seed) % 3 == 0).collect();
            let d = run(&inputs, seed as u64);
            assert!(d[0].is_some(), "seed {seed}: {d:?}");
            assert!(d.iter().all(|x| *x == d[0]), "seed {seed}: {d:?}");
        }
    }

    #[test]
    fn repeated_input_rejected() {
        let tag = ProtocolTag::new(Bytes::from_static(b"aba"), 1, crate::types::Sub::None);
        let mut a = Aba::new(tag, Group::all(4));
        let mut out = Outbox::new(NodeId(1));
        a.input(true, &mut out).unwrap();
        assert_eq!(a.input(true, &mut out), Err(RepeatedInput));
    }
}
