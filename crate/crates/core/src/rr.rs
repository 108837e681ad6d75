//! Leader-based validated agreement for `n ≥ 5t+1` built on coded dispersal.
//!
//! Every node disperses its input with an `(n, t+1)` code. Once `2t+1`
//! nodes confirm that `n−t` dispersals completed, nodes run election rounds:
//! a common coin names a leader, everyone echoes its stored share of the
//! leader's value (or an explicit bottom), decodes a candidate from the first
//! `n−t` echoes, and a multivalued agreement built on one binary agreement
//! settles on the candidate or bottom.

use std::collections::{BTreeMap, BTreeSet};

use bytes::Bytes;

use crate::aba::Aba;
use crate::codec::{Codec, SymbolMap};
use crate::machine::{CoinKey, CoinPurpose, Fact, Machine, Outbox};
use crate::tree::Group;
use crate::types::{NodeId, Predicate, ProtocolTag, Sub};
use crate::wire::Payload;

#[derive(Clone, Debug)]
pub struct FlatParams {
    pub mvba_id: Bytes,
    pub n: usize,
    pub t: usize,
    pub predicate: Predicate,
    /// Commitment digest length in bits; only the hash variant uses it.
    pub kappa: usize,
}

impl FlatParams {
    pub fn group(&self) -> Group {
        Group::all(self.n).with_threshold(self.t)
    }

    pub fn tag(&self, sub: Sub) -> ProtocolTag {
        ProtocolTag::new(self.mvba_id.clone(), 1, sub)
    }
}

/// Dispersal of every node's input plus the completion handshake.
#[derive(Debug)]
pub struct AcdRr {
    group: Group,
    tag: ProtocolTag,
    codec: Codec,
    /// Share of each dealer's value held here.
    pub shares: BTreeMap<NodeId, Bytes>,
    votes: BTreeSet<NodeId>,
    election_sent: bool,
    elections: BTreeSet<NodeId>,
    confirm_sent: bool,
    confirms: BTreeSet<NodeId>,
    returned: bool,
}

impl AcdRr {
    pub fn new(params: &FlatParams) -> Self {
        AcdRr {
            group: params.group(),
            tag: params.tag(Sub::None),
            codec: Codec::new(params.n, params.t + 1).expect("network fits the code"),
            shares: BTreeMap::new(),
            votes: BTreeSet::new(),
            election_sent: false,
            elections: BTreeSet::new(),
            confirm_sent: false,
            confirms: BTreeSet::new(),
            returned: false,
        }
    }

    pub fn returned(&self) -> bool {
        self.returned
    }

    pub fn disperse(&mut self, w: &[u8], out: &mut Outbox) {
        let shares = self.codec.encode(w);
        for (p, &j) in self.group.members().iter().enumerate() {
            out.send(j, self.tag.clone(), Payload::Share(shares[p].clone()));
        }
    }

    /// Returns true when the dispersal phase returns.
    pub fn handle(&mut self, from: NodeId, payload: &Payload, out: &mut Outbox) -> bool {
        let n = self.group.size();
        let t = self.group.t();
        match payload {
            Payload::Share(y) => {
                if let std::collections::btree_map::Entry::Vacant(e) = self.shares.entry(from) {
                    e.insert(y.clone());
                    out.send(from, self.tag.clone(), Payload::Vote);
                }
            }
            Payload::Vote => {
                if self.votes.insert(from) && self.votes.len() >= n - t && !self.election_sent {
                    self.election_sent = true;
                    out.fact(Fact::AcdComplete);
                    out.multicast(self.group.members(), &self.tag, Payload::Election);
                }
            }
            Payload::Election => {
                if self.elections.insert(from) && self.elections.len() >= n - t {
                    self.send_confirm(out);
                }
            }
            Payload::Confirm if self.confirms.insert(from) => {
                if self.confirms.len() > t {
                    self.send_confirm(out);
                }
                if self.confirms.len() > 2 * t && !self.returned {
                    self.returned = true;
                    out.fact(Fact::AcdReturned);
                    return true;
                }
            }
            _ => {}
        }
        false
    }

    fn send_confirm(&mut self, out: &mut Outbox) {
        if !self.confirm_sent {
            self.confirm_sent = true;
            out.multicast(self.group.members(), &self.tag, Payload::Confirm);
        }
    }
}

/// Multivalued agreement on a candidate, reduced to one binary agreement.
#[derive(Debug)]
pub struct Mba {
    group: Group,
    tag: ProtocolTag,
    own: Option<Option<Bytes>>,
    val_from: BTreeSet<NodeId>,
    vals: Vec<(NodeId, Option<Bytes>)>,
    perhaps_sent: bool,
    perhaps_from: BTreeSet<NodeId>,
    perhaps: Vec<(NodeId, bool)>,
    pub aba: Aba,
    output: Option<Option<Bytes>>,
}

impl Mba {
    pub fn new(group: Group, tag: ProtocolTag) -> Self {
        Mba {
            aba: Aba::new(tag.clone(), group.clone()),
            group,
            tag,
            own: None,
            val_from: BTreeSet::new(),
            vals: Vec::new(),
            perhaps_sent: false,
            perhaps_from: BTreeSet::new(),
            perhaps: Vec::new(),
            output: None,
        }
    }

    pub fn output(&self) -> Option<&Option<Bytes>> {
        self.output.as_ref()
    }

    pub fn input(&mut self, v: Option<Bytes>, out: &mut Outbox) -> Option<Option<Bytes>> {
        if self.own.is_some() {
            return None;
        }
        self.own = Some(v.clone());
        out.multicast(self.group.members(), &self.tag, Payload::MbaValue(v));
        self.progress(out)
    }

    pub fn handle(&mut self, from: NodeId, payload: &Payload, out: &mut Outbox) -> Option<Option<Bytes>> {
        match payload {
            Payload::MbaValue(v) => {
                if self.val_from.insert(from) {
                    self.vals.push((from, v.clone()));
                }
            }
            Payload::MbaPerhaps(p) => {
                if self.perhaps_from.insert(from) {
                    self.perhaps.push((from, *p));
                }
            }
            _ => {
                self.aba.handle(from, payload, out);
            }
        }
        self.progress(out)
    }

    pub fn on_coin(&mut self, round: u16, value: bool, out: &mut Outbox) -> Option<Option<Bytes>> {
        self.aba.on_coin(round, value, out);
        self.progress(out)
    }

    fn progress(&mut self, out: &mut Outbox) -> Option<Option<Bytes>> {
        let n = self.group.size();
        let t = self.group.t();
        if !self.perhaps_sent && self.vals.len() >= n - t {
            if let Some(own) = &self.own {
                let p = own.as_ref().is_some_and(|v| {
                    self.vals[..n - t].iter().filter(|(_, x)| x.as_ref() == Some(v)).count() >= n - 2 * t
                });
                self.perhaps_sent = true;
                out.multicast(self.group.members(), &self.tag, Payload::MbaPerhaps(p));
            }
        }
        if !self.aba.has_input() && self.perhaps.len() >= n - t {
            let ones = self.perhaps[..n - t].iter().filter(|(_, p)| *p).count();
            let _ = self.aba.input(ones >= n - 2 * t, out);
        }
        if self.output.is_some() {
            return None;
        }
        let result = match self.aba.decided()? {
            false => None,
            true => Some(self.backed_value()?),
        };
        self.output = Some(result.clone());
        Some(result)
    }

    /// A value sent in VAL by `t+1` nodes that also sent PERHAPS(1).
    fn backed_value(&self) -> Option<Bytes> {
        let yes: BTreeSet<NodeId> = self.perhaps.iter().filter(|(_, p)| *p).map(|(j, _)| *j).collect();
        let mut counts: BTreeMap<&Bytes, usize> = BTreeMap::new();
        for (j, v) in &self.vals {
            if let Some(v) = v {
                if yes.contains(j) {
                    let c = counts.entry(v).or_default();
                    *c += 1;
                    if *c > self.group.t() {
                        return Some(v.clone());
                    }
                }
            }
        }
        None
    }
}

#[derive(Debug)]
struct RrRound {
    leader: Option<NodeId>,
    echo_from: BTreeSet<NodeId>,
    echoes: Vec<(NodeId, u16, Option<Bytes>)>,
    echo_sent: bool,
    candidate_done: bool,
    mba: Mba,
}

/// Per-node machine of the RR variant.
#[derive(Debug)]
pub struct RrNode {
    params: FlatParams,
    group: Group,
    codec: Codec,
    input: Bytes,
    acd: AcdRr,
    round: u16,
    rounds: BTreeMap<u16, RrRound>,
    decision: Option<Bytes>,
    decided_round: Option<u16>,
}

impl RrNode {
    pub fn new(params: FlatParams, input: Bytes) -> Self {
        RrNode {
            group: params.group(),
            codec: Codec::new(params.n, params.t + 1).expect("network fits the code"),
            acd: AcdRr::new(&params),
            params,
            input,
            round: 0,
            rounds: BTreeMap::new(),
            decision: None,
            decided_round: None,
        }
    }

    fn round_state(&mut self, r: u16) -> &mut RrRound {
        let group = self.group.clone();
        let tag = self.params.tag(Sub::Round(r));
        self.rounds.entry(r).or_insert_with(|| RrRound {
            leader: None,
            echo_from: BTreeSet::new(),
            echoes: Vec::new(),
            echo_sent: false,
            candidate_done: false,
            mba: Mba::new(group, tag),
        })
    }

    fn enter_round(&mut self, r: u16, out: &mut Outbox) {
        if r as usize > self.params.n {
            return;
        }
        self.round = r;
        self.round_state(r);
        out.coin(
            CoinKey {
                tag: self.params.tag(Sub::Round(r)),
                purpose: CoinPurpose::Election,
            },
            self.params.t + 1,
            self.params.n as u32,
        );
    }

    fn progress(&mut self, r: u16, out: &mut Outbox) {
        let n = self.params.n;
        let t = self.params.t;
        let share = |s: &Self, l: NodeId| s.acd.shares.get(&l).cloned();
        let active = r == self.round;
        let Some(leader) = self.rounds.get(&r).and_then(|x| x.leader) else {
            return;
        };
        let own_share = share(self, leader);
        let tag = self.params.tag(Sub::Round(r));
        let members = self.group.members().to_vec();
        let codec = self.codec.clone();
        let st = self.rounds.get_mut(&r).unwrap();
        if active && !st.echo_sent {
            st.echo_sent = true;
            out.multicast(
                &members,
                &tag,
                Payload::EchoShare {
                    leader: leader.0,
                    symbol: own_share,
                },
            );
        }
        let mut result = None;
        if st.echo_sent && !st.candidate_done {
            let matching: Vec<&(NodeId, u16, Option<Bytes>)> =
                st.echoes.iter().filter(|(_, l, _)| *l == leader.0).collect();
            if matching.len() >= n - t {
                st.candidate_done = true;
                let observed: SymbolMap = matching[..n - t]
                    .iter()
                    .filter_map(|(j, _, y)| y.as_ref().map(|y| (j.slot() + 1, y.clone())))
                    .collect();
                let candidate = codec.decode(&observed).ok();
                result = st.mba.input(candidate, out);
            }
        }
        if result.is_none() {
            result = st.mba.output().cloned().filter(|_| active);
        }
        if active {
            if let Some(v) = result {
                self.finish_round(r, v, out);
            }
        }
    }

    fn finish_round(&mut self, r: u16, v: Option<Bytes>, out: &mut Outbox) {
        if self.decision.is_some() || r != self.round {
            return;
        }
        match v {
            Some(v) if self.params.predicate.check(&v) => {
                self.decision = Some(v.clone());
                self.decided_round = Some(r);
                out.fact(Fact::Decided { value: v });
                out.fact(Fact::DecidedInRound { round: r });
            }
            _ => self.enter_round(r + 1, out),
        }
    }
}

impl Machine for RrNode {
    fn start(&mut self, out: &mut Outbox) {
        let w = self.input.clone();
        self.acd.disperse(&w, out);
    }

    fn handle(&mut self, from: NodeId, tag: &ProtocolTag, payload: &Payload, out: &mut Outbox) {
        if tag.mvba_id != self.params.mvba_id || tag.group != 1 || tag.layer_round != 1 || !self.group.contains(from) {
            return;
        }
        match tag.sub {
            Sub::None => {
                if self.acd.handle(from, payload, out) {
                    self.enter_round(1, out);
                }
            }
            Sub::Round(r) if r >= 1 && r as usize <= self.params.n => {
                let st = self.round_state(r);
                match payload {
                    Payload::EchoShare { leader, symbol } => {
                        if st.echo_from.insert(from) {
                            st.echoes.push((from, *leader, symbol.clone()));
                        }
                    }
                    _ => {
                        st.mba.handle(from, payload, out);
                    }
                }
                self.progress(r, out);
            }
            _ => {}
        }
    }

    fn on_coin(&mut self, key: &CoinKey, value: u32, out: &mut Outbox) {
        let Sub::Round(r) = key.tag.sub else { return };
        if r == 0 || r as usize > self.params.n {
            return;
        }
        match key.purpose {
            CoinPurpose::Election => {
                self.round_state(r).leader = Some(NodeId(value as u16));
            }
            CoinPurpose::Binary(k) => {
                self.round_state(r).mba.on_coin(k, value == 1, out);
            }
        }
        self.progress(r, out);
    }

    fn decision(&self) -> Option<&Bytes> {
        self.decision.as_ref()
    }

    fn decision_round(&self) -> Option<u16> {
        self.decided_round
    }
}
