//! Leader-based validated agreement for `n ≥ 3t+1` with Merkle-committed dispersal.
//!
//! Every node disperses its input with an `(n, t+1)` erasure code and
//! commits to the shares. Three quorum stages (lock, ready, finish) record
//! per dealer how far its dispersal got. In each election round a coin names
//! a leader, a biased binary agreement on the leader's ready/finish records
//! feeds a binary agreement, and on 1 the nodes that locked the leader's
//! dispersal echo their committed shares so everyone can rebuild the value.

use std::collections::{BTreeMap, BTreeSet};

use bytes::Bytes;

use crate::aba::Aba;
use crate::abbba::Abbba;
use crate::codec::{Codec, SymbolMap};
use crate::machine::{CoinKey, CoinPurpose, Fact, Machine, Outbox};
use crate::merkle::{verify, MerkleTree, OpeningProof};
use crate::rr::FlatParams;
use crate::tree::Group;
use crate::types::{NodeId, ProtocolTag, Sub};
use crate::wire::Payload;

/// A verified share of one dealer's value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommittedShare {
    pub commit: Bytes,
    pub symbol: Bytes,
    pub proof: OpeningProof,
}

/// Quorum over distinct senders for each commitment, acted on once the
/// commitment is known locally.
#[derive(Clone, Debug, Default)]
struct Stage {
    from: BTreeMap<Bytes, BTreeSet<NodeId>>,
    done: BTreeSet<Bytes>,
}

impl Stage {
    fn add(&mut self, c: &Bytes, from: NodeId) {
        self.from.entry(c.clone()).or_default().insert(from);
    }

    /// Commitments that reached `quorum`, are known, and were not acted on yet.
    fn ready(&mut self, quorum: usize, known: &BTreeMap<Bytes, BTreeSet<NodeId>>) -> Vec<Bytes> {
        let fire: Vec<Bytes> = self
            .from
            .iter()
            .filter(|(c, s)| s.len() >= quorum && known.contains_key(*c) && !self.done.contains(*c))
            .map(|(c, _)| c.clone())
            .collect();
        self.done.extend(fire.iter().cloned());
        fire
    }
}

/// Dispersal of every node's input with its quorum records.
#[derive(Debug)]
pub struct AcdHash {
    group: Group,
    tag: ProtocolTag,
    codec: Codec,
    kappa: usize,
    me: NodeId,
    pub shares: BTreeMap<NodeId, CommittedShare>,
    /// Dealers whose verified share carried each commitment.
    pub dealers: BTreeMap<Bytes, BTreeSet<NodeId>>,
    pub lock: BTreeSet<NodeId>,
    pub ready: BTreeSet<NodeId>,
    pub finish: BTreeSet<NodeId>,
    votes: Stage,
    locks: Stage,
    readies: Stage,
    finishes: BTreeSet<NodeId>,
    election_sent: bool,
    elections: BTreeSet<NodeId>,
    confirm_sent: bool,
    confirms: BTreeSet<NodeId>,
    returned: bool,
}

impl AcdHash {
    pub fn new(params: &FlatParams, me: NodeId) -> Self {
        AcdHash {
            group: params.group(),
            tag: params.tag(Sub::None),
            codec: Codec::new(params.n, params.t + 1).expect("network fits the code"),
            kappa: params.kappa,
            me,
            shares: BTreeMap::new(),
            dealers: BTreeMap::new(),
            lock: BTreeSet::new(),
            ready: BTreeSet::new(),
            finish: BTreeSet::new(),
            votes: Stage::default(),
            locks: Stage::default(),
            readies: Stage::default(),
            finishes: BTreeSet::new(),
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
        let tree = MerkleTree::commit(&shares, self.kappa);
        let commit = tree.root();
        for (p, &j) in self.group.members().iter().enumerate() {
            out.send(
                j,
                self.tag.clone(),
                Payload::HashShare {
                    commit: commit.clone(),
                    symbol: shares[p].clone(),
                    proof: tree.open(p + 1),
                },
            );
        }
    }

    /// Returns true when the dispersal phase returns.
    pub fn handle(&mut self, from: NodeId, payload: &Payload, out: &mut Outbox) -> bool {
        let n = self.group.size();
        let t = self.group.t();
        let mine = self.group.position(self.me).expect("member");
        match payload {
            Payload::HashShare { commit, symbol, proof } => {
                if self.shares.contains_key(&from) || !verify(mine, commit, symbol, proof) {
                    return false;
                }
                self.shares.insert(
                    from,
                    CommittedShare {
                        commit: commit.clone(),
                        symbol: symbol.clone(),
                        proof: proof.clone(),
                    },
                );
                self.dealers.entry(commit.clone()).or_default().insert(from);
                // A later dealer with an identical commitment joins stages already passed.
                if self.votes.done.contains(commit) {
                    self.lock.insert(from);
                }
                if self.locks.done.contains(commit) {
                    self.ready.insert(from);
                }
                if self.readies.done.contains(commit) {
                    self.finish.insert(from);
                    out.send(from, self.tag.clone(), Payload::AcdFinish);
                }
                out.multicast(self.group.members(), &self.tag, Payload::HashVote(commit.clone()));
            }
            Payload::HashVote(c) => self.votes.add(c, from),
            Payload::Lock(c) => self.locks.add(c, from),
            Payload::AcdReady(c) => self.readies.add(c, from),
            Payload::AcdFinish => {
                if self.finishes.insert(from) && self.finishes.len() >= n - t && !self.election_sent {
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
        self.stages(out);
        false
    }

    fn stages(&mut self, out: &mut Outbox) {
        let quorum = self.group.size() - self.group.t();
        for c in self.votes.ready(quorum, &self.dealers) {
            self.lock.extend(self.dealers[&c].iter().copied());
            out.multicast(self.group.members(), &self.tag, Payload::Lock(c));
        }
        for c in self.locks.ready(quorum, &self.dealers) {
            self.ready.extend(self.dealers[&c].iter().copied());
            out.multicast(self.group.members(), &self.tag, Payload::AcdReady(c));
        }
        for c in self.readies.ready(quorum, &self.dealers) {
            for &j in &self.dealers[&c] {
                self.finish.insert(j);
                out.send(j, self.tag.clone(), Payload::AcdFinish);
            }
        }
    }

    fn send_confirm(&mut self, out: &mut Outbox) {
        if !self.confirm_sent {
            self.confirm_sent = true;
            out.multicast(self.group.members(), &self.tag, Payload::Confirm);
        }
    }
}

/// Rebuilds the leader's value from committed echoes.
#[derive(Debug)]
pub struct RetrievalHash {
    leader: NodeId,
    codec: Codec,
    kappa: usize,
    threshold: usize,
    from: BTreeSet<NodeId>,
    symbols: BTreeMap<Bytes, SymbolMap>,
    output: Option<Option<Bytes>>,
}

impl RetrievalHash {
    pub fn new(params: &FlatParams, leader: NodeId) -> Self {
        RetrievalHash {
            leader,
            codec: Codec::new(params.n, params.t + 1).expect("network fits the code"),
            kappa: params.kappa,
            threshold: params.t + 1,
            from: BTreeSet::new(),
            symbols: BTreeMap::new(),
            output: None,
        }
    }

    pub fn output(&self) -> Option<&Option<Bytes>> {
        self.output.as_ref()
    }

    /// An echo from `pos` (1-based); returns the output once known.
    pub fn on_echo(&mut self, from: NodeId, leader: u16, share: &CommittedShare) -> Option<Option<Bytes>> {
        if self.output.is_some() || leader != self.leader.0 || self.from.contains(&from) {
            return None;
        }
        let pos = from.slot() + 1;
        if !verify(pos, &share.commit, &share.symbol, &share.proof) {
            return None;
        }
        self.from.insert(from);
        let bucket = self.symbols.entry(share.commit.clone()).or_default();
        bucket.insert(pos, share.symbol.clone());
        if bucket.len() < self.threshold {
            return None;
        }
        let result = self.codec.decode_erasure(bucket).ok().filter(|w| {
            let shares = self.codec.encode(w);
            MerkleTree::commit(&shares, self.kappa).root() == share.commit
        });
        self.output = Some(result.clone());
        Some(result)
    }
}

#[derive(Debug)]
struct HashRound {
    leader: Option<NodeId>,
    abbba: Abbba,
    aba: Aba,
    echo_sent: bool,
    /// Echoes that arrived before this node knew it had to retrieve.
    echoes: Vec<(NodeId, u16, CommittedShare)>,
    retrieval: Option<RetrievalHash>,
    finished: bool,
}

/// Per-node machine of the hash variant.
#[derive(Debug)]
pub struct HashNode {
    params: FlatParams,
    group: Group,
    input: Bytes,
    acd: AcdHash,
    round: u16,
    rounds: BTreeMap<u16, HashRound>,
    decision: Option<Bytes>,
    decided_round: Option<u16>,
}

impl HashNode {
    pub fn new(params: FlatParams, me: NodeId, input: Bytes) -> Self {
        HashNode {
            group: params.group(),
            acd: AcdHash::new(&params, me),
            params,
            input,
            round: 0,
            rounds: BTreeMap::new(),
            decision: None,
            decided_round: None,
        }
    }

    fn round_state(&mut self, r: u16) -> &mut HashRound {
        let group = self.group.clone();
        let tag = self.params.tag(Sub::Round(r));
        self.rounds.entry(r).or_insert_with(|| HashRound {
            leader: None,
            abbba: Abbba::new(tag.clone(), group.clone()),
            aba: Aba::new(tag, group),
            echo_sent: false,
            echoes: Vec::new(),
            retrieval: None,
            finished: false,
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

    /// Advance round `r` as far as the current state allows.
    fn progress(&mut self, r: u16, out: &mut Outbox) {
        let Some(leader) = self.rounds.get(&r).and_then(|x| x.leader) else {
            return;
        };
        let active = r == self.round && self.round >= 1;
        let ready = self.acd.ready.contains(&leader);
        let finish = self.acd.finish.contains(&leader);
        let lock = self.acd.lock.contains(&leader);
        let share = self.acd.shares.get(&leader).cloned();
        let tag = self.params.tag(Sub::Round(r));
        let members = self.group.members().to_vec();
        let params = self.params.clone();
        let st = self.rounds.get_mut(&r).unwrap();
        if active {
            let _ = st.abbba.input(ready, finish, out);
        }
        if let Some(bit) = st.abbba.output() {
            if active {
                let _ = st.aba.input(bit, out);
            }
        }
        if st.aba.decided() == Some(true) {
            if st.retrieval.is_none() {
                let mut dr = RetrievalHash::new(&params, leader);
                for (j, l, s) in std::mem::take(&mut st.echoes) {
                    dr.on_echo(j, l, &s);
                }
                st.retrieval = Some(dr);
            }
            if !st.echo_sent && lock {
                if let Some(s) = share {
                    st.echo_sent = true;
                    out.multicast(
                        &members,
                        &tag,
                        Payload::HashEcho {
                            leader: leader.0,
                            commit: s.commit,
                            symbol: s.symbol,
                            proof: s.proof,
                        },
                    );
                }
            }
        }
        if !active || st.finished {
            return;
        }
        let outcome = match st.aba.decided() {
            Some(false) => Some(None),
            Some(true) => st.retrieval.as_ref().and_then(|d| d.output().cloned()),
            None => None,
        };
        if let Some(v) = outcome {
            st.finished = true;
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
}

impl Machine for HashNode {
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
                // Records changed; rounds may now echo or take input.
                let known: Vec<u16> = self.rounds.keys().copied().collect();
                for r in known {
                    self.progress(r, out);
                }
            }
            Sub::Round(r) if r >= 1 && r as usize <= self.params.n => {
                let st = self.round_state(r);
                match payload {
                    Payload::AbbaValue { a, b } => {
                        st.abbba.on_value(from, *a, *b, out);
                    }
                    Payload::HashEcho {
                        leader,
                        commit,
                        symbol,
                        proof,
                    } => {
                        let share = CommittedShare {
                            commit: commit.clone(),
                            symbol: symbol.clone(),
                            proof: proof.clone(),
                        };
                        match &mut st.retrieval {
                            Some(dr) => {
                                dr.on_echo(from, *leader, &share);
                            }
                            None => st.echoes.push((from, *leader, share)),
                        }
                    }
                    _ => {
                        st.aba.handle(from, payload, out);
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
                self.round_state(r).aba.on_coin(k, value == 1, out);
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
