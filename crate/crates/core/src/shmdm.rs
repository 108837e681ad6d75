//! Dispersal of one half's agreed value to the other half of a group.
//!
//! Each sender (a member of the half) encodes its value with an
//! `(m*, t*+1)` code, `m*` being the half's size and `t*` its fault
//! threshold, and sends its own symbol to every node of the other half.
//! Receivers decode online from the symbols, indexed by the sender's
//! position inside the half.

use bytes::Bytes;

use crate::codec::{oec_try_decode, Codec, OecOutcome, SymbolMap};
use crate::machine::{Fact, Outbox, RepeatedInput};
use crate::tree::Group;
use crate::types::{NodeId, ProtocolTag};
use crate::wire::Payload;

#[derive(Clone, Debug)]
pub struct Shmdm {
    tag: ProtocolTag,
    senders: Group,
    receivers: Vec<NodeId>,
    codec: Codec,
    symbols: SymbolMap,
    input: bool,
    output: Option<Bytes>,
}

impl Shmdm {
    /// `group` is the whole group; `senders` the half that disperses.
    pub fn new(tag: ProtocolTag, group: &Group, senders: Group) -> Self {
        let t_star = senders.t();
        let codec = Codec::new(senders.size(), t_star + 1).expect("half sizes fit the code");
        let receivers = group
            .members()
            .iter()
            .copied()
            .filter(|id| !senders.contains(*id))
            .collect();
        Shmdm {
            tag,
            senders,
            receivers,
            codec,
            symbols: SymbolMap::new(),
            input: false,
            output: None,
        }
    }

    pub fn tag(&self) -> &ProtocolTag {
        &self.tag
    }

    pub fn output(&self) -> Option<&Bytes> {
        self.output.as_ref()
    }

    /// Sender side: disperse `w` and output it.
    pub fn input(&mut self, w: Bytes, out: &mut Outbox) -> Result<Option<Bytes>, RepeatedInput> {
        if self.input {
            return Err(RepeatedInput);
        }
        self.input = true;
        if let Some(pos) = self.senders.position(out.me()) {
            let z = self.codec.encode_one(&w, pos);
            out.multicast(&self.receivers, &self.tag, Payload::Initial(z));
        }
        Ok(self.set_output(w, out))
    }

    /// Receiver side: a symbol from a sender.
    pub fn handle(&mut self, from: NodeId, payload: &Payload, out: &mut Outbox) -> Option<Bytes> {
        let Payload::Initial(z) = payload else {
            return None;
        };
        if self.output.is_some() {
            return None;
        }
        let pos = self.senders.position(from)?;
        if self.symbols.contains_key(&pos) {
            return None;
        }
        self.symbols.insert(pos, z.clone());
        match oec_try_decode(&self.codec, self.senders.t(), &self.symbols) {
            OecOutcome::Decoded(w) => self.set_output(w, out),
            OecOutcome::Wait => None,
        }
    }

    fn set_output(&mut self, w: Bytes, out: &mut Outbox) -> Option<Bytes> {
        if self.output.is_some() {
            return None;
        }
        self.output = Some(w.clone());
        out.fact(Fact::ShmdmOutput {
            tag: self.tag.clone(),
            value: w.clone(),
        });
        Some(w)
    }
}
