//! Bracha reliable broadcast of a full value from one designated sender.

use std::collections::{BTreeMap, BTreeSet};

use bytes::Bytes;

use crate::machine::Outbox;
use crate::tree::Group;
use crate::types::{NodeId, ProtocolTag};
use crate::wire::Payload;

#[derive(Clone, Debug)]
pub struct Rbc {
    tag: ProtocolTag,
    group: Group,
    sender: NodeId,
    echo_from: BTreeSet<NodeId>,
    ready_from: BTreeSet<NodeId>,
    echoes: BTreeMap<Bytes, usize>,
    readies: BTreeMap<Bytes, usize>,
    echo_sent: bool,
    ready_sent: bool,
    delivered: Option<Bytes>,
}

impl Rbc {
    pub fn new(tag: ProtocolTag, group: Group, sender: NodeId) -> Self {
        Rbc {
            tag,
            group,
            sender,
            echo_from: BTreeSet::new(),
            ready_from: BTreeSet::new(),
            echoes: BTreeMap::new(),
            readies: BTreeMap::new(),
            echo_sent: false,
            ready_sent: false,
            delivered: None,
        }
    }

    pub fn delivered(&self) -> Option<&Bytes> {
        self.delivered.as_ref()
    }

    /// Called at the sender only.
    pub fn broadcast(&mut self, value: Bytes, out: &mut Outbox) {
        out.multicast(self.group.members(), &self.tag, Payload::RbcSend(value));
    }

    /// Returns the value when it is delivered.
    pub fn handle(&mut self, from: NodeId, payload: &Payload, out: &mut Outbox) -> Option<Bytes> {
        if !self.group.contains(from) {
            return None;
        }
        let m = self.group.size();
        let t = self.group.t();
        match payload {
            Payload::RbcSend(v) if from == self.sender && !self.echo_sent => {
                self.echo_sent = true;
                out.multicast(self.group.members(), &self.tag, Payload::RbcEcho(v.clone()));
            }
            Payload::RbcEcho(v) if self.echo_from.insert(from) => {
                let c = self.echoes.entry(v.clone()).or_default();
                *c += 1;
                if *c >= (m + t + 2) / 2 {
                    self.send_ready(v.clone(), out);
                }
            }
            Payload::RbcReady(v) if self.ready_from.insert(from) => {
                let c = self.readies.entry(v.clone()).or_default();
                *c += 1;
                let c = *c;
                if c > t {
                    self.send_ready(v.clone(), out);
                }
                if c > 2 * t && self.delivered.is_none() {
                    self.delivered = Some(v.clone());
                    return Some(v.clone());
                }
            }
            _ => {}
        }
        None
    }

    fn send_ready(&mut self, v: Bytes, out: &mut Outbox) {
        if !self.ready_sent {
            self.ready_sent = true;
            out.multicast(self.group.members(), &self.tag, Payload::RbcReady(v));
        }
    }
}
