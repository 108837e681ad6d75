//! Envelopes and their canonical byte form.
//!
//! Layout (all integers big-endian):
//!
//! ```text
//! code:u8 | id_len:u8 id | group:u32 | layer_round:u8 | sub_code:u8 [sub_value:u16]
//!         | from:u16 | to:u16 | body
//! ```
//!
//! `code` names the payload variant and therefore fixes the body layout.
//! Byte strings in bodies are `len:u32 bytes`, optional strings carry a
//! leading `0|1` flag, bits are one byte each. `bit_size` of an envelope is
//! eight times the length of this form.

use bytes::Bytes;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::merkle::OpeningProof;
use crate::types::{NodeId, ProtocolTag, Sub};

/// Message kinds named by the protocols.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Kind {
    Initial,
    Symbol,
    Si1,
    Si2,
    Ready,
    Finish,
    CorrectSymbol,
    AbbaValue,
    Share,
    Vote,
    Lock,
    Election,
    Confirm,
    EchoShare,
    AbaInternal,
    CoinInternal,
}

impl Kind {
    pub const ALL: [Kind; 16] = [
        Kind::Initial,
        Kind::Symbol,
        Kind::Si1,
        Kind::Si2,
        Kind::Ready,
        Kind::Finish,
        Kind::CorrectSymbol,
        Kind::AbbaValue,
        Kind::Share,
        Kind::Vote,
        Kind::Lock,
        Kind::Election,
        Kind::Confirm,
        Kind::EchoShare,
        Kind::AbaInternal,
        Kind::CoinInternal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Initial => "INITIAL",
            Kind::Symbol => "SYMBOL",
            Kind::Si1 => "SI1",
            Kind::Si2 => "SI2",
            Kind::Ready => "READY",
            Kind::Finish => "FINISH",
            Kind::CorrectSymbol => "CORRECTSYMBOL",
            Kind::AbbaValue => "ABBAVALUE",
            Kind::Share => "SHARE",
            Kind::Vote => "VOTE",
            Kind::Lock => "LOCK",
            Kind::Election => "ELECTION",
            Kind::Confirm => "CONFIRM",
            Kind::EchoShare => "ECHOSHARE",
            Kind::AbaInternal => "ABA",
            Kind::CoinInternal => "COIN",
        }
    }
}

/// Kind-specific message bodies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Payload {
    /// Recursion level READY for subset `subset` at layer `round`.
    TreeReady {
        round: u8,
        subset: u8,
    },
    TreeFinish {
        round: u8,
        subset: u8,
    },
    /// Coded symbol multicast to the other half of a group.
    Initial(Bytes),
    /// `(y_j^(i), y_i^(i))`: the receiver's symbol as seen by the sender, and the sender's own.
    Symbol {
        theirs: Bytes,
        mine: Bytes,
    },
    Si1(bool),
    Si2(bool),
    RbaReady(bool),
    CorrectSymbol(Bytes),
    /// Biased binary agreement pair. Bytes rather than bits so that
    /// out-of-range Byzantine values stay representable and get dropped.
    AbbaValue {
        a: u8,
        b: u8,
    },
    AbaBval {
        round: u16,
        value: u8,
    },
    AbaAux {
        round: u16,
        value: u8,
    },
    /// Bitset of binary values: bit 0 for value 0, bit 1 for value 1.
    AbaConf {
        round: u16,
        values: u8,
    },
    AbaTerm {
        value: u8,
    },
    RbcSend(Bytes),
    RbcEcho(Bytes),
    RbcReady(Bytes),
    Share(Bytes),
    Vote,
    Election,
    Confirm,
    /// Retrieval echo; `None` is an explicit bottom.
    EchoShare {
        leader: u16,
        symbol: Option<Bytes>,
    },
    /// Candidate of the multivalued agreement; `None` is bottom.
    MbaValue(Option<Bytes>),
    MbaPerhaps(bool),
    HashShare {
        commit: Bytes,
        symbol: Bytes,
        proof: OpeningProof,
    },
    HashVote(Bytes),
    Lock(Bytes),
    AcdReady(Bytes),
    AcdFinish,
    HashEcho {
        leader: u16,
        commit: Bytes,
        symbol: Bytes,
        proof: OpeningProof,
    },
}

impl Payload {
    pub fn kind(&self) -> Kind {
        use Payload::*;
        match self {
            TreeReady { .. } | RbaReady(_) | RbcReady(_) | AcdReady(_) => Kind::Ready,
            TreeFinish { .. } | AcdFinish => Kind::Finish,
            Initial(_) => Kind::Initial,
            Symbol { .. } => Kind::Symbol,
            Si1(_) => Kind::Si1,
            Si2(_) => Kind::Si2,
            CorrectSymbol(_) => Kind::CorrectSymbol,
            AbbaValue { .. } => Kind::AbbaValue,
            AbaBval { .. } | AbaAux { .. } | AbaConf { .. } | AbaTerm { .. } => Kind::AbaInternal,
            RbcSend(_) | RbcEcho(_) | MbaValue(_) | MbaPerhaps(_) => Kind::AbaInternal,
            Share(_) | HashShare { .. } => Kind::Share,
            Vote | HashVote(_) => Kind::Vote,
            Lock(_) => Kind::Lock,
            Election => Kind::Election,
            Confirm => Kind::Confirm,
            EchoShare { .. } | HashEcho { .. } => Kind::EchoShare,
        }
    }

    fn code(&self) -> u8 {
        use Payload::*;
        match self {
            TreeReady { .. } => 1,
            TreeFinish { .. } => 2,
            Initial(_) => 3,
            Symbol { .. } => 4,
            Si1(_) => 5,
            Si2(_) => 6,
            RbaReady(_) => 7,
            CorrectSymbol(_) => 8,
            AbbaValue { .. } => 9,
            AbaBval { .. } => 10,
            AbaAux { .. } => 11,
            AbaConf { .. } => 12,
            AbaTerm { .. } => 13,
            RbcSend(_) => 14,
            RbcEcho(_) => 15,
            RbcReady(_) => 16,
            Share(_) => 17,
            Vote => 18,
            Election => 19,
            Confirm => 20,
            EchoShare { .. } => 21,
            MbaValue(_) => 22,
            MbaPerhaps(_) => 23,
            HashShare { .. } => 24,
            HashVote(_) => 25,
            Lock(_) => 26,
            AcdReady(_) => 27,
            AcdFinish => 28,
            HashEcho { .. } => 29,
        }
    }

    /// Length of the body in bytes.
    pub fn body_len(&self) -> usize {
        use Payload::*;
        fn s(b: &Bytes) -> usize {
            4 + b.len()
        }
        fn o(b: &Option<Bytes>) -> usize {
            1 + b.as_ref().map_or(0, s)
        }
        fn p(pr: &OpeningProof) -> usize {
            4 + 1 + pr.siblings.iter().map(s).sum::<usize>()
        }
        match self {
            TreeReady { .. } | TreeFinish { .. } => 2,
            Initial(b) | CorrectSymbol(b) | RbcSend(b) | RbcEcho(b) | RbcReady(b) | Share(b) => s(b),
            HashVote(b) | Lock(b) | AcdReady(b) => s(b),
            Symbol { theirs, mine } => s(theirs) + s(mine),
            Si1(_) | Si2(_) | RbaReady(_) | MbaPerhaps(_) => 1,
            AbbaValue { .. } => 2,
            AbaBval { .. } | AbaAux { .. } | AbaConf { .. } => 3,
            AbaTerm { .. } => 1,
            Vote | Election | Confirm | AcdFinish => 0,
            EchoShare { symbol, .. } => 2 + o(symbol),
            MbaValue(v) => o(v),
            HashShare { commit, symbol, proof } => s(commit) + s(symbol) + p(proof),
            HashEcho {
                commit, symbol, proof, ..
            } => 2 + s(commit) + s(symbol) + p(proof),
        }
    }

    /// True for payloads that carry coded symbols.
    pub fn carries_symbol(&self) -> bool {
        use Payload::*;
        matches!(
            self,
            Initial(_)
                | Symbol { .. }
                | CorrectSymbol(_)
                | Share(_)
                | EchoShare { symbol: Some(_), .. }
                | HashShare { .. }
                | HashEcho { .. }
                | RbcSend(_)
                | RbcEcho(_)
                | RbcReady(_)
                | MbaValue(Some(_))
        )
    }
}

fn tag_len(tag: &ProtocolTag) -> usize {
    let sub = match tag.sub {
        Sub::None => 1,
        _ => 3,
    };
    1 + tag.mvba_id.len() + 4 + 1 + sub
}

/// Header length in bytes for a tag (code, tag, from, to).
pub fn header_len(tag: &ProtocolTag) -> usize {
    1 + tag_len(tag) + 2 + 2
}

/// A typed protocol message in flight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Envelope {
    pub tag: ProtocolTag,
    pub from: NodeId,
    pub to: NodeId,
    pub payload: Payload,
}

impl Envelope {
    pub fn new(tag: ProtocolTag, from: NodeId, to: NodeId, payload: Payload) -> Self {
        Envelope { tag, from, to, payload }
    }

    pub fn kind(&self) -> Kind {
        self.payload.kind()
    }

    pub fn encoded_len(&self) -> usize {
        header_len(&self.tag) + self.payload.body_len()
    }

    /// Size of the canonical serialization in bits.
    pub fn bit_size(&self) -> u64 {
        8 * self.encoded_len() as u64
    }

    pub fn serialize(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.encoded_len());
        out.push(self.payload.code());
        put_tag(&mut out, &self.tag);
        out.extend_from_slice(&self.from.0.to_be_bytes());
        out.extend_from_slice(&self.to.0.to_be_bytes());
        put_body(&mut out, &self.payload);
        debug_assert_eq!(out.len(), self.encoded_len());
        out
    }

    pub fn deserialize(bytes: &[u8]) -> Result<Self, DecodeError> {
        let mut r = Reader { buf: bytes, pos: 0 };
        let code = r.u8()?;
        let tag = r.tag()?;
        let from = NodeId(r.u16()?);
        let to = NodeId(r.u16()?);
        let payload = r.body(code)?;
        if r.pos != bytes.len() {
            return Err(DecodeError::TrailingBytes(bytes.len() - r.pos));
        }
        Ok(Envelope { tag, from, to, payload })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DecodeError {
    #[error("input ended early")]
    Truncated,
    #[error("unknown payload code {0}")]
    UnknownCode(u8),
    #[error("unknown sub-instance code {0}")]
    UnknownSub(u8),
    #[error("invalid flag byte {0}")]
    BadFlag(u8),
    #[error("{0} trailing bytes")]
    TrailingBytes(usize),
}

fn put_tag(out: &mut Vec<u8>, tag: &ProtocolTag) {
    assert!(tag.mvba_id.len() <= u8::MAX as usize, "mvba id too long");
    out.push(tag.mvba_id.len() as u8);
    out.extend_from_slice(&tag.mvba_id);
    out.extend_from_slice(&tag.group.to_be_bytes());
    out.push(tag.layer_round);
    let (code, value) = match tag.sub {
        Sub::None => (0u8, None),
        Sub::Subset(l) => (1, Some(l as u16)),
        Sub::Election(e) => (2, Some(e)),
        Sub::Round(r) => (3, Some(r)),
        Sub::Member(j) => (4, Some(j)),
    };
    out.push(code);
    if let Some(v) = value {
        out.extend_from_slice(&v.to_be_bytes());
    }
}

fn put_bytes(out: &mut Vec<u8>, b: &[u8]) {
    out.extend_from_slice(&(b.len() as u32).to_be_bytes());
    out.extend_from_slice(b);
}

fn put_opt(out: &mut Vec<u8>, b: &Option<Bytes>) {
    match b {
        None => out.push(0),
        Some(b) => {
            out.push(1);
            put_bytes(out, b);
        }
    }
}

fn put_proof(out: &mut Vec<u8>, p: &OpeningProof) {
    out.extend_from_slice(&p.index.to_be_bytes());
    out.push(p.siblings.len() as u8);
    for s in &p.siblings {
        put_bytes(out, s);
    }
}

fn put_body(out: &mut Vec<u8>, payload: &Payload) {
    use Payload::*;
    match payload {
        TreeReady { round, subset } | TreeFinish { round, subset } => {
            out.push(*round);
            out.push(*subset);
        }
        Initial(b) | CorrectSymbol(b) | RbcSend(b) | RbcEcho(b) | RbcReady(b) | Share(b) => put_bytes(out, b),
        HashVote(b) | Lock(b) | AcdReady(b) => put_bytes(out, b),
        Symbol { theirs, mine } => {
            put_bytes(out, theirs);
            put_bytes(out, mine);
        }
        Si1(v) | Si2(v) | RbaReady(v) | MbaPerhaps(v) => out.push(*v as u8),
        AbbaValue { a, b } => {
            out.push(*a);
            out.push(*b);
        }
        AbaBval { round, value } | AbaAux { round, value } => {
            out.extend_from_slice(&round.to_be_bytes());
            out.push(*value);
        }
        AbaConf { round, values } => {
            out.extend_from_slice(&round.to_be_bytes());
            out.push(*values);
        }
        AbaTerm { value } => out.push(*value),
        Vote | Election | Confirm | AcdFinish => {}
        EchoShare { leader, symbol } => {
            out.extend_from_slice(&leader.to_be_bytes());
            put_opt(out, symbol);
        }
        MbaValue(v) => put_opt(out, v),
        HashShare { commit, symbol, proof } => {
            put_bytes(out, commit);
            put_bytes(out, symbol);
            put_proof(out, proof);
        }
        HashEcho {
            leader,
            commit,
            symbol,
            proof,
        } => {
            out.extend_from_slice(&leader.to_be_bytes());
            put_bytes(out, commit);
            put_bytes(out, symbol);
            put_proof(out, proof);
        }
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, len: usize) -> Result<&[u8], DecodeError> {
        let end = self.pos.checked_add(len).ok_or(DecodeError::Truncated)?;
        let s = self.buf.get(self.pos..end).ok_or(DecodeError::Truncated)?;
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8, DecodeError> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16, DecodeError> {
        let s = self.take(2)?;
        Ok(u16::from_be_bytes([s[0], s[1]]))
    }

    fn u32(&mut self) -> Result<u32, DecodeError> {
        let s = self.take(4)?;
        Ok(u32::from_be_bytes([s[0], s[1], s[2], s[3]]))
    }

    fn bit(&mut self) -> Result<bool, DecodeError> {
        match self.u8()? {
            0 => Ok(false),
            1 => Ok(true),
            f => Err(DecodeError::BadFlag(f)),
        }
    }

    fn bytes(&mut self) -> Result<Bytes, DecodeError> {
        let len = self.u32()? as usize;
        Ok(Bytes::copy_from_slice(self.take(len)?))
    }

    fn opt(&mut self) -> Result<Option<Bytes>, DecodeError> {
        if self.bit()? {
            Ok(Some(self.bytes()?))
        } else {
            Ok(None)
        }
    }

    fn proof(&mut self) -> Result<OpeningProof, DecodeError> {
        let index = self.u32()?;
        let count = self.u8()? as usize;
        let mut siblings = Vec::with_capacity(count);
        for _ in 0..count {
            siblings.push(self.bytes()?);
        }
        Ok(OpeningProof { index, siblings })
    }

    fn tag(&mut self) -> Result<ProtocolTag, DecodeError> {
        let id_len = self.u8()? as usize;
        let mvba_id = Bytes::copy_from_slice(self.take(id_len)?);
        let group = self.u32()?;
        let layer_round = self.u8()?;
        let sub = match self.u8()? {
            0 => Sub::None,
            1 => Sub::Subset(self.u16()? as u8),
            2 => Sub::Election(self.u16()?),
            3 => Sub::Round(self.u16()?),
            4 => Sub::Member(self.u16()?),
            c => return Err(DecodeError::UnknownSub(c)),
        };
        Ok(ProtocolTag {
            mvba_id,
            group,
            sub,
            layer_round,
        })
    }

    fn body(&mut self, code: u8) -> Result<Payload, DecodeError> {
        use Payload::*;
        Ok(match code {
            1 => TreeReady {
                round: self.u8()?,
                subset: self.u8()?,
            },
            2 => TreeFinish {
                round: self.u8()?,
                subset: self.u8()?,
            },
            3 => Initial(self.bytes()?),
            4 => Symbol {
                theirs: self.bytes()?,
                mine: self.bytes()?,
            },
            5 => Si1(self.bit()?),
            6 => Si2(self.bit()?),
            7 => RbaReady(self.bit()?),
            8 => CorrectSymbol(self.bytes()?),
            9 => AbbaValue {
                a: self.u8()?,
                b: self.u8()?,
            },
            10 => AbaBval {
                round: self.u16()?,
                value: self.u8()?,
            },
            11 => AbaAux {
                round: self.u16()?,
                value: self.u8()?,
            },
            12 => AbaConf {
                round: self.u16()?,
                values: self.u8()?,
            },
            13 => AbaTerm { value: self.u8()? },
            14 => RbcSend(self.bytes()?),
            15 => RbcEcho(self.bytes()?),
            16 => RbcReady(self.bytes()?),
            17 => Share(self.bytes()?),
            18 => Vote,
            19 => Election,
            20 => Confirm,
            21 => EchoShare {
                leader: self.u16()?,
                symbol: self.opt()?,
            },
            22 => MbaValue(self.opt()?),
            23 => MbaPerhaps(self.bit()?),
            24 => HashShare {
                commit: self.bytes()?,
                symbol: self.bytes()?,
                proof: self.proof()?,
            },
            25 => HashVote(self.bytes()?),
            26 => Lock(self.bytes()?),
            27 => AcdReady(self.bytes()?),
            28 => AcdFinish,
            29 => HashEcho {
                leader: self.u16()?,
                commit: self.bytes()?,
                symbol: self.bytes()?,
                proof: self.proof()?,
            },
            c => return Err(DecodeError::UnknownCode(c)),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tag() -> ProtocolTag {
        ProtocolTag::new(Bytes::from_static(&[7]), 3, Sub::Subset(1))
    }

    #[test]
    fn empty_ready_is_header_only() {
        let env = Envelope::new(tag(), NodeId(1), NodeId(2), Payload::AcdFinish);
        // code 1 + tag (1 + 1 + 4 + 1 + 3) + from 2 + to 2
        assert_eq!(env.encoded_len(), 15);
        assert_eq!(env.bit_size(), 120);
        assert_eq!(env.serialize().len(), 15);
    }

    #[test]
    fn rejects_malformed() {
        let env = Envelope::new(tag(), NodeId(1), NodeId(2), Payload::Si1(true));
        let bytes = env.serialize();
        assert_eq!(
            Envelope::deserialize(&bytes[..bytes.len() - 1]),
            Err(DecodeError::Truncated)
        );
        let mut bad = bytes.clone();
        *bad.last_mut().unwrap() = 5;
        assert_eq!(Envelope::deserialize(&bad), Err(DecodeError::BadFlag(5)));
        let mut bad = bytes.clone();
        bad[0] = 200;
        assert_eq!(Envelope::deserialize(&bad), Err(DecodeError::UnknownCode(200)));
        let mut long = bytes;
        long.push(0);
        assert_eq!(Envelope::deserialize(&long), Err(DecodeError::TrailingBytes(1)));
    }

    pub(crate) fn arb_bytes() -> impl Strategy<Value = Bytes> {
        proptest::collection::vec(any::<u8>(), 0..40).prop_map(Bytes::from)
    }

    fn arb_proof() -> impl Strategy<Value = OpeningProof> {
        (any::<u32>(), proptest::collection::vec(arb_bytes(), 0..5))
            .prop_map(|(index, siblings)| OpeningProof { index, siblings })
    }

    fn arb_payload() -> impl Strategy<Value = Payload> {
        use Payload::*;
        let b = arb_bytes;
        prop_oneof![
            (any::<u8>(), any::<u8>()).prop_map(|(round, subset)| TreeReady { round, subset }),
            (any::<u8>(), any::<u8>()).prop_map(|(round, subset)| TreeFinish { round, subset }),
            b().prop_map(Initial),
            (b(), b()).prop_map(|(theirs, mine)| Symbol { theirs, mine }),
            any::<bool>().prop_map(Si1),
            any::<bool>().prop_map(Si2),
            any::<bool>().prop_map(RbaReady),
            b().prop_map(CorrectSymbol),
            (any::<u8>(), any::<u8>()).prop_map(|(a, b)| AbbaValue { a, b }),
            (any::<u16>(), any::<u8>()).prop_map(|(round, value)| AbaBval { round, value }),
            (any::<u16>(), any::<u8>()).prop_map(|(round, value)| AbaAux { round, value }),
            (any::<u16>(), any::<u8>()).prop_map(|(round, values)| AbaConf { round, values }),
            any::<u8>().prop_map(|value| AbaTerm { value }),
            b().prop_map(RbcSend),
            b().prop_map(RbcEcho),
            b().prop_map(RbcReady),
            b().prop_map(Share),
            Just(Vote),
            Just(Election),
            Just(Confirm),
            (any::<u16>(), proptest::option::of(b())).prop_map(|(leader, symbol)| EchoShare { leader, symbol }),
            proptest::option::of(b()).prop_map(MbaValue),
            any::<bool>().prop_map(MbaPerhaps),
            (b(), b(), arb_proof()).prop_map(|(commit, symbol, proof)| HashShare { commit, symbol, proof }),
            b().prop_map(HashVote),
            b().prop_map(Lock),
            b().prop_map(AcdReady),
            Just(AcdFinish),
            (any::<u16>(), b(), b(), arb_proof()).prop_map(|(leader, commit, symbol, proof)| HashEcho {
                leader,
                commit,
                symbol,
                proof
            }),
        ]
    }

    fn arb_sub() -> impl Strategy<Value = Sub> {
        prop_oneof![
            Just(Sub::None),
            (0u8..2).prop_map(Sub::Subset),
            any::<u16>().prop_map(Sub::Election),
            any::<u16>().prop_map(Sub::Round),
            any::<u16>().prop_map(Sub::Member),
        ]
    }

    fn arb_envelope() -> impl Strategy<Value = Envelope> {
        (
            proptest::collection::vec(any::<u8>(), 0..8),
            1u32..1000,
            arb_sub(),
            1u16..100,
            1u16..100,
            arb_payload(),
        )
            .prop_map(|(id, group, sub, from, to, payload)| Envelope {
                tag: ProtocolTag::new(Bytes::from(id), group, sub),
                from: NodeId(from),
                to: NodeId(to),
                payload,
            })
    }

    proptest! {
        #[test]
        fn round_trip(env in arb_envelope()) {
            let bytes = env.serialize();
            prop_assert_eq!(bytes.len(), env.encoded_len());
            prop_assert_eq!(Envelope::deserialize(&bytes).unwrap(), env);
        }

        #[test]
        fn serialization_is_injective(a in arb_envelope(), b in arb_envelope()) {
            prop_assert_eq!(a == b, a.serialize() == b.serialize());
        }
    }

    #[test]
    fn every_kind_has_a_payload() {
        // Build one payload per variant and check the kind map covers all
        // message kinds except the coin, which is an oracle without envelopes.
        use Payload::*;
        let b = Bytes::new;
        let proof = OpeningProof {
            index: 0,
            siblings: vec![],
        };
        let samples = vec![
            TreeReady { round: 1, subset: 0 },
            TreeFinish { round: 1, subset: 0 },
            Initial(b()),
            Symbol { theirs: b(), mine: b() },
            Si1(true),
            Si2(true),
            RbaReady(true),
            CorrectSymbol(b()),
            AbbaValue { a: 0, b: 0 },
            AbaBval { round: 0, value: 0 },
            AbaAux { round: 0, value: 0 },
            AbaConf { round: 0, values: 0 },
            AbaTerm { value: 0 },
            RbcSend(b()),
            RbcEcho(b()),
            RbcReady(b()),
            Share(b()),
            Vote,
            Election,
            Confirm,
            EchoShare {
                leader: 1,
                symbol: None,
            },
            MbaValue(None),
            MbaPerhaps(false),
            HashShare {
                commit: b(),
                symbol: b(),
                proof: proof.clone(),
            },
            HashVote(b()),
            Lock(b()),
            AcdReady(b()),
            AcdFinish,
            HashEcho {
                leader: 1,
                commit: b(),
                symbol: b(),
                proof,
            },
        ];
        let codes: std::collections::BTreeSet<u8> = samples.iter().map(|p| p.code()).collect();
        assert_eq!(codes.len(), samples.len());
        let kinds: std::collections::BTreeSet<Kind> = samples.iter().map(|p| p.kind()).collect();
        for k in Kind::ALL {
            assert_eq!(kinds.contains(&k), k != Kind::CoinInternal, "{k:?}");
        }
    }
}
