//! Identifiers, tags and the external predicate shared by every protocol.

use std::fmt;

use bytes::Bytes;
use serde::{Deserialize, Serialize};

/// A node index in `1..=n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub u16);

impl NodeId {
    /// Zero-based slot, for indexing per-node arrays.
    pub fn slot(self) -> usize {
        debug_assert!(self.0 >= 1);
        self.0 as usize - 1
    }

    pub fn from_slot(slot: usize) -> Self {
        NodeId(slot as u16 + 1)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

/// All node ids of an `n`-node network.
pub fn all_nodes(n: usize) -> Vec<NodeId> {
    (0..n).map(NodeId::from_slot).collect()
}

/// Largest number of faults a group of `m` members tolerates: `⌊(m−1)/3⌋`.
pub fn fault_threshold(m: usize) -> usize {
    assert!(m >= 1, "group size must be positive");
    (m - 1) / 3
}

/// Recursion layer of tree group `g`: `⌊log2 g⌋ + 1`.
pub fn layer_round(g: u32) -> u8 {
    assert!(g >= 1, "group index starts at 1");
    (u32::BITS - g.leading_zeros()) as u8
}

/// Which sub-instance of a group an envelope belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sub {
    None,
    /// Half-partition index `l ∈ {0,1}`.
    Subset(u8),
    /// Elected index `e`.
    Election(u16),
    /// Election round `r`.
    Round(u16),
    /// Per-member instance inside the base-case agreement.
    Member(u16),
}

/// Hierarchical session identifier addressing one sub-protocol instance.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProtocolTag {
    pub mvba_id: Bytes,
    pub group: u32,
    pub sub: Sub,
    pub layer_round: u8,
}

impl ProtocolTag {
    pub fn new(mvba_id: Bytes, group: u32, sub: Sub) -> Self {
        ProtocolTag {
            mvba_id,
            group,
            sub,
            layer_round: layer_round(group),
        }
    }

    pub fn with_sub(&self, sub: Sub) -> Self {
        ProtocolTag { sub, ..self.clone() }
    }
}

impl fmt::Display for ProtocolTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}/g{}/R{}/{:?}",
            hex::encode(&self.mvba_id),
            self.group,
            self.layer_round,
            self.sub
        )
    }
}

/// Trailing bytes a value must carry to satisfy [`Predicate::default`].
pub const MAGIC_SUFFIX: [u8; 4] = [0x4d, 0x56, 0x42, 0x41];

/// External validity predicate, identical at all honest nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Predicate {
    /// Value ends with [`MAGIC_SUFFIX`].
    #[default]
    MagicSuffix,
    /// Every value is valid.
    AcceptAll,
}

impl Predicate {
    pub fn check(&self, value: &[u8]) -> bool {
        match self {
            Predicate::MagicSuffix => value.ends_with(&MAGIC_SUFFIX),
            Predicate::AcceptAll => true,
        }
    }
}
