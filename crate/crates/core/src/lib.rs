//! Asynchronous validated Byzantine agreement protocols run as deterministic
//! state machines over a seeded adversarial network simulator.

pub mod aba;
pub mod abbba;
pub mod audit;
pub mod base;
pub mod codec;
pub mod coin;
pub mod gf;
pub mod harness;
pub mod hash;
pub mod machine;
pub mod merkle;
pub mod metrics;
pub mod netsim;
pub mod rba;
pub mod rbc;
pub mod rmvba;
pub mod rr;
pub mod rs;
pub mod shmdm;
pub mod suites;
pub mod tree;
pub mod types;
pub mod wire;

pub use types::{fault_threshold, layer_round, NodeId, Predicate, ProtocolTag, Sub};
pub use wire::{Envelope, Kind, Payload};
