//! Shared test support: independent reference implementations.

#![allow(dead_code)]

pub mod corruption;
pub mod merkle_search;
pub mod rs_oracle;
