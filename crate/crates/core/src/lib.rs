//! Equity-oriented provider fairness for ranking.
//!
//! Providers declare how much they value exposure (`v_e`) and purchases
//! (`v_b`) and what share of the total gain they expect (`y`). The crate
//! measures how far served rankings are from giving every provider gains
//! proportional to `y`, ranks with a gradient of that measure (EquityRank)
//! and simulates offline and online ranking services to compare policies.

pub mod cli;
pub mod domain;
pub mod error;
pub mod metrics;
pub mod rankers;
pub mod sim;
pub mod synth;

pub use error::{Error, Result};
