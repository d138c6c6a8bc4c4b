//! Offline and online simulation of a ranking service.
//!
//! Offline, every user is served once with true relevance and providers are
//! credited their expected gains. Online, one uniformly drawn user is served
//! per step from a prefiltered candidate set, relevance is estimated from
//! that user's purchase history, and purchases are sampled.

mod offline;
mod online;

pub use offline::{run_offline, run_offline_detailed, OfflineOutcome};
pub use online::{
    estimate_relevance, prefilter_candidates, run_online, Checkpoint, OnlineOutcome, OnlineState,
};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{Mode, PositionModel};
use crate::error::{Error, Result};
use crate::synth::Dataset;

/// Simulation parameters shared by both modes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub mode: Mode,
    /// Ranking list size `K`.
    pub list_size: usize,
    /// Online steps.
    pub t_max: u64,
    /// cNDCG discount.
    pub gamma: f64,
    /// NDCG cutoff, at most `list_size`.
    pub k_c: usize,
    pub prefilter_size: usize,
    /// Standard deviation of the Gaussian noise added to true relevance
    /// before the online prefilter picks its top items.
    pub prefilter_noise: f64,
    pub checkpoint_every: u64,
    /// Keep the per-step NDCG of every online request.
    pub record_ndcg: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            mode: Mode::Offline,
            list_size: 5,
            t_max: 250_000,
            gamma: 0.995,
            k_c: 5,
            prefilter_size: 20,
            prefilter_noise: 0.1,
            checkpoint_every: 1000,
            record_ndcg: false,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.list_size == 0 {
            return Err(Error::invalid("list size must be positive"));
        }
        if self.k_c == 0 || self.k_c > self.list_size {
            return Err(Error::invalid(format!(
                "k_c = {} outside 1..={}",
                self.k_c, self.list_size
            )));
        }
        if self.prefilter_size < self.list_size {
            return Err(Error::invalid(format!(
                "prefilter size {} is smaller than the list size {}",
                self.prefilter_size, self.list_size
            )));
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(Error::invalid(format!("gamma {} outside (0, 1]", self.gamma)));
        }
        if !(self.prefilter_noise >= 0.0 && self.prefilter_noise.is_finite()) {
            return Err(Error::invalid("prefilter noise must be >= 0"));
        }
        if self.checkpoint_every == 0 {
            return Err(Error::invalid("checkpoint_every must be positive"));
        }
        Ok(())
    }

    pub(crate) fn position_model(&self) -> Result<PositionModel> {
        PositionModel::new(self.list_size)
    }

    pub(crate) fn check_dataset(&self, ds: &Dataset) -> Result<()> {
        self.validate()?;
        if ds.catalog.item_count() < self.list_size {
            return Err(Error::invalid(format!(
                "{} items cannot fill lists of {}",
                ds.catalog.item_count(),
                self.list_size
            )));
        }
        if ds.user_count() == 0 {
            return Err(Error::invalid("dataset has no users"));
        }
        Ok(())
    }
}

/// Independent generator for one purpose within a run.
pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub(crate) const STREAM_PREFILTER: u64 = 11;
pub(crate) const STREAM_SERVING: u64 = 12;
pub(crate) const STREAM_ORDER: u64 = 13;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let cfg = SimConfig::default();
        cfg.validate().unwrap();
        assert_eq!((cfg.list_size, cfg.k_c, cfg.prefilter_size), (5, 5, 20));
        assert_eq!(cfg.t_max, 250_000);
        assert_eq!(cfg.gamma, 0.995);
    }

    #[test]
    fn rejects_inconsistent_settings() {
        let base = SimConfig::default();
        for bad in [
            SimConfig { k_c: 6, ..base.clone() },
            SimConfig { k_c: 0, ..base.clone() },
            SimConfig { prefilter_size: 4, ..base.clone() },
            SimConfig { gamma: 0.0, ..base.clone() },
            SimConfig { gamma: 1.01, ..base.clone() },
            SimConfig { checkpoint_every: 0, ..base.clone() },
            SimConfig { list_size: 0, k_c: 0, ..base.clone() },
        ] {
            assert!(bad.validate().is_err(), "{bad:?}");
        }
        SimConfig { gamma: 1.0, ..base }.validate().unwrap();
    }

    #[test]
    fn toml_keys_override_defaults() {
        let cfg: SimConfig = toml::from_str("mode = \"online\"\nt_max = 10\n").unwrap();
        assert_eq!(cfg.mode, Mode::Online);
        assert_eq!(cfg.t_max, 10);
        assert_eq!(cfg.list_size, 5);
        assert!(toml::from_str::<SimConfig>("bogus = 1").is_err());
    }
}
