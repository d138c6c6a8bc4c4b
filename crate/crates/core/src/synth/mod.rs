//! Synthetic datasets (provider scenarios, grouped catalogs, latent-factor
//! relevance) and the on-disk dataset format.

mod generator;
mod io;
mod scenario;

pub use generator::{assign_groups, generate_dataset, generate_relevance, group_sizes, GeneratorSpec};
pub use io::{load_dataset, save_dataset, RescalePolicy, CATALOG_FILE, PROVIDERS_FILE, RELEVANCE_FILE};
pub use scenario::{sample_profiles, ScenarioName, ScenarioSpec};

use crate::domain::{Catalog, ProviderProfile, RelevanceTable};
use crate::error::{Error, Result};

/// Everything a simulation run needs, plus external ids for reporting.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub catalog: Catalog,
    pub profiles: Vec<ProviderProfile>,
    pub relevance: RelevanceTable,
    pub item_names: Vec<String>,
    pub provider_names: Vec<String>,
    pub user_names: Vec<String>,
}

impl Dataset {
    /// Checks that the parts agree; external ids default to the dense index.
    pub fn new(catalog: Catalog, profiles: Vec<ProviderProfile>, relevance: RelevanceTable) -> Result<Self> {
        if profiles.len() != catalog.provider_count() {
            return Err(Error::invalid(format!(
                "{} profiles for {} providers",
                profiles.len(),
                catalog.provider_count()
            )));
        }
        if relevance.item_count() != catalog.item_count() {
            return Err(Error::invalid(format!(
                "relevance covers {} items, catalog has {}",
                relevance.item_count(),
                catalog.item_count()
            )));
        }
        for p in &profiles {
            p.validate()?;
        }
        let names = |n: usize| (0..n).map(|i| i.to_string()).collect();
        Ok(Dataset {
            item_names: names(catalog.item_count()),
            provider_names: names(catalog.provider_count()),
            user_names: names(relevance.user_count()),
            catalog,
            profiles,
            relevance,
        })
    }

    pub fn user_count(&self) -> usize {
        self.relevance.user_count()
    }

    pub fn expected_gains(&self) -> Vec<f64> {
        self.profiles.iter().map(|p| p.y).collect()
    }
}
