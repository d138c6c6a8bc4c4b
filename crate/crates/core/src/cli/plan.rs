use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::domain::Mode;
use crate::error::{Error, Result};
use crate::rankers::{PolicyConfig, PolicyKind};
use crate::sim::SimConfig;
use crate::synth::{
    generate_dataset, load_dataset, Dataset, GeneratorSpec, RescalePolicy, ScenarioName, ScenarioSpec,
};

/// `0` followed by every decade from `1e-12` to `10`.
///
/// EquityRank scores with cumulative (not time-averaged) gains, so at the
/// gain scales of the synthetic scenarios its fairness term already
/// dominates from about `1e-4`. The low decades are where its trade-off
/// curve actually bends.
pub fn default_alpha_grid() -> Vec<f64> {
    std::iter::once(0.0)
        .chain((-12..=1).map(|e| 10f64.powi(e)))
        .collect()
}

fn default_policies() -> Vec<PolicyKind> {
    PolicyKind::ALL.to_vec()
}

fn default_seeds() -> Vec<u64> {
    (1..=5).collect()
}

fn default_scenario() -> ScenarioName {
    ScenarioName::Common
}

fn default_out() -> PathBuf {
    PathBuf::from("results")
}

/// Everything a sweep needs. Read from TOML; omitted keys take defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentPlan {
    /// Dataset directory; when absent the dataset is generated from
    /// `generator` and `scenario`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dataset: Option<PathBuf>,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default = "default_scenario")]
    pub scenario: ScenarioName,
    /// Distribution parameters for `scenario = "custom"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub custom_scenario: Option<ScenarioSpec>,
    /// Reject relevance above 1 instead of rescaling the row.
    #[serde(default)]
    pub strict_relevance: bool,
    #[serde(default = "default_policies")]
    pub policies: Vec<PolicyKind>,
    #[serde(default = "default_alpha_grid")]
    pub alpha_grid: Vec<f64>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub generator: GeneratorSpec,
    #[serde(default)]
    pub sim: SimConfig,
}

impl Default for ExperimentPlan {
    fn default() -> Self {
        toml::from_str("").expect("every field has a default")
    }
}

/// One `(policy, alpha, seed)` run of a sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunSpec {
    pub policy: PolicyConfig,
    pub seed: u64,
}

impl ExperimentPlan {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn mode(&self) -> Mode {
        self.sim.mode
    }

    pub fn scenario_spec(&self) -> Result<ScenarioSpec> {
        match (self.scenario, self.custom_scenario) {
            (ScenarioName::Custom, Some(spec)) => Ok(ScenarioSpec { name: ScenarioName::Custom, ..spec }),
            (ScenarioName::Custom, None) => Err(Error::Config(
                "scenario = \"custom\" needs a [custom_scenario] table".into(),
            )),
            (name, _) => ScenarioSpec::named(name),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.policies.is_empty() {
            return Err(Error::Config("policies must not be empty".into()));
        }
        if self.alpha_grid.is_empty() {
            return Err(Error::Config("alpha_grid must not be empty".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::Config("seeds must not be empty".into()));
        }
        if let Some(a) = self.alpha_grid.iter().find(|a| !(**a >= 0.0 && a.is_finite())) {
            return Err(Error::Config(format!("alpha {a} must be finite and >= 0")));
        }
        self.sim.validate()?;
        if self.dataset.is_none() {
            self.generator.validate()?;
            self.scenario_spec()?.validate()?;
        }
        if self.mode() == Mode::Online {
            if let Some(p) = self.policies.iter().find(|p| !p.supports(Mode::Online)) {
                return Err(Error::InvalidMode(format!("{} cannot run online", p.name())));
            }
        }
        Ok(())
    }

    /// Alpha values actually run for `kind`: a single `0` for policies
    /// without a trade-off parameter, and the grid capped at 1 for MMF*.
    pub fn effective_alphas(&self, kind: PolicyKind) -> Vec<f64> {
        if !kind.uses_alpha() {
            return vec![0.0];
        }
        let mut grid: Vec<f64> = self.alpha_grid.clone();
        if kind == PolicyKind::MmfStar {
            grid.retain(|&a| a <= 1.0);
        }
        grid
    }

    /// Runs in plan order: policy, then alpha, then seed.
    pub fn runs(&self) -> Result<Vec<RunSpec>> {
        let mut runs = Vec::new();
        for &kind in &self.policies {
            let alphas = self.effective_alphas(kind);
            if alphas.is_empty() {
                log::warn!("{}: no alpha in the grid is admissible; skipped", kind.name());
            }
            for alpha in alphas {
                let policy = PolicyConfig::new(kind, alpha)?;
                runs.extend(self.seeds.iter().map(|&seed| RunSpec { policy, seed }));
            }
        }
        Ok(runs)
    }

    pub fn load_dataset(&self) -> Result<Dataset> {
        match &self.dataset {
            Some(dir) => {
                let rescale = if self.strict_relevance {
                    RescalePolicy::Strict
                } else {
                    RescalePolicy::RescaleRow
                };
                load_dataset(dir, rescale)
            }
            None => generate_dataset(&self.generator, &self.scenario_spec()?),
        }
    }
}
