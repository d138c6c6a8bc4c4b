use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::domain::ProviderProfile;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioName {
    Common,
    Exp1st,
    Sale1st,
    Custom,
}

impl fmt::Display for ScenarioName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScenarioName::Common => "common",
            ScenarioName::Exp1st => "exp1st",
            ScenarioName::Sale1st => "sale1st",
            ScenarioName::Custom => "custom",
        })
    }
}

impl FromStr for ScenarioName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "common" => Ok(ScenarioName::Common),
            "exp1st" => Ok(ScenarioName::Exp1st),
            "sale1st" => Ok(ScenarioName::Sale1st),
            "custom" => Ok(ScenarioName::Custom),
            other => Err(Error::invalid(format!("unknown scenario '{other}'"))),
        }
    }
}

/// Normal distributions (mean, sd) for each provider profile field.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub name: ScenarioName,
    pub ve_mean: f64,
    pub ve_sd: f64,
    pub vb_mean: f64,
    pub vb_sd: f64,
    pub y_mean: f64,
    pub y_sd: f64,
}

impl ScenarioSpec {
    /// Purchases worth about ten times an examination.
    pub fn common() -> Self {
        ScenarioSpec {
            name: ScenarioName::Common,
            ve_mean: 10.0,
            ve_sd: 2.5,
            vb_mean: 100.0,
            vb_sd: 25.0,
            y_mean: 50.0,
            y_sd: 25.0,
        }
    }

    /// Exposure valued as highly as purchases.
    pub fn exp1st() -> Self {
        ScenarioSpec {
            name: ScenarioName::Exp1st,
            ve_mean: 100.0,
            ve_sd: 25.0,
            vb_mean: 100.0,
            vb_sd: 25.0,
            ..Self::common()
        }
    }

    /// Sales events: purchases worth about a hundred examinations.
    pub fn sale1st() -> Self {
        ScenarioSpec {
            name: ScenarioName::Sale1st,
            vb_mean: 1000.0,
            vb_sd: 250.0,
            ..Self::common()
        }
    }

    pub fn named(name: ScenarioName) -> Result<Self> {
        match name {
            ScenarioName::Common => Ok(Self::common()),
            ScenarioName::Exp1st => Ok(Self::exp1st()),
            ScenarioName::Sale1st => Ok(Self::sale1st()),
            ScenarioName::Custom => Err(Error::invalid(
                "custom scenarios need explicit distribution parameters",
            )),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (field, mean, sd) in [
            ("v_e", self.ve_mean, self.ve_sd),
            ("v_b", self.vb_mean, self.vb_sd),
            ("y", self.y_mean, self.y_sd),
        ] {
            if !(mean > 0.0 && mean.is_finite()) {
                return Err(Error::invalid(format!("{field} mean must be > 0, got {mean}")));
            }
            if !(sd >= 0.0 && sd.is_finite()) {
                return Err(Error::invalid(format!("{field} sd must be >= 0, got {sd}")));
            }
        }
        Ok(())
    }
}

/// Draws from `N(mean, sd)` truncated to `(0, inf)` by rejection.
fn positive_normal<R: Rng + ?Sized>(dist: &Normal<f64>, rng: &mut R) -> f64 {
    loop {
        let v = dist.sample(rng);
        if v > 0.0 {
            return v;
        }
    }
}

/// Independent per-provider draws of `v_e`, `v_b` and `y`.
pub fn sample_profiles<R: Rng + ?Sized>(
    m: usize,
    scenario: &ScenarioSpec,
    rng: &mut R,
) -> Result<Vec<ProviderProfile>> {
    scenario.validate()?;
    if m < 2 {
        return Err(Error::invalid(format!("need at least 2 providers, got {m}")));
    }
    let normal = |mean: f64, sd: f64| Normal::new(mean, sd).map_err(|e| Error::invalid(e.to_string()));
    let ve = normal(scenario.ve_mean, scenario.ve_sd)?;
    let vb = normal(scenario.vb_mean, scenario.vb_sd)?;
    let y = normal(scenario.y_mean, scenario.y_sd)?;
    (0..m)
        .map(|_| {
            let v_e = positive_normal(&ve, rng);
            let v_b = positive_normal(&vb, rng);
            let y = positive_normal(&y, rng);
            ProviderProfile::new(v_e, v_b, y)
        })
        .collect()
}
