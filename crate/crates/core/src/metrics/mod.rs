//! Evaluation mathematics: effectiveness, provider gains and unfairness,
//! the fairness gradient, gain-ratio alignment and trade-off envelopes.

mod diagnostics;
mod effectiveness;
mod envelope;
mod fairness;
mod ledger;

pub use diagnostics::{alignment_diagnostics, pearson, ratio_alignment, Alignment};
pub use effectiveness::{andcg, cndcg_update, dcg, ideal_dcg, ndcg, ndcg_from_parts, user_ideal_dcg};
pub use envelope::{envelope_at, tradeoff_envelope};
pub use fairness::{
    expected_gain, exposure_unfairness, fairness_gradient, group_mean_relevance, unfairness,
};
pub(crate) use fairness::fairness_gradient_unchecked;
pub use ledger::GainLedger;

use crate::domain::Mode;

/// Outcome of one `(policy, alpha, seed)` run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub mode: Mode,
    pub policy: String,
    pub alpha: f64,
    pub seed: u64,
    /// aNDCG offline, cNDCG at the final step online.
    pub effectiveness: f64,
    /// NaN when undefined (e.g. an online run with no steps).
    pub unfairness: f64,
    pub msd: f64,
    /// NaN when either ratio vector has zero variance.
    pub pearson: f64,
    pub excluded_providers: usize,
    pub wall_ms: f64,
}

impl RunResult {
    /// Columns of [`RunResult::csv_record`]. Wall time is kept out so a
    /// row depends only on the run's inputs.
    pub const CSV_HEADER: [&'static str; 9] = [
        "mode",
        "policy",
        "alpha",
        "seed",
        "effectiveness",
        "unfairness",
        "msd",
        "pearson",
        "excluded_providers",
    ];

    pub fn pearson_defined(&self) -> bool {
        !self.pearson.is_nan()
    }

    pub fn csv_record(&self) -> Vec<String> {
        vec![
            self.mode.to_string(),
            self.policy.clone(),
            format_real(self.alpha),
            self.seed.to_string(),
            format_real(self.effectiveness),
            format_real(self.unfairness),
            format_real(self.msd),
            format_real(self.pearson),
            self.excluded_providers.to_string(),
        ]
    }
}

/// Shortest round-trip decimal for finite values, `NaN`/`inf` otherwise.
pub fn format_real(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{v}")
    }
}
