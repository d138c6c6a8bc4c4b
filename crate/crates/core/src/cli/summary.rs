use std::path::Path;

use serde::Deserialize;

use crate::domain::Mode;
use crate::error::{Error, Result};
use crate::metrics::{tradeoff_envelope, RunResult};

pub const RESULTS_FILE: &str = "results.csv";
pub const TIMINGS_FILE: &str = "timings.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const STATUS_OK: &str = "ok";

/// One row of `results.csv`.
#[derive(Clone, Debug, PartialEq, Deserialize)]
pub struct ResultRow {
    pub mode: Mode,
    pub policy: String,
    pub alpha: f64,
    pub seed: u64,
    pub effectiveness: f64,
    pub unfairness: f64,
    pub msd: f64,
    pub pearson: f64,
    pub excluded_providers: Option<usize>,
    pub status: String,
}

impl ResultRow {
    pub fn ok(r: &RunResult) -> Self {
        ResultRow {
            mode: r.mode,
            policy: r.policy.clone(),
            alpha: r.alpha,
            seed: r.seed,
            effectiveness: r.effectiveness,
            unfairness: r.unfairness,
            msd: r.msd,
            pearson: r.pearson,
            excluded_providers: Some(r.excluded_providers),
            status: STATUS_OK.to_string(),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == STATUS_OK
    }
}

#[derive(Clone, Debug, Deserialize)]
pub struct TimingRow {
    pub mode: Mode,
    pub policy: String,
    pub alpha: f64,
    pub seed: u64,
    pub wall_ms: f64,
}

pub fn read_results(dir: &Path) -> Result<Vec<ResultRow>> {
    let path = dir.join(RESULTS_FILE);
    let mut reader = csv::Reader::from_path(&path).map_err(|e| match e.kind() {
        csv::ErrorKind::Io(_) => Error::Load {
            path: path.clone(),
            row: 0,
            msg: e.to_string(),
        },
        _ => Error::Csv(e),
    })?;
    let rows = reader.deserialize().collect::<std::result::Result<Vec<ResultRow>, _>>()?;
    if rows.is_empty() {
        return Err(Error::invalid(format!("{} has no runs", path.display())));
    }
    Ok(rows)
}

/// Timings are optional; a missing file yields an empty list.
pub fn read_timings(dir: &Path) -> Result<Vec<TimingRow>> {
    let path = dir.join(TIMINGS_FILE);
    if !path.exists() {
        return Ok(Vec::new());
    }
    let mut reader = csv::Reader::from_path(&path)?;
    Ok(reader.deserialize().collect::<std::result::Result<Vec<TimingRow>, _>>()?)
}

/// Mean and sample standard deviation of the finite values; `(NaN, NaN)`
/// when there are none and a standard deviation of 0 for a single value.
pub fn mean_sd(values: impl IntoIterator<Item = f64>) -> (f64, f64) {
    let v: Vec<f64> = values.into_iter().filter(|x| x.is_finite()).collect();
    if v.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() == 1 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Seed aggregate of one `(policy, alpha)` point.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSummary {
    pub mode: Mode,
    pub policy: String,
    pub alpha: f64,
    pub runs: usize,
    pub failed: usize,
    pub effectiveness: (f64, f64),
    pub unfairness: (f64, f64),
    pub msd: (f64, f64),
    pub pearson: (f64, f64),
}

impl PointSummary {
    pub const CSV_HEADER: [&'static str; 13] = [
        "mode",
        "policy",
        "alpha",
        "runs",
        "failed",
        "effectiveness_mean",
        "effectiveness_sd",
        "unfairness_mean",
        "unfairness_sd",
        "msd_mean",
        "msd_sd",
        "pearson_mean",
        "pearson_sd",
    ];

    pub fn csv_record(&self) -> Vec<String> {
        use crate::metrics::format_real as f;
        vec![
            self.mode.to_string(),
            self.policy.clone(),
            f(self.alpha),
            self.runs.to_string(),
            self.failed.to_string(),
            f(self.effectiveness.0),
            f(self.effectiveness.1),
            f(self.unfairness.0),
            f(self.unfairness.1),
            f(self.msd.0),
            f(self.msd.1),
            f(self.pearson.0),
            f(self.pearson.1),
        ]
    }
}

/// Groups rows by `(mode, policy, alpha)` in order of first appearance.
pub fn summarize(rows: &[ResultRow]) -> Vec<PointSummary> {
    let mut keys: Vec<(Mode, &str, u64)> = Vec::new();
    for r in rows {
        let key = (r.mode, r.policy.as_str(), r.alpha.to_bits());
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(mode, policy, alpha_bits)| {
            let group: Vec<&ResultRow> = rows
                .iter()
                .filter(|r| r.mode == mode && r.policy == policy && r.alpha.to_bits() == alpha_bits)
                .collect();
            let ok: Vec<&&ResultRow> = group.iter().filter(|r| r.is_ok()).collect();
            PointSummary {
                mode,
                policy: policy.to_string(),
                alpha: f64::from_bits(alpha_bits),
                runs: ok.len(),
                failed: group.len() - ok.len(),
                effectiveness: mean_sd(ok.iter().map(|r| r.effectiveness)),
                unfairness: mean_sd(ok.iter().map(|r| r.unfairness)),
                msd: mean_sd(ok.iter().map(|r| r.msd)),
                pearson: mean_sd(ok.iter().map(|r| r.pearson)),
            }
        })
        .collect()
}

/// Policies in order of first appearance.
pub fn policy_order(points: &[PointSummary]) -> Vec<String> {
    let mut names: Vec<String> = Vec::new();
    for p in points {
        if !names.contains(&p.policy) {
            names.push(p.policy.clone());
        }
    }
    names
}

/// Trade-off envelope of one policy from its seed-averaged points.
pub fn policy_envelope(points: &[PointSummary], policy: &str) -> Vec<(f64, f64)> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.policy == policy && p.runs > 0)
        .map(|p| (p.unfairness.0, p.effectiveness.0))
        .collect();
    tradeoff_envelope(&pts)
}

/// The point with the lowest mean unfairness (first on ties).
pub fn min_unfairness_point<'a>(points: &'a [PointSummary], policy: &str) -> Option<&'a PointSummary> {
    points
        .iter()
        .filter(|p| p.policy == policy && p.unfairness.0.is_finite())
        .fold(None, |best: Option<&PointSummary>, p| match best {
            Some(b) if b.unfairness.0 <= p.unfairness.0 => Some(b),
            _ => Some(p),
        })
}

/// File-name form of a policy name, e.g. `FairCo*` -> `fairco_star`.
pub fn policy_slug(name: &str) -> String {
    name.to_ascii_lowercase().replace('*', "_star")
}
