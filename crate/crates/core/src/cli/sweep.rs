use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::domain::Mode;
use crate::error::{Error, Result};
use crate::metrics::{format_real, RunResult};
use crate::sim::{run_offline, run_online, Checkpoint, SimConfig};
use crate::synth::Dataset;

use super::plan::{ExperimentPlan, RunSpec};
use super::summary::{
    policy_envelope, policy_order, policy_slug, summarize, ResultRow, RESULTS_FILE, SUMMARY_FILE, TIMINGS_FILE,
};

pub const PLAN_FILE: &str = "plan.toml";
pub const SERIES_DIR: &str = "series";

/// Outcome of one sweep run; failures are kept rather than aborting.
#[derive(Debug)]
pub struct RunRecord {
    pub spec: RunSpec,
    pub outcome: std::result::Result<RunResult, Error>,
    /// Online checkpoints.
    pub series: Vec<Checkpoint>,
}

impl RunRecord {
    fn result_row(&self, mode: Mode) -> ResultRow {
        match &self.outcome {
            Ok(r) => ResultRow::ok(r),
            Err(e) => ResultRow {
                mode,
                policy: self.spec.policy.kind.name().to_string(),
                alpha: self.spec.policy.alpha,
                seed: self.spec.seed,
                effectiveness: f64::NAN,
                unfairness: f64::NAN,
                msd: f64::NAN,
                pearson: f64::NAN,
                excluded_providers: None,
                status: format!("error: {e}"),
            },
        }
    }
}

pub fn execute_run(ds: &Dataset, spec: &RunSpec, sim: &SimConfig) -> RunRecord {
    let (outcome, series) = match sim.mode {
        Mode::Offline => (run_offline(ds, &spec.policy, spec.seed, sim), Vec::new()),
        Mode::Online => match run_online(ds, &spec.policy, spec.seed, sim) {
            Ok(o) => (Ok(o.result), o.checkpoints),
            Err(e) => (Err(e), Vec::new()),
        },
    };
    if let Err(e) = &outcome {
        log::error!("{} alpha={} seed={}: {e}", spec.policy.kind.name(), spec.policy.alpha, spec.seed);
    }
    RunRecord {
        spec: *spec,
        outcome,
        series,
    }
}

/// Executes every run of the plan in parallel; records come back in plan
/// order.
pub fn run_sweep(plan: &ExperimentPlan, ds: &Dataset) -> Result<Vec<RunRecord>> {
    plan.validate()?;
    let runs = plan.runs()?;
    log::info!("sweep: {} runs in {} mode", runs.len(), plan.mode());
    Ok(runs.par_iter().map(|spec| execute_run(ds, spec, &plan.sim)).collect())
}

fn csv_bytes<I, R>(header: &[&str], rows: I) -> Result<Vec<u8>>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.into_inner().map_err(|e| Error::invalid(e.to_string()))
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn result_fields(r: &ResultRow) -> Vec<String> {
    vec![
        r.mode.to_string(),
        r.policy.clone(),
        format_real(r.alpha),
        r.seed.to_string(),
        format_real(r.effectiveness),
        format_real(r.unfairness),
        format_real(r.msd),
        format_real(r.pearson),
        r.excluded_providers.map(|e| e.to_string()).unwrap_or_default(),
        r.status.clone(),
    ]
}

/// Writes `plan.toml`, `results.csv`, `timings.csv`, `summary.csv`, one
/// `envelope_<policy>.csv` per policy and, online, one checkpoint series
/// per run under `series/`.
pub fn write_sweep(dir: &Path, plan: &ExperimentPlan, records: &[RunRecord]) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write(&dir.join(PLAN_FILE), plan.to_toml()?.as_bytes())?;

    let mode = plan.mode();
    let rows: Vec<ResultRow> = records.iter().map(|r| r.result_row(mode)).collect();
    let mut header: Vec<&str> = RunResult::CSV_HEADER.to_vec();
    header.push("status");
    write(&dir.join(RESULTS_FILE), &csv_bytes(&header, rows.iter().map(result_fields))?)?;

    let timings = records.iter().filter_map(|r| r.outcome.as_ref().ok()).map(|r| {
        vec![
            r.mode.to_string(),
            r.policy.clone(),
            format_real(r.alpha),
            r.seed.to_string(),
            format!("{:.3}", r.wall_ms),
        ]
    });
    write(
        &dir.join(TIMINGS_FILE),
        &csv_bytes(&["mode", "policy", "alpha", "seed", "wall_ms"], timings)?,
    )?;

    let points = summarize(&rows);
    write(
        &dir.join(SUMMARY_FILE),
        &csv_bytes(&super::summary::PointSummary::CSV_HEADER, points.iter().map(|p| p.csv_record()))?,
    )?;
    for policy in policy_order(&points) {
        let env = policy_envelope(&points, &policy);
        let body = csv_bytes(
            &["threshold", "effectiveness"],
            env.iter().map(|&(t, e)| [format_real(t), format_real(e)]),
        )?;
        write(&dir.join(format!("envelope_{}.csv", policy_slug(&policy))), &body)?;
    }

    if mode == Mode::Online {
        let series_dir = dir.join(SERIES_DIR);
        fs::create_dir_all(&series_dir).map_err(|e| Error::io(&series_dir, e))?;
        for rec in records.iter().filter(|r| r.outcome.is_ok()) {
            let name = format!(
                "{}_alpha{}_seed{}.csv",
                policy_slug(rec.spec.policy.kind.name()),
                format_real(rec.spec.policy.alpha),
                rec.spec.seed
            );
            let body = csv_bytes(
                &["step", "cndcg", "unfairness"],
                rec.series
                    .iter()
                    .map(|c| [c.step.to_string(), format_real(c.cndcg), format_real(c.unfairness)]),
            )?;
            write(&series_dir.join(name), &body)?;
        }
    }
    Ok(())
}
