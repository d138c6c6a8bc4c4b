//! Command-line experiment driver: `generate`, `run`, `sweep`, `report`.

mod plan;
mod report;
mod summary;
mod sweep;

pub use plan::{default_alpha_grid, ExperimentPlan, RunSpec};
pub use report::{min_unfairness_table, tradeoff_svg, write_report, PolicyRow, REPORT_DIR};
pub use summary::{
    mean_sd, min_unfairness_point, policy_envelope, policy_order, policy_slug, read_results, read_timings,
    summarize, PointSummary, ResultRow, TimingRow, RESULTS_FILE, SUMMARY_FILE, TIMINGS_FILE,
};
pub use sweep::{execute_run, run_sweep, write_sweep, RunRecord, PLAN_FILE, SERIES_DIR};

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::domain::Mode;
use crate::error::{Error, Result};
use crate::metrics::RunResult;
use crate::rankers::PolicyKind;
use crate::synth::{generate_dataset, save_dataset, GeneratorSpec, ScenarioName, ScenarioSpec};

#[derive(Debug, Parser)]
#[command(name = "equityrank", version, about = "Equity-oriented provider-fair ranking experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic dataset directory.
    Generate(Overrides),
    /// Run one (policy, alpha, seed) and print its result row.
    Run(Overrides),
    /// Run every policy, alpha and seed of a plan.
    Sweep(Overrides),
    /// Summarize a sweep directory into tables and a trade-off plot.
    Report(Overrides),
}

/// Flags shared by all subcommands; they override the config file.
#[derive(Debug, Default, Args)]
pub struct Overrides {
    /// TOML experiment plan.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Dataset directory to load instead of generating one.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Output directory (input directory for `report`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub mode: Option<Mode>,
    #[arg(long)]
    pub policy: Option<PolicyKind>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub scenario: Option<ScenarioName>,
    /// Overwrite an existing output directory.
    #[arg(long)]
    pub force: bool,
}

impl Overrides {
    pub fn resolve(&self) -> Result<ExperimentPlan> {
        let mut plan = match &self.config {
            Some(path) => ExperimentPlan::from_file(path)?,
            None => ExperimentPlan::default(),
        };
        if let Some(d) = &self.dataset {
            plan.dataset = Some(d.clone());
        }
        if let Some(o) = &self.out {
            plan.out = o.clone();
        }
        if let Some(m) = self.mode {
            plan.sim.mode = m;
        }
        if let Some(p) = self.policy {
            plan.policies = vec![p];
        }
        if let Some(a) = self.alpha {
            plan.alpha_grid = vec![a];
        }
        if let Some(s) = self.seed {
            plan.seeds = vec![s];
        }
        if let Some(s) = self.scenario {
            plan.scenario = s;
        }
        Ok(plan)
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    generator: &'a GeneratorSpec,
    scenario: &'a ScenarioSpec,
}

pub const MANIFEST_FILE: &str = "manifest.toml";

fn is_nonempty_dir(path: &Path) -> bool {
    fs::read_dir(path).map(|mut d| d.next().is_some()).unwrap_or(false)
}

/// Generates the plan's synthetic dataset into `plan.out`.
pub fn cmd_generate(plan: &ExperimentPlan, force: bool) -> Result<PathBuf> {
    plan.generator.validate()?;
    let scenario = plan.scenario_spec()?;
    scenario.validate()?;
    let dir = plan.out.clone();
    if dir.exists() && (!dir.is_dir() || is_nonempty_dir(&dir)) && !force {
        return Err(Error::invalid(format!(
            "{} already exists; pass --force to overwrite",
            dir.display()
        )));
    }
    let ds = generate_dataset(&plan.generator, &scenario)?;
    save_dataset(&dir, &ds)?;
    let manifest = toml::to_string_pretty(&Manifest {
        generator: &plan.generator,
        scenario: &scenario,
    })
    .map_err(|e| Error::Config(e.to_string()))?;
    let path = dir.join(MANIFEST_FILE);
    fs::write(&path, manifest).map_err(|e| Error::io(&path, e))?;
    Ok(dir)
}

/// Runs a full sweep and writes its output directory.
pub fn cmd_sweep(plan: &ExperimentPlan) -> Result<Vec<RunRecord>> {
    plan.validate()?;
    let ds = plan.load_dataset()?;
    let records = run_sweep(plan, &ds)?;
    write_sweep(&plan.out, plan, &records)?;
    Ok(records)
}

/// A single run: first policy, alpha and seed of the resolved plan.
pub fn cmd_run(plan: &ExperimentPlan) -> Result<RunResult> {
    plan.validate()?;
    let spec = RunSpec {
        policy: crate::rankers::PolicyConfig::new(plan.policies[0], plan.alpha_grid[0])?,
        seed: plan.seeds[0],
    };
    let ds = plan.load_dataset()?;
    execute_run(&ds, &spec, &plan.sim).outcome
}

fn dispatch(cli: Cli, stdout: &mut dyn Write) -> Result<()> {
    let io_err = |e| Error::io("<stdout>", e);
    match cli.command {
        Command::Generate(o) => {
            let dir = cmd_generate(&o.resolve()?, o.force)?;
            writeln!(stdout, "{}", dir.display()).map_err(io_err)?;
        }
        Command::Run(o) => {
            let plan = o.resolve()?;
            let r = cmd_run(&plan)?;
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header = RunResult::CSV_HEADER.to_vec();
            header.push("wall_ms");
            w.write_record(&header)?;
            let mut rec = r.csv_record();
            rec.push(format!("{:.3}", r.wall_ms));
            w.write_record(&rec)?;
            let bytes = w.into_inner().map_err(|e| Error::invalid(e.to_string()))?;
            stdout.write_all(&bytes).map_err(io_err)?;
        }
        Command::Sweep(o) => {
            let plan = o.resolve()?;
            let records = cmd_sweep(&plan)?;
            let failed = records.iter().filter(|r| r.outcome.is_err()).count();
            writeln!(
                stdout,
                "{} runs ({} failed) written to {}",
                records.len(),
                failed,
                plan.out.display()
            )
            .map_err(io_err)?;
        }
        Command::Report(o) => {
            let dir = o.out.clone().unwrap_or(o.resolve()?.out);
            let md = write_report(&dir)?;
            write!(stdout, "{md}").map_err(io_err)?;
        }
    }
    Ok(())
}

/// JSON error line written to stderr on failure.
pub fn error_line(kind: &str, message: &str) -> String {
    serde_json::json!({ "error": { "kind": kind, "message": message } }).to_string()
}

/// Parses `args`, runs the command and returns the process exit code.
/// Failures print one JSON object on stderr.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            eprintln!("{}", error_line("usage", e.to_string().trim()));
            return 2;
        }
    };
    match dispatch(cli, &mut std::io::stdout().lock()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", error_line(e.kind(), &e.to_string()));
            1
        }
    }
}
