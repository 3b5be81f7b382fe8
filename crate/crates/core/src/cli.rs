//! Command-line front end. Exit codes: 0 success, 1 scientific failure,
//! 2 usage or config error.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::aggregation::two_worlds;
use crate::config::load_config;
use crate::conjecture_lab::run_default_sweeps;
use crate::error::{Error, Result};
use crate::mechanisms::{probe_injectivity, InjectivityProbe};
use crate::records::{
    family_label, format_evidence, format_table, read_records, report_rows, write_records, Record,
};
use crate::scoring::{PerturbationGrid, ScoreRule};
use crate::simharness::{propriety_sweep, run_scenario, substream, RunSummary, ScenarioConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Smallest propriety margin `check-propriety` accepts.
pub const MARGIN_FLOOR: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(name = "elicit", version, about = "Elicit and aggregate Bayesian predictions")]
pub struct Cli {
    /// Print progress to stderr.
    #[arg(short, long, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    pub command: Command,
}

/// Options shared by the commands that take a scenario.
#[derive(Debug, Clone, clap::Args)]
pub struct ScenarioArgs {
    /// Scenario file.
    #[arg(long)]
    pub config: PathBuf,
    /// Records file; overrides `output` in the config.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Root seed; overrides the config.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Trial count; overrides the config.
    #[arg(long)]
    pub trials: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RuleArg {
    Log,
    BrierMean,
    BrierMoments,
    TwoSample,
}

impl From<RuleArg> for ScoreRule {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::Log => ScoreRule::Log,
            RuleArg::BrierMean => ScoreRule::BrierMean,
            RuleArg::BrierMoments => ScoreRule::BrierMoments(2),
            RuleArg::TwoSample => ScoreRule::TwoSampleComposite,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate trials and compare the pooled hyper with the oracle.
    Run(ScenarioArgs),
    /// Expected-score margin of truthful reports on each agent's belief.
    CheckPropriety {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Defaults to the configured mechanism's rule.
        #[arg(long, value_enum)]
        rule: Option<RuleArg>,
    },
    /// Search for two reachable hypers with the same predictive.
    ProbeInjectivity {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Largest sample multiset tried when separating two hypers.
        #[arg(long, default_value_t = 6)]
        budget: usize,
    },
    /// Exponential-family evidence sweeps.
    Conjectures {
        /// Records file for the evidence table.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-family table from a records file.
    Report {
        /// JSONL records written by the other commands.
        records: PathBuf,
    },
}

/// Parses `args` and runs the command; returns the exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli, out, err),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            code
        }
    }
}

pub fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a, cli.verbose, out, err),
        Command::CheckPropriety { scenario, rule } => {
            cmd_propriety(scenario, rule.map(ScoreRule::from), cli.verbose, out, err)
        }
        Command::ProbeInjectivity { scenario, budget } => {
            cmd_probe(scenario, *budget, cli.verbose, out, err)
        }
        Command::Conjectures { out: path } => cmd_conjectures(path.as_ref(), cli.verbose, out, err),
        Command::Report { records } => cmd_report(records, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::Config(_) | Error::Io(_) => EXIT_USAGE,
                _ => EXIT_FAILURE,
            }
        }
    }
}

/// Loads the config and applies flag overrides. Every validation failure
/// is a config error.
fn resolve(a: &ScenarioArgs) -> Result<(ScenarioConfig, Option<PathBuf>)> {
    let mut cfg = load_config(&a.config)?;
    if let Some(seed) = a.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = a.trials {
        cfg.trials = trials;
    }
    cfg.validate().map_err(|e| match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    })?;
    let path = a.out.clone().or_else(|| cfg.output.clone());
    // The header records what determines the output, not where it went.
    cfg.output = None;
    Ok((cfg, path))
}

fn emit(path: Option<&PathBuf>, records: &[Record], verbose: bool, err: &mut dyn Write) -> Result<()> {
    if let Some(p) = path {
        write_records(p, records)?;
        if verbose {
            let _ = writeln!(err, "wrote {} records to {}", records.len(), p.display());
        }
    }
    Ok(())
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "none".to_string(), |x| format!("{x:e}"))
}

fn cmd_run(a: &ScenarioArgs, verbose: bool, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let (cfg, path) = resolve(a)?;
    if verbose {
        let _ = writeln!(
            err,
            "running {} trials of {} with {} (seed {})",
            cfg.trials,
            family_label(cfg.family),
            cfg.mechanism.name(),
            cfg.seed
        );
    }
    let results = run_scenario(&cfg)?;
    let summary = RunSummary::from_results(&results);
    let family = family_label(cfg.family);
    let mut records = vec![Record::header("run", &cfg)];
    records.extend(results.iter().map(|r| Record::Trial { family: family.clone(), result: r.clone() }));
    records.push(Record::Summary { family, summary: summary.clone() });
    emit(path.as_ref(), &records, verbose, err)?;
    let _ = writeln!(
        out,
        "pass_rate={:?} trials={} passed={} max_rel_error={:e} max_ppd_gap={:e} min_margin={} mean_score={}",
        summary.pass_rate,
        summary.trials,
        summary.passed,
        summary.max_rel_error,
        summary.max_ppd_gap,
        opt(summary.min_margin),
        opt(summary.mean_score)
    );
    if let Some(bad) = results.iter().find(|r| !r.passed) {
        let dump = serde_json::to_string_pretty(bad).unwrap_or_default();
        let _ = writeln!(err, "first failing trial:\n{dump}");
        return Ok(EXIT_FAILURE);
    }
    Ok(EXIT_OK)
}

fn cmd_propriety(
    a: &ScenarioArgs,
    rule: Option<ScoreRule>,
    verbose: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    let (cfg, path) = resolve(a)?;
    let rule = match rule {
        Some(r) => r,
        None => cfg.validate()?.rule(),
    };
    let rows = propriety_sweep(&cfg, rule, &PerturbationGrid::default())?;
    let family = family_label(cfg.family);
    let min = rows.iter().map(|r| r.margin).reduce(f64::min);
    let mut records = vec![Record::header("check-propriety", &cfg)];
    records.extend(rows.iter().map(|row| Record::Margin { family: family.clone(), rule, row: row.clone() }));
    emit(path.as_ref(), &records, verbose, err)?;
    let _ = writeln!(out, "rule={rule:?} beliefs={} min_margin={}", rows.len(), opt(min));
    if let Some(bad) = rows.iter().find(|r| r.margin <= MARGIN_FLOOR) {
        let _ = writeln!(
            err,
            "truthful report not strictly optimal (trial {}, agent {}, margin {:e})",
            bad.trial, bad.agent, bad.margin
        );
        return Ok(EXIT_FAILURE);
    }
    Ok(EXIT_OK)
}

fn cmd_probe(
    a: &ScenarioArgs,
    budget: usize,
    verbose: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    let (cfg, path) = resolve(a)?;
    let mut rng = substream(cfg.seed, 0, 0);
    let result = probe_injectivity(cfg.family, &cfg.prior, budget, &mut rng)?;
    let family = family_label(cfg.family);
    let mut records = vec![Record::header("probe-injectivity", &cfg)];
    match &result {
        InjectivityProbe::NoCollision { pairs_checked, .. } => {
            let _ = writeln!(out, "family={family} budget={budget} witness=none pairs_checked={pairs_checked}");
        }
        InjectivityProbe::Witness(w) => {
            let _ = writeln!(
                out,
                "family={family} budget={budget} witness: {:?} vs {:?} ppd_difference={:e} distinguishing={:?} discrepancy={:e}",
                w.first.nu, w.second.nu, w.ppd_difference, w.distinguishing, w.discrepancy
            );
        }
    }
    records.push(Record::Probe { family: family.clone(), budget, result: result.clone() });
    if cfg.family.is_categorical() {
        let mut rng = substream(cfg.seed, 0, 0);
        if let Some(demo) = two_worlds(cfg.family, &cfg.prior, budget, &mut rng)? {
            let _ = writeln!(
                out,
                "two worlds: report gap {:e}, global total variation {:e}",
                demo.report_gap, demo.total_variation
            );
            records.push(Record::TwoWorlds { family, demo });
        }
    }
    emit(path.as_ref(), &records, verbose, err)?;
    Ok(EXIT_OK)
}

fn cmd_conjectures(
    path: Option<&PathBuf>,
    verbose: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    if verbose {
        let _ = writeln!(err, "running evidence sweeps");
    }
    let report = run_default_sweeps()?;
    let mut tables = report.tables.clone();
    tables.push(report.symmetric.clone());
    let _ = write!(out, "{}", format_evidence(&tables, std::slice::from_ref(&report.dirichlet)));
    let mut records: Vec<Record> = tables.into_iter().map(|table| Record::Evidence { table }).collect();
    records.push(Record::Variance { sweep: report.dirichlet });
    emit(path, &records, verbose, err)?;
    Ok(EXIT_OK)
}

fn cmd_report(path: &PathBuf, out: &mut dyn Write) -> Result<i32> {
    let records = read_records(path)?;
    let _ = write!(out, "{}", format_table(&report_rows(&records)));
    Ok(EXIT_OK)
}
