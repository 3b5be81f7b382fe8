//! Line-delimited JSON records written by the CLI, and the summary table
//! built back from them.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::aggregation::TwoWorlds;
use crate::conjecture_lab::{EvidenceTable, VarianceSweep};
use crate::error::{Error, Result};
use crate::families::Family;
use crate::mechanisms::InjectivityProbe;
use crate::scoring::ScoreRule;
use crate::simharness::{MarginRow, RunSummary, ScenarioConfig, TrialResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
pub enum Record {
    /// First line of every scenario output: the resolved config and seed.
    Header {
        command: String,
        version: String,
        seed: u64,
        config: ScenarioConfig,
    },
    Trial {
        family: String,
        result: TrialResult,
    },
    Summary {
        family: String,
        summary: RunSummary,
    },
    Margin {
        family: String,
        rule: ScoreRule,
        row: MarginRow,
    },
    Probe {
        family: String,
        budget: usize,
        result: InjectivityProbe,
    },
    TwoWorlds {
        family: String,
        demo: TwoWorlds,
    },
    Evidence {
        table: EvidenceTable,
    },
    Variance {
        sweep: VarianceSweep,
    },
}

impl Record {
    pub fn header(command: &str, cfg: &ScenarioConfig) -> Self {
        Record::Header {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: cfg.seed,
            config: cfg.clone(),
        }
    }
}

/// Row key for the report table; categorical families carry their `K`.
pub fn family_label(family: Family) -> String {
    match family {
        Family::CategoricalDirichlet { k } => format!("CategoricalDirichlet(K={k})"),
        f => f.name().to_string(),
    }
}

/// One JSON object per line, each line newline-terminated.
pub fn to_jsonl(records: &[Record]) -> Result<String> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).map_err(|e| Error::Io(e.to_string()))?);
        out.push('\n');
    }
    Ok(out)
}

pub fn write_records(path: &Path, records: &[Record]) -> Result<()> {
    std::fs::write(path, to_jsonl(records)?)?;
    Ok(())
}

/// Parses JSONL text; blank lines are skipped and errors name the line.
pub fn parse_records(text: &str) -> Result<Vec<Record>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l)
                .map_err(|e| Error::Config(format!("line {}: malformed record: {e}", i + 1)))
        })
        .collect()
}

pub fn read_records(path: &Path) -> Result<Vec<Record>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_records(&text)
}

/// Per-family roll-up of trial and margin records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub family: String,
    pub trials: usize,
    pub passed: usize,
    pub pass_rate: f64,
    pub max_rel_error: f64,
    pub min_margin: Option<f64>,
    pub mean_score: Option<f64>,
}

pub fn report_rows(records: &[Record]) -> Vec<ReportRow> {
    #[derive(Default)]
    struct Acc {
        trials: usize,
        passed: usize,
        max_err: f64,
        min_margin: Option<f64>,
        score_sum: f64,
        scores: usize,
    }
    let mut by_family: BTreeMap<&str, Acc> = BTreeMap::new();
    let lower = |m: Option<f64>, v: f64| Some(m.map_or(v, |m: f64| m.min(v)));
    for r in records {
        match r {
            Record::Trial { family, result } => {
                let acc = by_family.entry(family).or_default();
                acc.trials += 1;
                acc.passed += usize::from(result.passed);
                acc.max_err = acc.max_err.max(result.max_rel_error);
                for a in &result.agents {
                    acc.min_margin = lower(acc.min_margin, a.margin);
                    acc.score_sum += a.score;
                    acc.scores += 1;
                }
            }
            Record::Margin { family, row, .. } => {
                let acc = by_family.entry(family).or_default();
                acc.min_margin = lower(acc.min_margin, row.margin);
            }
            _ => {}
        }
    }
    by_family
        .into_iter()
        .map(|(family, a)| ReportRow {
            family: family.to_string(),
            trials: a.trials,
            passed: a.passed,
            pass_rate: if a.trials == 0 { 0.0 } else { a.passed as f64 / a.trials as f64 },
            max_rel_error: a.max_err,
            min_margin: a.min_margin,
            mean_score: (a.scores > 0).then(|| a.score_sum / a.scores as f64),
        })
        .collect()
}

pub fn format_table(rows: &[ReportRow]) -> String {
    let opt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |x| format!("{x:.6e}"));
    let mut s = format!(
        "{:<26} {:>8} {:>10} {:>14} {:>14} {:>14}\n",
        "family", "trials", "pass_rate", "max_err", "min_margin", "mean_score"
    );
    for r in rows {
        let _ = writeln!(
            s,
            "{:<26} {:>8} {:>10.4} {:>14.6e} {:>14} {:>14}",
            r.family,
            r.trials,
            r.pass_rate,
            r.max_rel_error,
            opt(r.min_margin),
            opt(r.mean_score)
        );
    }
    s
}

/// Human-readable evidence tables for the conjecture sweeps.
pub fn format_evidence(tables: &[EvidenceTable], sweeps: &[VarianceSweep]) -> String {
    let mut s = String::new();
    for t in tables {
        let _ = writeln!(
            s,
            "{} |X|={} k={} mean={:?} flag={:?} min_dist={:.3e} max_dist={:.3e}",
            t.family, t.outcomes, t.dim, t.mean, t.flag, t.min_distance, t.max_distance
        );
        for (n, kl) in t.ns.iter().zip(&t.kl_to_mode) {
            let _ = writeln!(s, "  n={n:<6} kl_to_mode={kl:.6e}");
        }
        if let Some(v) = &t.variance {
            let _ = writeln!(
                s,
                "  variance trace n={}..{}: {:.6e} -> {:.6e}, strictly decreasing: {}",
                v.ns.first().copied().unwrap_or(0.0),
                v.ns.last().copied().unwrap_or(0.0),
                v.traces.first().copied().unwrap_or(0.0),
                v.traces.last().copied().unwrap_or(0.0),
                v.strictly_decreasing
            );
        }
    }
    for v in sweeps {
        let _ = writeln!(
            s,
            "{} mean={:?} variance trace {:.6e} -> {:.6e}, strictly decreasing: {}",
            v.label,
            v.mean,
            v.traces.first().copied().unwrap_or(0.0),
            v.traces.last().copied().unwrap_or(0.0),
            v.strictly_decreasing
        );
    }
    s
}
