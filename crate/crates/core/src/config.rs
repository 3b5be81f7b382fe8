//! Scenario files: line-oriented `key = value` pairs under section headers.
//!
//! ```text
//! # two agents, three labels
//! [family]
//! name = CategoricalDirichlet
//! k = 3
//!
//! [prior]
//! alpha = 1, 1, 1
//!
//! [agents]
//! count = 2
//! samples = 20, 22
//!
//! [mechanism]
//! kind = TwoSampleDirichlet
//!
//! [run]
//! trials = 100
//! seed = 42
//! output = records.jsonl
//! ```
//!
//! `[family]` takes `name` plus `variance` (Normal, default 1) or `k`
//! (categorical). `[prior]` takes `alpha` for the categorical families and
//! `nu`, `n` otherwise. `[agents]` takes `count` and either `samples` (one
//! count per agent) or `min` and `max` (uniform range). `output` is optional.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::families::{DirichletHyper, Family, Hyper};
use crate::mechanisms::MechanismKind;
use crate::simharness::{SampleCountLaw, ScenarioConfig};

const SECTIONS: [(&str, &[&str]); 5] = [
    ("family", &["name", "variance", "k"]),
    ("prior", &["alpha", "nu", "n"]),
    ("agents", &["count", "samples", "min", "max"]),
    ("mechanism", &["kind"]),
    ("run", &["trials", "seed", "output"]),
];

struct Entry {
    value: String,
    line: usize,
}

struct Doc {
    entries: BTreeMap<(String, String), Entry>,
}

impl Doc {
    fn parse(text: &str) -> Result<Doc> {
        let mut entries = BTreeMap::new();
        let mut section: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| at(line_no, "unterminated section header"))?
                    .trim();
                if !SECTIONS.iter().any(|(s, _)| *s == name) {
                    return Err(at(line_no, &format!("unknown section [{name}]")));
                }
                section = Some(name.to_string());
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| at(line_no, "expected `key = value`"))?;
            let (key, value) = (key.trim(), value.trim());
            let sec = section
                .as_deref()
                .ok_or_else(|| at(line_no, "key before any section header"))?;
            let allowed = SECTIONS.iter().find(|(s, _)| *s == sec).map(|(_, k)| *k).unwrap_or(&[]);
            if !allowed.contains(&key) {
                return Err(at(line_no, &format!("unknown key `{key}` in [{sec}]")));
            }
            let slot = (sec.to_string(), key.to_string());
            if entries.contains_key(&slot) {
                return Err(at(line_no, &format!("duplicate key `{key}` in [{sec}]")));
            }
            entries.insert(slot, Entry { value: value.to_string(), line: line_no });
        }
        Ok(Doc { entries })
    }

    fn get(&self, sec: &str, key: &str) -> Option<&Entry> {
        self.entries.get(&(sec.to_string(), key.to_string()))
    }

    fn require(&self, sec: &str, key: &str) -> Result<&Entry> {
        self.get(sec, key)
            .ok_or_else(|| Error::Config(format!("missing `{key}` in [{sec}]")))
    }

    fn scalar<T: FromStr>(&self, sec: &str, key: &str) -> Result<Option<T>> {
        self.get(sec, key)
            .map(|e| {
                e.value
                    .parse()
                    .map_err(|_| at(e.line, &format!("cannot parse `{key}` from {:?}", e.value)))
            })
            .transpose()
    }

    fn required<T: FromStr>(&self, sec: &str, key: &str) -> Result<T> {
        self.require(sec, key)?;
        Ok(self.scalar(sec, key)?.expect("checked present"))
    }

    fn list<T: FromStr>(&self, sec: &str, key: &str) -> Result<Option<Vec<T>>> {
        self.get(sec, key)
            .map(|e| {
                if e.value.is_empty() {
                    return Ok(Vec::new());
                }
                e.value
                    .split(',')
                    .map(|s| {
                        s.trim()
                            .parse()
                            .map_err(|_| at(e.line, &format!("cannot parse {:?} in `{key}`", s.trim())))
                    })
                    .collect()
            })
            .transpose()
    }

    fn line_of(&self, sec: &str, key: &str) -> usize {
        self.get(sec, key).map_or(0, |e| e.line)
    }
}

fn at(line: usize, msg: &str) -> Error {
    Error::Config(format!("line {line}: {msg}"))
}

/// Parses and validates a scenario.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let doc = Doc::parse(text)?;

    let name = &doc.require("family", "name")?.value;
    let family = match name.as_str() {
        "NormalKnownVar" => Family::NormalKnownVar {
            variance: doc.scalar("family", "variance")?.unwrap_or(1.0),
        },
        "PoissonGamma" => Family::PoissonGamma,
        "UniformPareto" => Family::UniformPareto,
        "CategoricalDirichlet" => Family::CategoricalDirichlet { k: doc.required("family", "k")? },
        "BernoulliBeta" => Family::BernoulliBeta,
        other => {
            return Err(at(doc.line_of("family", "name"), &format!("unknown family {other:?}")))
        }
    };
    family
        .validate()
        .map_err(|e| at(doc.line_of("family", "name"), &e.to_string()))?;

    let prior = if family.is_categorical() {
        let alpha: Vec<f64> = doc.list("prior", "alpha")?.ok_or_else(|| {
            Error::Config(format!("missing `alpha` in [prior] for {}", family.name()))
        })?;
        let line = doc.line_of("prior", "alpha");
        if alpha.len() != family.dim() {
            return Err(at(
                line,
                &format!("alpha has {} entries, family has {} labels", alpha.len(), family.dim()),
            ));
        }
        DirichletHyper::new(alpha).map_err(|e| at(line, &e.to_string()))?.into()
    } else {
        let nu: Vec<f64> = doc
            .list("prior", "nu")?
            .ok_or_else(|| Error::Config("missing `nu` in [prior]".into()))?;
        let h = Hyper::new(nu, doc.required("prior", "n")?);
        family
            .validate_hyper(&h)
            .map_err(|e| at(doc.line_of("prior", "nu"), &e.to_string()))?;
        h
    };

    let agents: usize = doc.required("agents", "count")?;
    let samples = match (doc.list::<usize>("agents", "samples")?, doc.scalar("agents", "min")?, doc.scalar("agents", "max")?) {
        (Some(c), None, None) => SampleCountLaw::Fixed(c),
        (None, Some(min), Some(max)) => SampleCountLaw::Range { min, max },
        (None, None, None) if agents == 0 => SampleCountLaw::Fixed(Vec::new()),
        _ => {
            return Err(Error::Config(
                "[agents] needs either `samples` or both `min` and `max`".into(),
            ))
        }
    };

    let kind_entry = doc.require("mechanism", "kind")?;
    let mechanism = MechanismKind::parse(&kind_entry.value)
        .map_err(|e| at(kind_entry.line, &e.to_string()))?;

    let cfg = ScenarioConfig {
        family,
        prior,
        agents,
        samples,
        mechanism,
        trials: doc.required("run", "trials")?,
        seed: doc.required("run", "seed")?,
        output: doc.get("run", "output").map(|e| PathBuf::from(&e.value)),
    };
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(", ")
}

/// Writes `cfg` in the format [`parse_config`] reads.
pub fn render_config(cfg: &ScenarioConfig) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "[family]\nname = {}", cfg.family.name());
    match cfg.family {
        Family::NormalKnownVar { variance } => {
            let _ = writeln!(s, "variance = {variance:?}");
        }
        Family::CategoricalDirichlet { k } => {
            let _ = writeln!(s, "k = {k}");
        }
        _ => {}
    }
    let _ = writeln!(s, "\n[prior]");
    if cfg.family.is_categorical() {
        let _ = writeln!(s, "alpha = {}", join(&cfg.prior.nu.iter().map(|v| format!("{v:?}")).collect::<Vec<_>>()));
    } else {
        let _ = writeln!(s, "nu = {}", join(&cfg.prior.nu.iter().map(|v| format!("{v:?}")).collect::<Vec<_>>()));
        let _ = writeln!(s, "n = {:?}", cfg.prior.n);
    }
    let _ = writeln!(s, "\n[agents]\ncount = {}", cfg.agents);
    match &cfg.samples {
        SampleCountLaw::Fixed(c) => {
            let _ = writeln!(s, "samples = {}", join(c));
        }
        SampleCountLaw::Range { min, max } => {
            let _ = writeln!(s, "min = {min}\nmax = {max}");
        }
    }
    let _ = writeln!(s, "\n[mechanism]\nkind = {}", cfg.mechanism.name());
    let _ = writeln!(s, "\n[run]\ntrials = {}\nseed = {}", cfg.trials, cfg.seed);
    if let Some(out) = &cfg.output {
        let _ = writeln!(s, "output = {}", out.display());
    }
    s
}
