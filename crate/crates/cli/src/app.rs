//! Argument handling, the command table and the JSON envelope.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use clap::Parser;
use orbit_core::dynsys::SemigroupSpec;
use orbit_core::generic::{RankStrategy, StrategyRegistry};
use orbit_core::vanish::{DEFAULT_CAP, DEFAULT_LEN_LIMIT, DEFAULT_WINDOW};
use orbit_core::Point;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::parse::{parse_point, parse_system, ParseError, SystemFile};

pub fn fmt_point(p: &[orbit_core::FieldElem]) -> String {
    let parts: Vec<String> = p.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(", "))
}

/// `name (coords)` for named points, `(coords)` for literal ones.
pub fn tag(name: &str, p: &[orbit_core::FieldElem]) -> String {
    let coords = fmt_point(p);
    if name == coords {
        coords
    } else {
        format!("{name} {coords}")
    }
}

pub const DEFAULT_DEGREE: u32 = 2;
pub const DEFAULT_MAX_LEN: usize = 4;

#[derive(Debug, Parser)]
#[command(name = "orbit", version, about = "Orbit closures, exceptional loci and invariants of rational self-maps")]
#[command(after_help = "Commands: orbit, ideal, hilbert, generic-rank, exceptional, separate, phi-check, invariants, density, selftest")]
pub struct Cli {
    /// Command to run.
    pub command: String,
    /// System definition file (not needed by `selftest`).
    pub file: Option<PathBuf>,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Options {
    /// Emit one JSON object instead of text.
    #[arg(long)]
    pub json: bool,
    /// Truncation degree.
    #[arg(long, short = 'd')]
    pub degree: Option<u32>,
    /// Word length for orbit samples and the generic matrix.
    #[arg(long)]
    pub max_len: Option<usize>,
    /// Unchanged length increments required before an orbit ideal counts as stable.
    #[arg(long, default_value_t = DEFAULT_WINDOW)]
    pub window: usize,
    /// Longest word length tried while stabilizing.
    #[arg(long, default_value_t = DEFAULT_LEN_LIMIT)]
    pub len_limit: usize,
    /// Maximum number of orbit points.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    pub cap: usize,
    /// Seed for random specialization.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Generic-rank strategy.
    #[arg(long, default_value = "specialized")]
    pub mode: String,
    /// Point as `a,b,...` or the name of a point in the file (repeatable).
    #[arg(long, allow_hyphen_values = true)]
    pub point: Vec<String>,
    /// Probe point for the fiber check (repeatable).
    #[arg(long, allow_hyphen_values = true)]
    pub probe: Vec<String>,
    /// Maximum number of minors to examine.
    #[arg(long, default_value_t = orbit_core::generic::DEFAULT_MINOR_BUDGET)]
    pub budget: usize,
    /// Degree bound for the invariant search in `density` (default: twice the degree).
    #[arg(long)]
    pub d_inv: Option<u32>,
    /// Numerator of a rational invariant to verify.
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<String>,
    /// Denominator of a rational invariant to verify (default 1).
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<String>,
    /// Report `timing_ms` as null, making output reproducible byte for byte.
    #[arg(long)]
    pub no_timing: bool,
}

impl Options {
    pub fn degree(&self) -> u32 {
        self.degree.unwrap_or(DEFAULT_DEGREE)
    }

    pub fn max_len(&self) -> usize {
        self.max_len.unwrap_or(DEFAULT_MAX_LEN)
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Core(#[from] orbit_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(orbit_core::Error::SpecializationExhausted { .. }) => 1,
            _ => 2,
        }
    }
}

/// Conditions that make a successful run exit with status 1.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Flags {
    pub skipped_words: Vec<String>,
    pub unstable: bool,
    pub outside_domain: bool,
    pub failed_checks: usize,
}

impl Flags {
    pub fn raised(&self) -> bool {
        self.unstable || self.outside_domain || self.failed_checks > 0
    }

    pub fn skip(&mut self, words: impl IntoIterator<Item = String>) {
        for w in words {
            if !self.skipped_words.contains(&w) {
                self.skipped_words.push(w);
            }
        }
        if !self.skipped_words.is_empty() {
            self.outside_domain = true;
        }
    }
}

pub struct Report {
    pub result: Value,
    pub text: String,
    pub flags: Flags,
}

pub struct Ctx<'a> {
    pub sys: Option<&'a SystemFile>,
    pub spec: Option<SemigroupSpec>,
    pub file: Option<String>,
    pub opts: &'a Options,
    pub strategies: &'a StrategyRegistry,
}

impl Ctx<'_> {
    pub fn system(&self) -> Result<(&SystemFile, &SemigroupSpec), CliError> {
        match (self.sys, &self.spec) {
            (Some(s), Some(spec)) => Ok((s, spec)),
            _ => Err(CliError::Usage("a system file is required".into())),
        }
    }

    pub fn strategy(&self) -> Result<Arc<dyn RankStrategy>, CliError> {
        self.strategies.get(&self.opts.mode).map_err(|_| {
            let known: Vec<&str> = self.strategies.names().collect();
            CliError::Usage(format!("unknown mode '{}' (expected one of: {})", self.opts.mode, known.join(", ")))
        })
    }

    fn resolve(&self, raw: &[String]) -> Result<Vec<(String, Point)>, CliError> {
        let (sys, _) = self.system()?;
        raw.iter()
            .map(|s| {
                let p = match sys.point(s.trim()) {
                    Some(p) => p.clone(),
                    None => parse_point(s, sys.field).map_err(|m| CliError::Usage(format!("bad point: {m}")))?,
                };
                if p.len() != sys.vars.len() {
                    return Err(CliError::Usage(format!(
                        "point '{s}' has {} coordinates, expected {}",
                        p.len(),
                        sys.vars.len()
                    )));
                }
                let name = if sys.point(s.trim()).is_some() { s.trim().to_string() } else { fmt_point(&p) };
                Ok((name, p))
            })
            .collect()
    }

    /// `--point` values, or every point named in the file when none are given.
    pub fn points(&self) -> Result<Vec<(String, Point)>, CliError> {
        let (sys, _) = self.system()?;
        if self.opts.point.is_empty() {
            return Ok(sys.points.clone());
        }
        self.resolve(&self.opts.point)
    }

    pub fn points_required(&self) -> Result<Vec<(String, Point)>, CliError> {
        let pts = self.points()?;
        if pts.is_empty() {
            return Err(CliError::Usage("no points: pass --point or name points in the file".into()));
        }
        Ok(pts)
    }

    pub fn probes(&self) -> Result<Vec<(String, Point)>, CliError> {
        self.resolve(&self.opts.probe)
    }

    pub fn names(&self) -> Vec<String> {
        self.sys.map(|s| s.vars.clone()).unwrap_or_default()
    }
}

pub trait Command: Send + Sync {
    fn name(&self) -> &'static str;
    fn about(&self) -> &'static str;
    fn needs_system(&self) -> bool {
        true
    }
    fn run(&self, ctx: &Ctx) -> Result<Report, CliError>;
}

#[derive(Clone)]
pub struct CommandRegistry {
    commands: BTreeMap<&'static str, Arc<dyn Command>>,
}

impl CommandRegistry {
    pub fn empty() -> Self {
        CommandRegistry { commands: BTreeMap::new() }
    }

    pub fn register(&mut self, c: Arc<dyn Command>) {
        self.commands.insert(c.name(), c);
    }

    pub fn get(&self, name: &str) -> Option<Arc<dyn Command>> {
        self.commands.get(name).cloned()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Arc<dyn Command>> {
        self.commands.values()
    }
}

/// Text written by a run, and its exit status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Execution {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn input_json(file: Option<&str>, sys: Option<&SystemFile>) -> Value {
    let Some(sys) = sys else {
        return json!({ "file": file });
    };
    let gens: Vec<Vec<String>> = sys
        .generators
        .iter()
        .map(|g| g.iter().map(|c| c.display(&sys.vars).to_string()).collect())
        .collect();
    let points: BTreeMap<&str, &Point> = sys.points.iter().map(|(n, p)| (n.as_str(), p)).collect();
    json!({
        "file": file,
        "field": sys.field,
        "vars": sys.vars,
        "monoid": sys.monoid,
        "generators": gens,
        "points": points,
    })
}

fn usage(msg: impl std::fmt::Display) -> Execution {
    Execution { code: 2, stdout: String::new(), stderr: format!("error: {msg}\n") }
}

pub fn execute<I, T>(registry: &CommandRegistry, args: I) -> Execution
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Execution { code, stdout: text, stderr: String::new() }
            } else {
                Execution { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let Some(cmd) = registry.get(&cli.command) else {
        let known: Vec<&str> = registry.iter().map(|c| c.name()).collect();
        return usage(format!("unknown command '{}' (expected one of: {})", cli.command, known.join(", ")));
    };
    let started = Instant::now();
    let file = cli.file.as_ref().map(|p| p.display().to_string());
    let sys = match (&cli.file, cmd.needs_system()) {
        (Some(path), _) => {
            let text = match std::fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => return usage(format!("cannot read {}: {e}", path.display())),
            };
            match parse_system(&text) {
                Ok(s) => Some(s),
                Err(e) => return usage(format!("{}: {e}", path.display())),
            }
        }
        (None, true) => return usage(format!("'{}' needs a system file", cmd.name())),
        (None, false) => None,
    };
    let spec = match sys.as_ref().map(SystemFile::spec).transpose() {
        Ok(s) => s,
        Err(e) => return usage(e),
    };
    let strategies = StrategyRegistry::with_defaults();
    let ctx = Ctx { sys: sys.as_ref(), spec, file: file.clone(), opts: &cli.opts, strategies: &strategies };
    let report = match cmd.run(&ctx) {
        Ok(r) => r,
        Err(e) => return Execution { code: e.exit_code(), stdout: String::new(), stderr: format!("error: {e}\n") },
    };
    let code = if report.flags.raised() { 1 } else { 0 };
    let stdout = if cli.opts.json {
        let o = &cli.opts;
        let timing = (!o.no_timing).then(|| started.elapsed().as_millis() as u64);
        let envelope = json!({
            "command": cmd.name(),
            "input": input_json(file.as_deref(), sys.as_ref()),
            "params": {
                "degree": o.degree(),
                "max_len": o.max_len(),
                "window": o.window,
                "len_limit": o.len_limit,
                "seed": o.seed,
                "mode": o.mode,
            },
            "result": report.result,
            "flags": report.flags,
            "timing_ms": timing,
        });
        format!("{}\n", serde_json::to_string_pretty(&envelope).expect("JSON values serialize"))
    } else {
        let mut t = report.text;
        let f = &report.flags;
        if !f.skipped_words.is_empty() {
            t.push_str(&format!("skipped words (indeterminate): {}\n", f.skipped_words.join(", ")));
        }
        if f.unstable {
            t.push_str("warning: not stabilized\n");
        }
        if f.outside_domain {
            t.push_str("warning: outside the domain of some sampled word\n");
        }
        if f.failed_checks > 0 {
            t.push_str(&format!("failed checks: {}\n", f.failed_checks));
        }
        t
    };
    Execution { code, stdout, stderr: String::new() }
}
