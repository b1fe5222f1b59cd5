//! Command-line arguments and the TOML experiment file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use splinegabor::{ExperimentConfig, IndexRange, Method, TargetKind};

#[derive(Debug, Parser)]
#[command(name = "splinegabor", version, about = "Sparse B-spline Gabor approximation of scattered fields")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one experiment, or every experiment in a config file.
    Run(RunArgs),
    /// Dual2 and OMP(20) errors for both targets at k = 5 and k = 15.
    Table1(RunArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// TOML file with a `[defaults]` section and `[experiment.NAME]` sections
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// output directory
    #[arg(long, env = "SPLINEGABOR_OUT")]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub overrides: Overrides,
}

/// Settings that override both the defaults and the config file.
#[derive(Debug, Default, Clone, Args)]
pub struct Overrides {
    /// cylinder or point-source
    #[arg(long)]
    pub target: Option<TargetKind>,
    /// wavenumber
    #[arg(long)]
    pub k: Option<f64>,
    /// dual1, dual2, canonical, least-squares, omp or omp-functional
    #[arg(long)]
    pub method: Option<Method>,
    #[arg(long)]
    pub blocksize: Option<usize>,
    /// comma-separated coefficient counts
    #[arg(long, value_delimiter = ',')]
    pub budgets: Option<Vec<usize>>,
    /// B-spline order
    #[arg(long)]
    pub order: Option<usize>,
    /// shift step
    #[arg(long, value_parser = parse_ratio)]
    pub a: Option<f64>,
    /// modulation step, a decimal or a fraction such as 1/3
    #[arg(long, value_parser = parse_ratio)]
    pub b: Option<f64>,
    /// length L of the interval [0, L]
    #[arg(long)]
    pub length: Option<f64>,
    /// samples on [0, L]
    #[arg(long)]
    pub points: Option<usize>,
    /// relative residual at which OMP stops early; 0 runs the whole budget
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// treat the target as zero outside [0, L] instead of evaluating it there
    #[arg(long)]
    pub no_extend: bool,
}

/// A number written as a decimal or as a fraction `p/q`.
pub fn parse_ratio(s: &str) -> std::result::Result<f64, String> {
    let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("'{s}': {e}"));
    match s.split_once('/') {
        Some((p, q)) => Ok(parse(p)? / parse(q)?),
        None => parse(s),
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Ratio {
    Number(f64),
    Text(String),
}

impl Ratio {
    fn value(&self) -> Result<f64> {
        match self {
            Ratio::Number(v) => Ok(*v),
            Ratio::Text(s) => parse_ratio(s).map_err(anyhow::Error::msg),
        }
    }
}

/// One section of the config file; every key is optional.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct Section {
    target: Option<String>,
    k: Option<f64>,
    order: Option<usize>,
    a: Option<Ratio>,
    b: Option<Ratio>,
    length: Option<f64>,
    points: Option<usize>,
    method: Option<String>,
    blocksize: Option<usize>,
    budgets: Option<Vec<usize>>,
    /// `[min, max]`
    modulations: Option<[i64; 2]>,
    /// `[min, max]`
    shifts: Option<[i64; 2]>,
    extend: Option<bool>,
    tolerance: Option<f64>,
}

impl Section {
    fn apply(&self, c: &mut ExperimentConfig) -> Result<()> {
        if let Some(t) = &self.target {
            c.target = t.parse()?;
        }
        if let Some(m) = &self.method {
            c.method = m.parse()?;
        }
        if let Some(a) = &self.a {
            c.a = a.value()?;
        }
        if let Some(b) = &self.b {
            c.b = b.value()?;
        }
        if let Some([lo, hi]) = self.modulations {
            c.modulations = Some(range(lo, hi, "modulations")?);
        }
        if let Some([lo, hi]) = self.shifts {
            c.shifts = Some(range(lo, hi, "shifts")?);
        }
        set(&mut c.k, self.k);
        set(&mut c.order, self.order);
        set(&mut c.length, self.length);
        set(&mut c.points, self.points);
        set(&mut c.blocksize, self.blocksize);
        set(&mut c.budgets, self.budgets.clone());
        set(&mut c.extend, self.extend);
        set(&mut c.tolerance, self.tolerance);
        Ok(())
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    out: Option<PathBuf>,
    #[serde(default)]
    defaults: Section,
    #[serde(default)]
    experiment: BTreeMap<String, Section>,
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn range(lo: i64, hi: i64, what: &str) -> Result<IndexRange> {
    if lo > hi {
        bail!("{what} range [{lo}, {hi}] is empty");
    }
    Ok(IndexRange::new(lo, hi))
}

impl Overrides {
    fn apply(&self, c: &mut ExperimentConfig) {
        set(&mut c.target, self.target);
        set(&mut c.k, self.k);
        set(&mut c.method, self.method);
        set(&mut c.blocksize, self.blocksize);
        set(&mut c.budgets, self.budgets.clone());
        set(&mut c.order, self.order);
        set(&mut c.a, self.a);
        set(&mut c.b, self.b);
        set(&mut c.length, self.length);
        set(&mut c.points, self.points);
        set(&mut c.tolerance, self.tolerance);
        if self.no_extend {
            c.extend = false;
        }
    }
}

/// Experiments to run, named, with their output root.
#[derive(Debug)]
pub struct Plan {
    pub out: PathBuf,
    pub experiments: Vec<(String, ExperimentConfig)>,
}

pub const DEFAULT_OUT: &str = "splinegabor-out";

/// Resolves defaults, then the config file, then command-line flags. The
/// output directory comes from `--out` or the environment, then the file.
pub fn plan(args: &RunArgs) -> Result<Plan> {
    let file = match &args.config {
        Some(path) => read_config(path)?,
        None => ConfigFile::default(),
    };
    let mut base = ExperimentConfig::default();
    file.defaults.apply(&mut base).context("[defaults]")?;

    let mut experiments = Vec::new();
    if file.experiment.is_empty() {
        let mut c = base;
        args.overrides.apply(&mut c);
        experiments.push((default_name(&c), c));
    } else {
        for (name, section) in &file.experiment {
            check_name(name)?;
            let mut c = base.clone();
            section.apply(&mut c).with_context(|| format!("[experiment.{name}]"))?;
            args.overrides.apply(&mut c);
            experiments.push((name.clone(), c));
        }
    }
    for (name, c) in &experiments {
        c.validate().with_context(|| format!("experiment '{name}'"))?;
    }
    let out = args
        .out
        .clone()
        .or(file.out)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    Ok(Plan { out, experiments })
}

fn read_config(path: &Path) -> Result<ConfigFile> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn check_name(name: &str) -> Result<()> {
    let ok = !name.is_empty()
        && name != "."
        && name != ".."
        && name.chars().all(|ch| ch.is_ascii_alphanumeric() || "-_.".contains(ch));
    if !ok {
        bail!("experiment name '{name}' must be letters, digits, '-', '_' or '.'");
    }
    Ok(())
}

/// `cylinder-k5-dual2`, with the blocksize appended for the greedy methods.
pub fn default_name(c: &ExperimentConfig) -> String {
    let mut name = format!("{}-k{}-{}", c.target, c.k, c.method);
    if matches!(c.method, Method::Omp | Method::OmpFunctional) {
        name.push_str(&format!("{}", c.blocksize));
    }
    name
}
