//! Run configuration: flags, an optional config file, and defaults, merged
//! in that order of precedence.
//!
//! Config file grammar, one setting per line:
//!
//! ```text
//! # comment
//! key = value
//! ```
//!
//! Keys are the long flag names without the leading dashes (`sigma-plus`,
//! `a-grid`, ...). Blank lines and `#` comments are ignored; a key may appear
//! only once.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::closed_form::Method;
use crate::error::{Error, Result};
use crate::montecarlo::{McMode, McSpec};
use crate::params::PacketParams;
use crate::quadrature::QuadratureSpec;
use crate::scenarios::{DetectorBand, SlitConfig, SweepGrid};

#[derive(Debug, Parser)]
#[command(
    name = "popper",
    version,
    about = "Coincidence spreads of an entangled Gaussian pair behind Popper's slits"
)]
pub(crate) struct Cli {
    #[command(subcommand)]
    pub command: CommandLine,
}

#[derive(Debug, Subcommand)]
pub(crate) enum CommandLine {
    /// Momentum spread (Δk₂)² of the right particle for one slit setting
    #[command(allow_negative_numbers = true)]
    SpreadK2(Flags),
    /// Position spread (Δy₂)² at the right-screen plane for one slit setting
    #[command(allow_negative_numbers = true)]
    SpreadY2(Flags),
    /// Case (i): real right slit of half-width a versus none
    #[command(allow_negative_numbers = true)]
    CaseI(Flags),
    /// Case (ii): momentum spread against the left slit half-width
    #[command(allow_negative_numbers = true)]
    CaseIi(Flags),
    /// Every requested method over a parameter grid
    #[command(allow_negative_numbers = true)]
    Sweep(Flags),
    /// Run the invariant checks
    #[command(allow_negative_numbers = true)]
    Verify(Flags),
}

impl CommandLine {
    fn split(self) -> (Command, Flags) {
        match self {
            CommandLine::SpreadK2(f) => (Command::SpreadK2, f),
            CommandLine::SpreadY2(f) => (Command::SpreadY2, f),
            CommandLine::CaseI(f) => (Command::CaseI, f),
            CommandLine::CaseIi(f) => (Command::CaseIi, f),
            CommandLine::Sweep(f) => (Command::Sweep, f),
            CommandLine::Verify(f) => (Command::Verify, f),
        }
    }
}

/// Every flag is optional so that an absent flag can fall back to the config
/// file. Values stay as text until merged.
#[derive(Debug, Default, Args)]
pub(crate) struct Flags {
    /// Config file with `key = value` lines
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV destination (standard output when absent)
    #[arg(short, long)]
    output: Option<String>,
    /// Plain-text report destination
    #[arg(long)]
    report: Option<String>,
    /// Momentum width σ₊ [default: 1]
    #[arg(long)]
    sigma_plus: Option<String>,
    /// Momentum width σ₋ [default: 3]
    #[arg(long)]
    sigma_minus: Option<String>,
    /// Particle mass [default: 1]
    #[arg(long)]
    mass: Option<String>,
    /// Time since emission [default: 0]
    #[arg(long = "t")]
    t: Option<String>,
    /// Left slit half-width [default: 0.3]
    #[arg(long = "a")]
    a: Option<String>,
    /// Right slit half-width, or `inf` for none [default: inf]
    #[arg(long = "b")]
    b: Option<String>,
    /// Detector band half-width [default: 10·√(narrow-slit (Δk₂)²)]
    #[arg(long)]
    k_max: Option<String>,
    /// Grid `start:stop:log|lin:count`, or comma-separated values
    #[arg(long)]
    a_grid: Option<String>,
    #[arg(long)]
    b_grid: Option<String>,
    #[arg(long)]
    t_grid: Option<String>,
    #[arg(long)]
    sigma_plus_grid: Option<String>,
    #[arg(long)]
    sigma_minus_grid: Option<String>,
    #[arg(long)]
    mass_grid: Option<String>,
    /// Comma-separated: closed-narrow, closed-small-a, closed-wide, quadrature, monte-carlo
    #[arg(long)]
    methods: Option<String>,
    #[arg(long)]
    rel_tol: Option<String>,
    #[arg(long)]
    abs_tol: Option<String>,
    #[arg(long)]
    domain_sigmas: Option<String>,
    #[arg(long)]
    max_subdivisions: Option<String>,
    /// Monte Carlo samples per estimate [default: 100000]
    #[arg(long)]
    mc_samples: Option<String>,
    /// Monte Carlo seed [default: 0]
    #[arg(long)]
    seed: Option<String>,
}

impl Flags {
    fn lookup(&self, key: &str) -> Option<&str> {
        let v = match key {
            "output" => &self.output,
            "report" => &self.report,
            "sigma-plus" => &self.sigma_plus,
            "sigma-minus" => &self.sigma_minus,
            "mass" => &self.mass,
            "t" => &self.t,
            "a" => &self.a,
            "b" => &self.b,
            "k-max" => &self.k_max,
            "a-grid" => &self.a_grid,
            "b-grid" => &self.b_grid,
            "t-grid" => &self.t_grid,
            "sigma-plus-grid" => &self.sigma_plus_grid,
            "sigma-minus-grid" => &self.sigma_minus_grid,
            "mass-grid" => &self.mass_grid,
            "methods" => &self.methods,
            "rel-tol" => &self.rel_tol,
            "abs-tol" => &self.abs_tol,
            "domain-sigmas" => &self.domain_sigmas,
            "max-subdivisions" => &self.max_subdivisions,
            "mc-samples" => &self.mc_samples,
            "seed" => &self.seed,
            _ => return None,
        };
        v.as_deref()
    }
}

/// Keys accepted in a config file.
pub const CONFIG_KEYS: [&str; 22] = [
    "output",
    "report",
    "sigma-plus",
    "sigma-minus",
    "mass",
    "t",
    "a",
    "b",
    "k-max",
    "a-grid",
    "b-grid",
    "t-grid",
    "sigma-plus-grid",
    "sigma-minus-grid",
    "mass-grid",
    "methods",
    "rel-tol",
    "abs-tol",
    "domain-sigmas",
    "max-subdivisions",
    "mc-samples",
    "seed",
];

/// Parses the flat `key = value` config format.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or_default().trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("config line {}: expected key = value", i + 1)))?;
        let key = key.trim();
        if !CONFIG_KEYS.contains(&key) {
            return Err(Error::Config(format!(
                "config line {}: unknown key {key:?}",
                i + 1
            )));
        }
        if map
            .insert(key.to_string(), value.trim().to_string())
            .is_some()
        {
            return Err(Error::Config(format!(
                "config line {}: duplicate key {key:?}",
                i + 1
            )));
        }
    }
    Ok(map)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    SpreadK2,
    SpreadY2,
    CaseI,
    CaseIi,
    Sweep,
    Verify,
}

/// Fully resolved settings of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub params: PacketParams,
    pub slits: SlitConfig,
    /// `None` selects the per-parameter default band.
    pub band: Option<DetectorBand>,
    pub grid: SweepGrid,
    pub methods: Vec<Method>,
    pub quadrature: QuadratureSpec,
    pub mc: McSpec,
    pub output: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub seed: u64,
}

pub const DEFAULT_A_GRID: &str = "0.01:5:log:20";

struct Sources<'a> {
    flags: &'a Flags,
    file: &'a BTreeMap<String, String>,
}

impl Sources<'_> {
    fn raw(&self, key: &str) -> Option<&str> {
        self.flags
            .lookup(key)
            .or_else(|| self.file.get(key).map(String::as_str))
    }

    fn get<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.raw(key) {
            Some(s) => parse_value(key, s),
            None => Ok(default),
        }
    }
}

fn parse_value<T: FromStr>(key: &str, s: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::Config(format!("invalid value for {key}: {s:?}")))
}

fn parse_b(key: &str, s: &str) -> Result<Option<f64>> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("inf") {
        Ok(None)
    } else {
        parse_value(key, s).map(Some)
    }
}

/// Parses `start:stop:log|lin:count` or a comma-separated list.
pub fn parse_grid(key: &str, s: &str) -> Result<Vec<f64>> {
    let bad = |why: &str| Error::Config(format!("invalid {key} {s:?}: {why}"));
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    if parts.len() == 1 {
        return s.split(',').map(|v| parse_value(key, v)).collect();
    }
    if parts.len() != 4 {
        return Err(bad("expected start:stop:log|lin:count"));
    }
    let start: f64 = parse_value(key, parts[0])?;
    let stop: f64 = parse_value(key, parts[1])?;
    let count: usize = parse_value(key, parts[3])?;
    if count == 0 {
        return Err(bad("count must be at least 1"));
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    let step = |i: usize| i as f64 / (count - 1) as f64;
    match parts[2] {
        "lin" => Ok((0..count)
            .map(|i| start + (stop - start) * step(i))
            .collect()),
        "log" => {
            if !(start > 0.0 && stop > 0.0) {
                return Err(bad("log grids need positive end points"));
            }
            let mut v: Vec<f64> = (0..count)
                .map(|i| start * (stop / start).powf(step(i)))
                .collect();
            // Pin the end points exactly.
            v[0] = start;
            v[count - 1] = stop;
            Ok(v)
        }
        other => Err(bad(&format!("spacing must be log or lin, not {other:?}"))),
    }
}

fn parse_methods(s: &str) -> Result<Vec<Method>> {
    let all = [
        Method::ClosedNarrow,
        Method::ClosedSmallA,
        Method::ClosedWide,
        Method::Quadrature,
        Method::MonteCarlo,
    ];
    let mut out = Vec::new();
    for name in s.split(',').map(str::trim).filter(|n| !n.is_empty()) {
        let m = all
            .iter()
            .find(|m| m.to_string() == name)
            .ok_or_else(|| Error::Config(format!("invalid methods: unknown method {name:?}")))?;
        if !out.contains(m) {
            out.push(*m);
        }
    }
    if out.is_empty() {
        return Err(Error::Config("invalid methods: empty list".into()));
    }
    Ok(out)
}

const DEFAULT_METHODS: &str = "closed-narrow,closed-small-a,closed-wide,quadrature";

impl RunConfig {
    /// Merges parsed flags over the config-file map over the defaults.
    pub(crate) fn resolve(
        command: Command,
        flags: &Flags,
        file: &BTreeMap<String, String>,
    ) -> Result<Self> {
        let src = Sources { flags, file };
        let params = PacketParams::new(
            src.get("sigma-plus", 1.0)?,
            src.get("sigma-minus", 3.0)?,
            src.get("mass", 1.0)?,
            src.get("t", 0.0)?,
        )?;
        let b = match src.raw("b") {
            Some(s) => parse_b("b", s)?,
            None => None,
        };
        let slits = SlitConfig::new(src.get("a", 0.3)?, b)?;
        let band = match src.raw("k-max") {
            Some(s) => Some(DetectorBand::new(parse_value("k-max", s)?)?),
            None => None,
        };

        let grid_or = |key: &str, default: Vec<f64>| -> Result<Vec<f64>> {
            match src.raw(key) {
                Some(s) => parse_grid(key, s),
                None => Ok(default),
            }
        };
        let a_default = if command == Command::CaseIi {
            parse_grid("a-grid", DEFAULT_A_GRID)?
        } else {
            vec![slits.left_half_width()]
        };
        let b_grid = match src.raw("b-grid") {
            Some(s) => s
                .split(',')
                .map(|v| parse_b("b-grid", v))
                .collect::<Result<Vec<_>>>()?,
            None => vec![slits.right_half_width()],
        };
        let grid = SweepGrid {
            a: grid_or("a-grid", a_default)?,
            b: b_grid,
            t: grid_or("t-grid", vec![params.time()])?,
            sigma_plus: grid_or("sigma-plus-grid", vec![params.sigma_plus()])?,
            sigma_minus: grid_or("sigma-minus-grid", vec![params.sigma_minus()])?,
            mass: grid_or("mass-grid", vec![params.mass()])?,
        };
        grid.cells()?;

        let methods = parse_methods(src.raw("methods").unwrap_or(DEFAULT_METHODS))?;
        let base = QuadratureSpec::default();
        let quadrature = QuadratureSpec {
            relative_tolerance: src.get("rel-tol", base.relative_tolerance)?,
            absolute_tolerance: src.get("abs-tol", base.absolute_tolerance)?,
            domain_sigmas: src.get("domain-sigmas", base.domain_sigmas)?,
            max_subdivisions: src.get("max-subdivisions", base.max_subdivisions)?,
        };
        quadrature.validate()?;
        let seed = src.get("seed", 0u64)?;
        let mc = McSpec::new(
            src.get("mc-samples", 100_000usize)?,
            seed,
            McMode::PositionSpread,
        )?;
        Ok(Self {
            command,
            params,
            slits,
            band,
            grid,
            methods,
            quadrature,
            mc,
            output: src.raw("output").map(PathBuf::from),
            report: src.raw("report").map(PathBuf::from),
            seed,
        })
    }
}

/// Parses an argument list (program name first) and the config file it
/// names, if any.
pub fn parse_run_config(argv: &[String]) -> Result<RunConfig> {
    let cli = Cli::try_parse_from(argv).map_err(|e| Error::Config(e.to_string()))?;
    let (command, flags) = cli.command.split();
    resolve_flags(command, &flags)
}

pub(crate) fn resolve_flags(command: Command, flags: &Flags) -> Result<RunConfig> {
    let file = match &flags.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            parse_config_file(&text)?
        }
        None => BTreeMap::new(),
    };
    RunConfig::resolve(command, flags, &file)
}

pub(crate) fn split_command(cli: Cli) -> (Command, Flags) {
    cli.command.split()
}
