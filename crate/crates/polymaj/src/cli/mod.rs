//! The `polymaj` command line.
//!
//! Every command resolves a [`RunConfig`] from flags and an optional JSON
//! config file (flags win), runs inside a rayon pool capped by
//! `--threads`, and emits `{meta, result}`. With `--out DIR` the report
//! goes to `DIR/report.json` next to the command's artifacts and a timing
//! sidecar; otherwise it is printed to stdout.

mod check;
mod cmd;

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::{Instant, SystemTime};

use clap::{Args, Parser, Subcommand, ValueEnum};
use polymaj_core::synth::{BandRule, Overrides, DEFAULT_MAX_WIDTH};
use serde::Deserialize;

use crate::report::{self, Format, Report, RunMeta, Sidecar};
use crate::{exit, io, Error, Result};

pub use check::{GammaGrid, InequalityGrid, LemmaGrid, LemmaTuple, TailsGrid};

#[derive(Debug, Parser)]
#[command(name = "polymaj", version, about = "Probabilistic polynomials and approximate-majority circuits")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// Root seed of every random choice [default: 0]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Samples or Monte Carlo trials [default: per command]
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    /// Cap on worker threads; 0 means one per core [default: 0]
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Directory for the report and artifacts [default: report on stdout]
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Format of the report printed to stdout [default: json]
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    /// Largest arity for exhaustive modes [default: per command]
    #[arg(long, global = true)]
    pub max_n: Option<u32>,
    /// Largest level width a synthesized circuit may have [default: 1e7]
    #[arg(long, global = true)]
    pub max_width: Option<f64>,
    /// Planner overrides, e.g. `A=3,width=2^14,topwidth=2^14,stop=4`
    #[arg(long = "override", global = true, value_parser = parse_overrides)]
    pub overrides: Option<Overrides>,
    /// JSON file with any of the flags above (kebab-case keys)
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Compile a formula file into a probabilistic polynomial and measure
    /// its per-input error.
    Compile { formula: PathBuf },
    /// Plan and synthesize a monotone approximate-majority circuit.
    Synth {
        #[arg(short, long)]
        n: u64,
        #[arg(short, long)]
        d: usize,
        #[arg(long, default_value_t = 0.25)]
        epsilon: f64,
        /// Witness inputs drawn at the two margin weights
        #[arg(long, default_value_t = 8)]
        witnesses: usize,
        /// Resample until every witness is inside its bands
        #[arg(long)]
        tries: Option<usize>,
        /// `textbook` or `mean-field:<sigmas>`
        #[arg(long, default_value = "mean-field:4", value_parser = parse_rule)]
        rule: BandRule,
    },
    /// Certify a netlist as an approximate majority.
    Verify {
        netlist: PathBuf,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
    },
    /// Minimum degree of an F2 polynomial within epsilon of a function.
    Degree {
        /// Big-endian hex truth table
        #[arg(long, conflicts_with_all = ["netlist", "majority"])]
        hex: Option<String>,
        /// Variable count for a short hex table
        #[arg(long, requires = "hex")]
        vars: Option<u32>,
        /// Netlist evaluated exhaustively
        #[arg(long, conflicts_with = "majority")]
        netlist: Option<PathBuf>,
        /// Majority arities, e.g. `1,2,3,4,5`
        #[arg(long, value_delimiter = ',')]
        majority: Vec<u32>,
        #[arg(long)]
        epsilon: f64,
    },
    /// Sweep a parameter grid through one of the analytic checks.
    Check {
        #[arg(value_enum)]
        kind: CheckKind,
        /// JSON grid file [default: built-in grid]
        #[arg(long)]
        grid: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    Lemma,
    Inequality,
    Gamma,
    Tails,
}

/// Config file: the global flags, same names.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct ConfigFile {
    seed: Option<u64>,
    trials: Option<u64>,
    threads: Option<usize>,
    out: Option<PathBuf>,
    format: Option<Format>,
    max_n: Option<u32>,
    max_width: Option<f64>,
    #[serde(rename = "override")]
    overrides: Option<Overrides>,
}

/// Resolved settings of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub trials: Option<u64>,
    pub threads: usize,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub max_n: Option<u32>,
    pub max_width: f64,
    pub overrides: Overrides,
}

impl RunConfig {
    pub fn resolve(g: &GlobalArgs) -> Result<Self> {
        let file = match &g.config {
            Some(p) => serde_json::from_str::<ConfigFile>(&io::read_text(p)?)
                .map_err(|source| Error::Json { context: p.display().to_string(), source })?,
            None => ConfigFile::default(),
        };
        Ok(RunConfig {
            seed: g.seed.or(file.seed).unwrap_or(0),
            trials: g.trials.or(file.trials),
            threads: g.threads.or(file.threads).unwrap_or(0),
            out: g.out.clone().or(file.out),
            format: g.format.or(file.format).unwrap_or_default(),
            max_n: g.max_n.or(file.max_n),
            max_width: g.max_width.or(file.max_width).unwrap_or(DEFAULT_MAX_WIDTH),
            overrides: g.overrides.clone().or(file.overrides).unwrap_or_default(),
        })
    }
}

fn parse_number(v: &str) -> std::result::Result<serde_json::Number, String> {
    let x = match v.split_once('^') {
        Some((b, e)) => {
            let b: f64 = b.trim().parse().map_err(|_| format!("bad base in `{v}`"))?;
            let e: f64 = e.trim().parse().map_err(|_| format!("bad exponent in `{v}`"))?;
            b.powf(e)
        }
        None => v.trim().parse::<f64>().map_err(|_| format!("bad number `{v}`"))?,
    };
    if x.fract() == 0.0 && (0.0..9.0e15).contains(&x) {
        Ok((x as u64).into())
    } else {
        serde_json::Number::from_f64(x).ok_or_else(|| format!("`{v}` is not finite"))
    }
}

/// Parses `key=value,...` with the keys of [`Overrides`].
pub fn parse_overrides(s: &str) -> std::result::Result<Overrides, String> {
    let mut map = serde_json::Map::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part.split_once('=').ok_or_else(|| format!("expected key=value, got `{part}`"))?;
        map.insert(k.trim().to_string(), serde_json::Value::Number(parse_number(v)?));
    }
    serde_json::from_value(serde_json::Value::Object(map)).map_err(|e| e.to_string())
}

pub fn parse_rule(s: &str) -> std::result::Result<BandRule, String> {
    match s.split_once(':') {
        None if s == "textbook" => Ok(BandRule::Textbook),
        Some(("mean-field", k)) => {
            k.parse().map(|sigmas| BandRule::MeanField { sigmas }).map_err(|_| format!("bad sigma count `{k}`"))
        }
        _ => Err(format!("unknown band rule `{s}`; use `textbook` or `mean-field:<sigmas>`")),
    }
}

/// What a command produced.
pub struct Outcome {
    pub meta: RunMeta,
    pub result: serde_json::Value,
    /// Table printed for `--format csv`.
    pub csv: String,
    /// Extra files for `--out`, by name.
    pub artifacts: Vec<(String, String)>,
    /// Lines for stderr.
    pub notes: Vec<String>,
    pub code: i32,
}

fn to_value<T: serde::Serialize>(v: &T) -> Result<serde_json::Value> {
    serde_json::to_value(v).map_err(|source| Error::Json { context: "serialize".into(), source })
}

fn dispatch(cfg: &RunConfig, command: &Command) -> Result<Outcome> {
    match command {
        Command::Compile { formula } => cmd::compile(cfg, formula),
        Command::Synth { n, d, epsilon, witnesses, tries, rule } => {
            cmd::synth(cfg, *n, *d, *epsilon, *witnesses, *tries, *rule)
        }
        Command::Verify { netlist, epsilon, mode } => cmd::verify(cfg, netlist, *epsilon, *mode),
        Command::Degree { hex, vars, netlist, majority, epsilon } => {
            cmd::degree(cfg, hex.as_deref(), *vars, netlist.as_deref(), majority, *epsilon)
        }
        Command::Check { kind, grid } => check::run(cfg, *kind, grid.as_deref()),
    }
}

fn emit(cfg: &RunConfig, o: &Outcome, sidecar: &Sidecar) -> Result<()> {
    let report = Report { meta: &o.meta, result: &o.result };
    match &cfg.out {
        Some(dir) => {
            for (name, text) in &o.artifacts {
                report::write_text(&dir.join(name), text)?;
            }
            let path = dir.join("report.json");
            report::write_json(&path, &report)?;
            report::write_json(&report::sidecar_path(&path), sidecar)?;
        }
        None => match cfg.format {
            Format::Json => print!("{}", report::to_json(&report)?),
            Format::Csv => print!("{}", o.csv),
        },
    }
    for line in &o.notes {
        eprintln!("{line}");
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<i32> {
    let started = SystemTime::now();
    let clock = Instant::now();
    let cfg = RunConfig::resolve(&cli.global)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::Usage(format!("thread pool: {e}")))?;
    let outcome = pool.install(|| dispatch(&cfg, &cli.command))?;
    emit(&cfg, &outcome, &Sidecar::new(started, clock.elapsed(), pool.current_num_threads()))?;
    Ok(outcome.code)
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("polymaj: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn override_syntax() {
        let o = parse_overrides("A=3, width=2^14,topwidth=16384,stop=4.5").unwrap();
        assert_eq!(o.a, Some(3));
        assert_eq!(o.width, Some(16384));
        assert_eq!(o.top_width, Some(16384));
        assert_eq!(o.s_top, Some(4.5));
        assert_eq!(parse_overrides("logM=7").unwrap().log_m, Some(7.0));
        assert!(parse_overrides("B=3").is_err());
        assert!(parse_overrides("A").is_err());
        assert!(parse_overrides("A=x").is_err());
        assert!(parse_overrides("").unwrap().is_empty());
    }

    #[test]
    fn rule_syntax() {
        assert_eq!(parse_rule("textbook").unwrap(), BandRule::Textbook);
        assert_eq!(parse_rule("mean-field:2.5").unwrap(), BandRule::MeanField { sigmas: 2.5 });
        assert!(parse_rule("mean-field").is_err());
        assert!(parse_rule("wide").is_err());
    }

    #[test]
    fn flags_beat_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.json");
        std::fs::write(&p, r#"{"seed": 9, "trials": 50, "max-n": 4, "override": {"A": 2}}"#).unwrap();
        let g = GlobalArgs { seed: Some(1), config: Some(p.clone()), ..Default::default() };
        let c = RunConfig::resolve(&g).unwrap();
        assert_eq!((c.seed, c.trials, c.max_n, c.overrides.a), (1, Some(50), Some(4), Some(2)));
        std::fs::write(&p, r#"{"sed": 9}"#).unwrap();
        assert!(RunConfig::resolve(&g).is_err());
    }
}
