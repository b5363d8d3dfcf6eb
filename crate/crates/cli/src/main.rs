mod config;
mod experiments;
mod output;

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use heatlab::acceptance;
use heatlab::{HeatEngine, InitialDatum, Profile, SpaceSpec};

use config::{parse_grid, Experiment, ExperimentConfig, DYADIC_DEFAULT};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
    Io(String),
    Assertion(String),
    /// The reader closed stdout early, as with `| head`.
    Closed,
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Assertion(_) => 4,
            CliError::Io(_) => 1,
            CliError::Closed => 0,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "invalid configuration: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Assertion(m) => write!(f, "assertion failed: {m}"),
            CliError::Closed => write!(f, "output closed"),
        }
    }
}

impl From<heatlab::Error> for CliError {
    fn from(e: heatlab::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            return CliError::Closed;
        }
        CliError::Io(e.to_string())
    }
}

/// Heat kernels and long-time heat flow experiments on symmetric spaces.
#[derive(Parser)]
#[command(name = "heatlab", version)]
struct Cli {
    /// Worker threads for grid sweeps.
    #[arg(long, global = true, env = "HEATLAB_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the structure constants of a space as JSON.
    Space {
        /// Space tag: Hr:n, Hc:n, Hq:n or A2c.
        tag: String,
    },
    /// Run an experiment and write CSV (stdout by default) plus a JSON summary.
    Run(RunArgs),
    /// Run acceptance checks.
    Check {
        #[arg(value_enum)]
        suite: Suite,
        /// Shorter determinism sweep.
        #[arg(long)]
        fast: bool,
        /// Write verdicts as JSON to this file.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Tabulate c-function, spherical function or heat kernel values.
    Dump(DumpArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    #[arg(value_enum)]
    experiment: Option<Experiment>,
    /// JSON experiment config; replaces the flags below.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "Hr:3")]
    space: String,
    /// Time grid: "1", "1,2,5", "a:b:dyadic" or "a:b:n".
    #[arg(long, default_value = DYADIC_DEFAULT)]
    t: String,
    /// Radii for kernel-eval and busemann, same grammar as --t.
    #[arg(long)]
    r: Option<String>,
    #[arg(long, value_enum, default_value = "bump")]
    datum: DatumKind,
    /// Bump radius.
    #[arg(long, default_value_t = 1.0)]
    xi: f64,
    /// Time of the heat-profile datum.
    #[arg(long, default_value_t = 1.0)]
    s: f64,
    /// Decay rate and cutoff of the decay datum.
    #[arg(long, default_value_t = 3.0)]
    rate: f64,
    #[arg(long, default_value_t = 40.0)]
    cut: f64,
    /// Distance of the datum's center from the origin.
    #[arg(long, default_value_t = 0.0)]
    center: f64,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    /// ε(t) = t^{-eps_power}.
    #[arg(long, default_value_t = 0.25)]
    eps_power: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Add a timestamp line to the CSV header.
    #[arg(long)]
    stamp: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum DatumKind {
    Bump,
    Heat,
    Decay,
    PointMass,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Unit,
    Envelopes,
    Rates,
    Counterexample,
    Distinguished,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum DumpTable {
    CFunction,
    Phi,
    Phi0,
    Kernel,
}

#[derive(clap::Args)]
struct DumpArgs {
    #[arg(value_enum)]
    table: DumpTable,
    #[arg(long, default_value = "Hr:3")]
    space: String,
    /// Spectral parameters (c-function, phi).
    #[arg(long, default_value = "0.5:10:20")]
    lambda: String,
    /// Radii (phi, phi0, kernel); along ρ in rank two.
    #[arg(long, default_value = "0:10:21")]
    r: String,
    /// Times (kernel).
    #[arg(long, default_value = "1")]
    t: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("heatlab: {e}");
            return ExitCode::from(2);
        }
    }
    match dispatch(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Closed) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("heatlab: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn dispatch(cmd: Cmd) -> Result<(), CliError> {
    match cmd {
        Cmd::Space { tag } => space(&tag),
        Cmd::Run(args) => run(args),
        Cmd::Check { suite, fast, json } => check(suite, fast, json),
        Cmd::Dump(args) => output::dump(
            match args.table {
                DumpTable::CFunction => output::Dump::CFunction,
                DumpTable::Phi => output::Dump::Phi,
                DumpTable::Phi0 => output::Dump::Phi0,
                DumpTable::Kernel => output::Dump::Kernel,
            },
            &args.space,
            &parse_grid(&args.lambda)?,
            &parse_grid(&args.r)?,
            &parse_grid(&args.t)?,
            args.out.as_deref(),
        ),
    }
}

fn space(tag: &str) -> Result<(), CliError> {
    let sp = SpaceSpec::from_tag(tag).map_err(|e| CliError::Config(e.to_string()))?;
    let mut v = serde_json::json!({
        "name": sp.name.to_string(),
        "rank": sp.rank(),
        "dimension": sp.n,
        "pseudo_dimension": sp.nu,
        "rank_plus_reduced_roots": sp.l_plus_sr,
        "rho": sp.rho,
        "rho_sq": sp.rho_sq(),
        "roots": sp.datum.roots,
        "multiplicities": sp.datum.mult,
        "weyl_order": sp.weyl_order(),
    });
    if let Ok(e) = HeatEngine::new(&sp) {
        v["c_meas"] = e.c_meas.into();
        v["c0"] = e.c0.into();
    }
    writeln!(std::io::stdout().lock(), "{}", serde_json::to_string_pretty(&v).expect("json"))?;
    Ok(())
}

fn build_config(args: &RunArgs) -> Result<ExperimentConfig, CliError> {
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)?;
        let mut cfg: ExperimentConfig =
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        if let Some(exp) = args.experiment {
            if exp != cfg.experiment {
                return Err(CliError::Config("experiment differs from the config file".into()));
            }
        }
        if args.out.is_some() {
            cfg.out = args.out.clone();
        }
        if args.summary.is_some() {
            cfg.summary = args.summary.clone();
        }
        return Ok(cfg);
    }
    let experiment = args.experiment.ok_or_else(|| CliError::Config("name an experiment or pass --config".into()))?;
    let profile = match args.datum {
        DatumKind::Bump => Some(Profile::bump(args.xi)),
        DatumKind::Heat => Some(Profile::Heat { s: args.s }),
        DatumKind::Decay => Some(Profile::Decay { rate: args.rate, amp: 1.0, cut: args.cut }),
        DatumKind::PointMass => None,
    };
    let datum = match (profile, args.center) {
        (None, d) => InitialDatum::PointMass { distance: d },
        (Some(p), d) if d == 0.0 => InitialDatum::radial(p),
        (Some(p), d) => InitialDatum::OffOrigin { profile: p, distance: d },
    };
    Ok(ExperimentConfig {
        space: args.space.clone(),
        experiment,
        t_grid: parse_grid(&args.t)?,
        eps_power: args.eps_power,
        datum,
        p: args.p,
        radii: match &args.r {
            Some(r) => parse_grid(r)?,
            None => Vec::new(),
        },
        out: args.out.clone(),
        summary: args.summary.clone(),
    })
}

fn run(args: RunArgs) -> Result<(), CliError> {
    let cfg = build_config(&args)?;
    let space = cfg.validate()?;
    let outcome = experiments::run(&cfg, &space)?;
    output::write_csv(&cfg, &outcome.table, args.stamp)?;
    let failed: Vec<&str> = outcome.assertions.iter().filter(|a| !a.1).map(|a| a.0.as_str()).collect();
    output::write_summary(&cfg, &outcome)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Assertion(failed.join(", ")))
    }
}

fn check(suite: Suite, fast: bool, json: Option<PathBuf>) -> Result<(), CliError> {
    let ids: Vec<u8> = match suite {
        Suite::Unit => vec![1, 2],
        Suite::Envelopes => vec![3, 4],
        Suite::Rates => vec![5, 6],
        Suite::Counterexample => vec![7],
        Suite::Distinguished => vec![8],
        Suite::All => (1..=9).collect(),
    };
    let mut verdicts = Vec::new();
    for id in ids {
        let v = if id == 9 && fast {
            acceptance::determinism(&[1, 2, 3, 4, 7])?
        } else {
            acceptance::run(id)?
        };
        writeln!(std::io::stdout().lock(), "{}", v.line())?;
        verdicts.push(v);
    }
    if let Some(path) = json {
        let text = serde_json::to_string_pretty(&verdicts).expect("json");
        std::fs::write(path, text + "\n")?;
    }
    let failed: Vec<String> = verdicts.iter().filter(|v| !v.passed).map(|v| v.id.to_string()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Assertion(format!("criteria {}", failed.join(", "))))
    }
}
