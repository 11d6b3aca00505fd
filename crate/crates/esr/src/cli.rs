//! Argument parsing and dispatch.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::config::read_config;
use crate::error::CliError;
use crate::experiment::{figure_preset, parse_methods, ExperimentSpec, Point, SchemeSel, Sweep, SweepVar};
use crate::output::write_rows;
use crate::runner::{run_spec, run_specs};
use crate::validate::{run_validation, write_checks, Grid};

pub const DEFAULT_TRIALS: u64 = 1_000_000;
pub const DEFAULT_SEED: u64 = 1;

#[derive(Parser, Debug)]
#[command(name = "esr", version, about = "Ergodic secrecy rate of multi-transmitter, multi-destination selection schemes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// One parameter point.
    Esr(PointArgs),
    /// Sweep one parameter over a range.
    Sweep {
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Regenerate the data behind a result figure.
    Figure {
        /// fig2, fig3, fig4 or fig5.
        name: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Check closed forms against quadrature and Monte Carlo.
    Validate {
        #[arg(long, default_value = "small")]
        grid: String,
        #[command(flatten)]
        run: RunArgs,
    },
}

/// Flags stay strings until merged with the config file.
#[derive(Args, Debug, Default)]
pub struct PointArgs {
    /// os, ss or both.
    #[arg(long)]
    pub scheme: Option<String>,
    /// exact, highsnr, asymptotic, quadrature, mc or all.
    #[arg(long)]
    pub method: Option<String>,
    /// Transmitters.
    #[arg(long)]
    pub k: Option<String>,
    /// Destinations.
    #[arg(long)]
    pub l: Option<String>,
    /// Resolvable paths per destination link.
    #[arg(long)]
    pub md: Option<String>,
    /// Resolvable paths per eavesdropper link.
    #[arg(long)]
    pub me: Option<String>,
    /// Average SNR per destination path in dB; converted as 10^(dB/10), so 9 dB is 7.943.
    #[arg(long = "lambda-d-db", allow_hyphen_values = true)]
    pub lambda_d_db: Option<String>,
    /// Average SNR per eavesdropper path in dB.
    #[arg(long = "lambda-e-db", allow_hyphen_values = true)]
    pub lambda_e_db: Option<String>,
    /// Transmitter correlation in [0, 1); mc only when nonzero.
    #[arg(long = "rho-s")]
    pub rho_s: Option<String>,
    #[arg(long = "rho-d")]
    pub rho_d: Option<String>,
    #[arg(long = "rho-e")]
    pub rho_e: Option<String>,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Args, Debug, Default)]
pub struct RunArgs {
    /// Monte Carlo trials (at least 1000).
    #[arg(long)]
    pub trials: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// File of key=value lines; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
pub struct SweepArgs {
    /// lambda_d_db, lambda_e_db, m_d, m_e, k, l, rho_s, rho_d or rho_e.
    #[arg(long)]
    pub var: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub from: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub to: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub step: Option<String>,
}

const POINT_KEYS: [&str; 11] = [
    "scheme",
    "method",
    "k",
    "l",
    "md",
    "me",
    "lambda_d_db",
    "lambda_e_db",
    "rho_s",
    "rho_d",
    "rho_e",
];
const RUN_KEYS: [&str; 3] = ["trials", "seed", "out"];
const SWEEP_KEYS: [&str; 4] = ["var", "from", "to", "step"];

/// Flag values layered over config values.
struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    fn new(config: &Option<PathBuf>, allowed: &[&[&str]], flags: Vec<(&str, Option<String>)>) -> Result<Self, CliError> {
        let mut values = match config {
            Some(path) => read_config(path)?,
            None => BTreeMap::new(),
        };
        // m_d / m_e mirror the sweep variable names.
        for (alias, key) in [("m_d", "md"), ("m_e", "me")] {
            if let Some(v) = values.remove(alias) {
                values.insert(key.to_string(), v);
            }
        }
        for key in values.keys() {
            if !allowed.iter().any(|set| set.contains(&key.as_str())) {
                return Err(CliError::usage(format!("config key '{key}' does not apply here")));
            }
        }
        for (key, v) in flags {
            if let Some(v) = v {
                values.insert(key.to_string(), v);
            }
        }
        Ok(Settings { values })
    }

    fn str(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn get<T: FromStr>(&self, key: &str, default: T) -> Result<T, CliError> {
        match self.str(key) {
            None => Ok(default),
            Some(s) => s
                .parse()
                .map_err(|_| CliError::usage(format!("invalid value '{s}' for {key}"))),
        }
    }

    fn required<T: FromStr>(&self, key: &str) -> Result<T, CliError> {
        let s = self.str(key).ok_or_else(|| CliError::usage(format!("--{key} is required")))?;
        s.parse()
            .map_err(|_| CliError::usage(format!("invalid value '{s}' for {key}")))
    }
}

fn run_flags(r: &RunArgs) -> Vec<(&'static str, Option<String>)> {
    vec![
        ("trials", r.trials.clone()),
        ("seed", r.seed.clone()),
        ("out", r.out.as_ref().map(|p| p.display().to_string())),
    ]
}

fn point_flags(p: &PointArgs) -> Vec<(&'static str, Option<String>)> {
    let mut v = vec![
        ("scheme", p.scheme.clone()),
        ("method", p.method.clone()),
        ("k", p.k.clone()),
        ("l", p.l.clone()),
        ("md", p.md.clone()),
        ("me", p.me.clone()),
        ("lambda_d_db", p.lambda_d_db.clone()),
        ("lambda_e_db", p.lambda_e_db.clone()),
        ("rho_s", p.rho_s.clone()),
        ("rho_d", p.rho_d.clone()),
        ("rho_e", p.rho_e.clone()),
    ];
    v.extend(run_flags(&p.run));
    v
}

fn spec_from(s: &Settings) -> Result<ExperimentSpec, CliError> {
    let d = Point::default();
    let base = Point {
        k: s.get("k", d.k)?,
        l: s.get("l", d.l)?,
        m_d: s.get("md", d.m_d)?,
        m_e: s.get("me", d.m_e)?,
        lambda_d_db: s.get("lambda_d_db", d.lambda_d_db)?,
        lambda_e_db: s.get("lambda_e_db", d.lambda_e_db)?,
        rho_s: s.get("rho_s", d.rho_s)?,
        rho_d: s.get("rho_d", d.rho_d)?,
        rho_e: s.get("rho_e", d.rho_e)?,
    };
    Ok(ExperimentSpec {
        scheme: SchemeSel::parse(s.str("scheme").unwrap_or("both"))?,
        methods: parse_methods(s.str("method").unwrap_or("exact"))?,
        base,
        sweep: None,
        trials: s.get("trials", DEFAULT_TRIALS)?,
        seed: s.get("seed", DEFAULT_SEED)?,
    })
}

fn open_out<'a>(s: &Settings, stdout: &'a mut dyn Write) -> Result<Box<dyn Write + 'a>, CliError> {
    match s.str("out") {
        Some(path) => {
            let f = File::create(path).map_err(|e| CliError::usage(format!("cannot create {path}: {e}")))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(stdout)),
    }
}

/// Runs a parsed command, writing CSV to `--out` or `stdout`.
pub fn execute(cli: Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Esr(p) => {
            let s = Settings::new(&p.run.config, &[&POINT_KEYS, &RUN_KEYS], point_flags(&p))?;
            let spec = spec_from(&s)?;
            let rows = run_spec(&spec)?;
            write_rows(open_out(&s, stdout)?, &rows)
        }
        Command::Sweep { point, sweep } => {
            let mut flags = point_flags(&point);
            flags.extend([
                ("var", sweep.var),
                ("from", sweep.from),
                ("to", sweep.to),
                ("step", sweep.step),
            ]);
            let s = Settings::new(&point.run.config, &[&POINT_KEYS, &RUN_KEYS, &SWEEP_KEYS], flags)?;
            let mut spec = spec_from(&s)?;
            let var = SweepVar::parse(s.str("var").ok_or_else(|| CliError::usage("--var is required"))?)?;
            spec.sweep = Some(Sweep::new(var, s.required("from")?, s.required("to")?, s.required("step")?)?);
            let rows = run_spec(&spec)?;
            write_rows(open_out(&s, stdout)?, &rows)
        }
        Command::Figure { name, run } => {
            let s = Settings::new(&run.config, &[&RUN_KEYS], run_flags(&run))?;
            let specs = figure_preset(&name, s.get("trials", DEFAULT_TRIALS)?, s.get("seed", DEFAULT_SEED)?)?;
            let rows = run_specs(&specs)?;
            write_rows(open_out(&s, stdout)?, &rows)
        }
        Command::Validate { grid, run } => {
            let grid = Grid::parse(&grid)?;
            let s = Settings::new(&run.config, &[&RUN_KEYS], run_flags(&run))?;
            let checks = run_validation(grid, s.get("trials", 200_000)?, s.get("seed", DEFAULT_SEED)?)?;
            write_checks(open_out(&s, stdout)?, &checks)?;
            let failed = checks.iter().filter(|c| !c.pass).count();
            eprintln!("validate: {} checks, {} failed", checks.len(), failed);
            if failed > 0 {
                return Err(CliError::Compute(format!("{failed} checks failed")));
            }
            Ok(())
        }
    }
}

/// Parses `args` and runs; returns the process exit code.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match execute(cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("esr: {e}");
            e.exit_code()
        }
    }
}
