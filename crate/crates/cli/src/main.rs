//! `ftiss`: run simulations, oracle harnesses and figure reproductions.

mod reproduce;
mod simulate;
mod verify;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ftiss_core::presets;

pub const OUT_DIR_ENV: &str = "FTISS_OUT_DIR";
const DEFAULT_OUT_DIR: &str = "ftiss-out";

#[derive(Parser)]
#[command(name = "ftiss", version, about = "Finite-time ISS experiment runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a JSON config and write trajectory.csv, snapshots.csv and audit.json.
    Simulate {
        config: PathBuf,
        /// Output directory (default: $FTISS_OUT_DIR, then ./ftiss-out).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Norm below which the run counts as extinct in the report.
        #[arg(long, default_value_t = simulate::REPORT_THRESHOLD)]
        threshold: f64,
    },
    /// Run one of the oracle harnesses; exits 1 if a checked property fails.
    Verify(verify::VerifyArgs),
    /// Emit the data behind a figure panel, or all of them.
    Reproduce {
        /// fig1a, fig1b, fig1c, fig2a, fig2b, fig2c or all.
        #[arg(value_parser = reproduce::parse_target)]
        figure: reproduce::Target,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads used for the underlying runs.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
        jobs: u16,
    },
    /// List the presets, or print one as a config document.
    Presets {
        #[arg(long, value_name = "NAME")]
        dump: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VerifyKind {
    Inequality,
    Greens,
    Certificate,
}

/// Failure classes, each with its own exit status.
#[derive(Debug)]
pub enum Failure {
    /// Bad input: unreadable or invalid config, bad options.
    Input(String),
    /// A checked property did not hold.
    Property(String),
    Divergence(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Divergence(_) => 3,
            Failure::Property(_) | Failure::Io(_) => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(m) | Failure::Property(m) | Failure::Divergence(m) | Failure::Io(m) => f.write_str(m),
        }
    }
}

impl From<ftiss_core::Error> for Failure {
    fn from(e: ftiss_core::Error) -> Self {
        match e {
            ftiss_core::Error::Divergence { .. } => Failure::Divergence(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

pub fn out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from)).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

pub fn write_file(path: &Path, contents: &[u8]) -> Result<(), Failure> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Failure::Io(format!("cannot create {}: {e}", parent.display())))?;
    }
    fs::write(path, contents).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))
}

fn list_presets(dump: Option<String>) -> Result<(), Failure> {
    match dump {
        Some(name) => {
            let preset = presets::by_name(&name).ok_or_else(|| Failure::Input(format!("unknown preset `{name}`")))?;
            let json = serde_json::to_string_pretty(&preset.config).expect("config serialises");
            println!("{json}");
        }
        None => {
            for p in presets::all() {
                let audits: Vec<String> =
                    p.audits.iter().map(|a| serde_json::to_value(a).unwrap().as_str().unwrap().to_string()).collect();
                println!("{}\t{}\taudits={}", p.name, simulate::describe(&p.config), audits.join(","));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate { config, out, threshold } => simulate::run(&config, &out_dir(out), threshold),
        Command::Verify(args) => verify::run(&args),
        Command::Reproduce { figure, out, jobs } => reproduce::run(&figure, &out_dir(out), jobs as usize),
        Command::Presets { dump } => list_presets(dump),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
