//! `maxns` command-line front end.

mod commands;
mod config;

use clap::{Parser, Subcommand};
use serde_json::json;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use config::{Command, RunConfig};
use maxns::Error;

#[derive(Parser)]
#[command(name = "maxns", version, about = "Spectral, control and observability experiments for the linearized Navier-Stokes-Maxwell system")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// JSON run configuration (defaults are used for missing blocks).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output_dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for random initial states (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Eigenvalues of every mode up to n_max with asymptotic predictions.
    Spectrum,
    /// Biorthonormality and Riesz-matrix report.
    BasisCheck,
    /// Everywhere-supported null control of a random state.
    NullControl,
    /// Localized least-squares control towards zero.
    ApproxControl,
    /// Modal or finite-difference trajectory of a state.
    Simulate,
    /// Gaussian-beam ladder and observability ratios.
    Beam,
    /// Ingham Gram constants for the hyperbolic frequency family.
    Ingham,
}

impl Cmd {
    fn kind(self) -> Command {
        match self {
            Cmd::Spectrum => Command::Spectrum,
            Cmd::BasisCheck => Command::BasisCheck,
            Cmd::NullControl => Command::NullControl,
            Cmd::ApproxControl => Command::ApproxControl,
            Cmd::Simulate => Command::Simulate,
            Cmd::Beam => Command::Beam,
            Cmd::Ingham => Command::Ingham,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Cmd::Spectrum => "spectrum",
            Cmd::BasisCheck => "basis-check",
            Cmd::NullControl => "null-control",
            Cmd::ApproxControl => "approx-control",
            Cmd::Simulate => "simulate",
            Cmd::Beam => "beam",
            Cmd::Ingham => "ingham",
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<RunConfig, Error> {
    let Some(path) = path else {
        return Ok(RunConfig::default());
    };
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn run(cli: &Cli) -> Result<serde_json::Value, Error> {
    if let Ok(v) = std::env::var("MAXNS_THREADS") {
        let n: usize = v.parse().map_err(|_| Error::validation("MAXNS_THREADS", format!("not a positive integer: {v}")))?;
        if n == 0 {
            return Err(Error::validation("MAXNS_THREADS", "must be >= 1"));
        }
        // a second initialisation in the same process is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let mut cfg = load_config(cli.config.as_deref())?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    let p = cfg.validate(cli.cmd.kind())?;
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.output_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("maxns-out"));
    std::fs::create_dir_all(&out).map_err(|e| Error::Config(format!("{}: {e}", out.display())))?;
    let files = match cli.cmd {
        Cmd::Spectrum => commands::spectrum_cmd(&cfg, &p, &out)?,
        Cmd::BasisCheck => commands::basis_check_cmd(&cfg, &p, &out)?,
        Cmd::NullControl => commands::null_control_cmd(&cfg, &p, &out, cli.seed)?,
        Cmd::ApproxControl => commands::approx_control_cmd(&cfg, &p, &out, cli.seed)?,
        Cmd::Simulate => commands::simulate_cmd(&cfg, &p, &out, cli.seed)?,
        Cmd::Beam => commands::beam_cmd(&cfg, &p, &out)?,
        Cmd::Ingham => commands::ingham_cmd(&cfg, &p, &out)?,
    };
    let canonical = serde_json::to_string(&json!({ "command": cli.cmd.name(), "config": cfg })).expect("config serializes");
    let hash = hex(&Sha256::digest(canonical.as_bytes()));
    let rel: Vec<String> = files
        .iter()
        .map(|f| f.strip_prefix(&out).unwrap_or(f).to_string_lossy().replace('\\', "/"))
        .collect();
    let manifest = json!({
        "command": cli.cmd.name(),
        "input_hash": hash,
        "versions": { "maxns": env!("CARGO_PKG_VERSION") },
        "seed": cfg.seed,
        "files": rel,
    });
    maxns::io::write_json(&out.join("manifest.json"), &manifest)?;
    Ok(manifest)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(m) => {
            println!("{}", serde_json::to_string_pretty(&m).expect("manifest serializes"));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
