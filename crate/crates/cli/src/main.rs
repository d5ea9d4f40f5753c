use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod input;
mod output;
mod run;

use output::{emit, RunManifest};
use run::{ApplyRequest, Draws, MergeRequest, SimulateRequest};

/// Randomized multiple testing with e-values and p-values.
#[derive(Parser)]
#[command(name = "randmt", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a testing procedure on a file of e-values (or p-values for bh, by, u-by).
    Apply {
        /// ebh, r1-ebh, r2-ebh, rboth-ebh, u-ebh, j-ebh, pe-ebh, bh, by or u-by.
        procedure: String,
        input: PathBuf,
        #[arg(long)]
        alpha: f64,
        /// Seed for the uniform draws of randomized procedures.
        #[arg(long, conflicts_with = "u")]
        seed: Option<u64>,
        /// Explicit uniform draws, comma separated (rboth-ebh takes K grid draws then K adaptive draws).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        u: Option<Vec<f64>>,
        /// P-values paired with the e-values, for pe-ebh.
        #[arg(long)]
        pvals: Option<PathBuf>,
        /// Report 1-based indices.
        #[arg(long)]
        one_based: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Merge p-values into one global-null p-value.
    Merge {
        /// hommel, u-hommel, grid-harmonic or u-grid-harmonic.
        method: String,
        input: PathBuf,
        #[arg(long, conflicts_with = "u")]
        seed: Option<u64>,
        #[arg(long, allow_hyphen_values = true)]
        u: Option<f64>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Run a Gaussian simulation sweep from a TOML config and write a CSV grid.
    Simulate {
        config: PathBuf,
        /// Use K = 100 and 500 trials instead of the config's values.
        #[arg(long)]
        full_scale: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Re-run the command recorded in a manifest.
    Replay {
        manifest: PathBuf,
        /// Compare against the recorded output file instead of printing; exit 1 on a difference.
        #[arg(long)]
        check: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(clap::Args)]
struct OutArgs {
    /// Write the result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write a run manifest (JSON) here.
    #[arg(long)]
    manifest: Option<PathBuf>,
}

fn finish(result: Result<(String, RunManifest), String>, out: OutArgs) -> Result<(), String> {
    let (text, mut manifest) = result?;
    emit(&text, out.out.as_ref())?;
    if let Some(path) = &out.manifest {
        manifest.outputs = out.out.into_iter().collect();
        emit(&output::to_json(&manifest), Some(path))?;
    }
    Ok(())
}

fn replay(path: &PathBuf, check: bool, out: Option<PathBuf>) -> Result<bool, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let m: RunManifest = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let (fresh, _) = run::replay(&m)?;
    if check {
        let recorded = m.outputs.first().ok_or("manifest records no output file to check against")?;
        let old = fs::read_to_string(recorded).map_err(|e| format!("{}: {e}", recorded.display()))?;
        if old != fresh {
            eprintln!("replay differs from {}", recorded.display());
            return Ok(false);
        }
        return Ok(true);
    }
    emit(&fresh, out.as_ref())?;
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Apply { procedure, input, alpha, seed, u, pvals, one_based, out } => {
            let req = ApplyRequest { procedure, input, pvals, alpha, draws: Draws::from_flags(seed, u), one_based };
            finish(req.run(), out).map(|_| true)
        }
        Command::Merge { method, input, seed, u, out } => {
            let req = MergeRequest { method, input, draws: Draws::from_flags(seed, u.map(|u| vec![u])) };
            finish(req.run(), out).map(|_| true)
        }
        Command::Simulate { config, full_scale, out } => {
            finish(SimulateRequest { config, full_scale }.run(), out).map(|_| true)
        }
        Command::Replay { manifest, check, out } => replay(&manifest, check, out),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
