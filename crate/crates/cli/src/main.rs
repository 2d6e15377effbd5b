mod commands;
mod families;
mod output;
mod sweep;
mod verify;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use output::Outputs;

#[derive(Parser, Debug)]
#[command(name = "lacuna", version, about = "Lacunary direction sets and directional maximal operators")]
struct Cli {
    /// Seed for every random draw of the run.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true, env = "LACUNA_THREADS")]
    threads: Option<usize>,
    /// Where to write the run manifest (default: next to the primary output,
    /// or ./lacuna-manifest.json).
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Write a direction set, rectangle family or Kakeya lift as JSON.
    Generate(commands::GenerateArgs),
    /// Verify a lacunary certificate and print its order.
    Classify(commands::ClassifyArgs),
    /// Project a direction set onto coordinate axes.
    Shadow(commands::ShadowArgs),
    /// Apply the directional maximal operator to a binary grid.
    Maxop(commands::MaxopArgs),
    /// ‖M_Ω χ_E‖_p / ‖χ_E‖_p over lifted Besicovitch sets.
    NormSweep(sweep::NormSweepArgs),
    /// Union and 3-fold dilated union measures of Besicovitch families.
    Besicovitch(sweep::BesicovitchArgs),
    /// Run one numerical check and write a JSON report.
    Verify(verify::VerifyArgs),
    /// Run every check and write a combined JSON report.
    Report(verify::ReportArgs),
}

/// What a command leaves behind besides its files.
pub struct Finished {
    /// Primary output file, used to place the manifest.
    pub primary: Option<PathBuf>,
    pub success: bool,
}

impl Command {
    fn run(&self, seed: u64, out: &mut Outputs) -> Result<Finished> {
        match self {
            Command::Generate(a) => commands::generate(a, out),
            Command::Classify(a) => commands::classify(a, out),
            Command::Shadow(a) => commands::shadow(a, out),
            Command::Maxop(a) => commands::maxop(a, out),
            Command::NormSweep(a) => sweep::norm_sweep(a, out),
            Command::Besicovitch(a) => sweep::besicovitch(a, out),
            Command::Verify(a) => verify::verify(a, seed, out),
            Command::Report(a) => verify::report(a, seed, out),
        }
    }
}

fn manifest_path(cli: &Cli, primary: Option<&Path>) -> PathBuf {
    if let Some(p) = &cli.manifest {
        return p.clone();
    }
    match primary {
        Some(p) => {
            let mut s = p.as_os_str().to_owned();
            s.push(".manifest.json");
            PathBuf::from(s)
        }
        None => PathBuf::from("lacuna-manifest.json"),
    }
}

fn execute(cli: &Cli, out: &mut Outputs) -> Result<bool> {
    let start = Instant::now();
    let threads = cli.threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if threads == 0 {
        anyhow::bail!("--threads must be at least 1");
    }
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().context("cannot start the worker pool")?;

    let done = cli.command.run(cli.seed, out)?;

    // The command enum serializes as {"name": {parameters}}.
    let (command, parameters) = match serde_json::to_value(&cli.command)? {
        Value::Object(m) => m.into_iter().next().context("empty command")?,
        Value::String(s) => (s, json!({})),
        v => anyhow::bail!("unexpected command encoding {v}"),
    };
    let manifest = json!({
        "command": command,
        "parameters": parameters,
        "seed": cli.seed,
        "threads": threads,
        "outputs": out.paths().iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        "versions": {
            "lacuna": env!("CARGO_PKG_VERSION"),
            "format": 1,
        },
        "success": done.success,
        "wall_time_seconds": start.elapsed().as_secs_f64(),
    });
    let path = manifest_path(cli, done.primary.as_deref());
    out.write_json(&path, &manifest)?;
    Ok(done.success)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = Outputs::default();
    match execute(&cli, &mut out) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            out.remove_all();
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
