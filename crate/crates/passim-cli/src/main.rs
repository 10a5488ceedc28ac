use anyhow::Context;
use clap::{Parser, Subcommand};
use passim_cli::config::{parse_convention, parse_eps_list, resolve, Overrides};
use passim_cli::presets::{self, Task};
use passim_cli::studies::{run_identities, run_rates, DEFAULT_EPS};
use passim_cli::{run_scenario, Manifest};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "passim", version, about = "Passive near-field imaging with small random scatterers")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a preset or a JSON scene config.
    Run {
        /// Preset name or path to a (possibly partial) JSON config.
        target: String,
        #[arg(long)]
        out: PathBuf,
        /// Preset underneath a config file (default: kite).
        #[arg(long)]
        preset: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        noise: Option<f64>,
        #[arg(long, num_args = 2, value_names = ["NX", "NY"])]
        grid: Option<Vec<usize>>,
        /// Full aperture of the sensor arc, radians.
        #[arg(long)]
        aperture: Option<f64>,
        /// norm or reciprocal.
        #[arg(long, default_value = "reciprocal")]
        indicator: String,
    },
    /// Rate fits over a list of eps.
    Rates {
        /// Comma-separated, decreasing.
        #[arg(long, default_value = "0.04,0.02,0.01")]
        eps: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print every preset with its resolved config.
    Presets,
}

enum Fail {
    Config(anyhow::Error),
    Stage(anyhow::Error),
}

fn config<T, E: Into<anyhow::Error>>(r: Result<T, E>) -> Result<T, Fail> {
    r.map_err(|e| Fail::Config(e.into()))
}

fn stage<T, E: Into<anyhow::Error>>(r: Result<T, E>) -> Result<T, Fail> {
    r.map_err(|e| Fail::Stage(e.into()))
}

fn finished(m: &Manifest) -> Result<(), Fail> {
    match m.failed_stage() {
        None => Ok(()),
        Some(s) => Err(Fail::Stage(anyhow::anyhow!(
            "stage '{}' failed: {}",
            s.name,
            s.error.as_deref().unwrap_or("")
        ))),
    }
}

fn run(cli: Cli) -> Result<(), Fail> {
    match cli.cmd {
        Cmd::Presets => {
            for p in presets::all() {
                let json = serde_json::to_string_pretty(&p.config).expect("config serialises");
                println!("== {} ({}, {:?})", p.name, p.figure, p.task);
                println!("aperture: {}", presets::aperture_label(p.config.aperture));
                println!("{json}");
            }
            Ok(())
        }
        Cmd::Rates { eps, out } => {
            let eps = config(parse_eps_list(&eps))?;
            let template = presets::preset("rates").expect("rates preset").config;
            let m = stage(run_rates(&eps, &template, &out).context("rates"))?;
            println!("{}", out.join("rates.csv").display());
            finished(&m)
        }
        Cmd::Run { target, out, preset, seed, noise, grid, aperture, indicator } => {
            let convention = config(parse_convention(&indicator))?;
            let flags = Overrides { seed, noise, grid: grid.map(|g| (g[0], g[1])), aperture };
            let r = config(resolve(&target, preset.as_deref(), &flags))?;
            let m = match r.task {
                Task::Reconstruction => {
                    let a = stage(run_scenario(&r.config, r.preset, convention, &out).context("run"))?;
                    if let Some(s) = &a.summary {
                        println!("contrast {:.3}, area error {:.4e}", s.contrast, s.area_error);
                    }
                    a.manifest
                }
                Task::Rates => stage(run_rates(&DEFAULT_EPS, &r.config, &out).context("rates"))?,
                Task::Identities => stage(run_identities(&r.config, &DEFAULT_EPS, &out).context("identities"))?,
            };
            println!("{}", out.join("manifest.json").display());
            finished(&m)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail::Stage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Fail::Config(e)) => {
            eprintln!("config error: {e:#}");
            ExitCode::from(2)
        }
    }
}
