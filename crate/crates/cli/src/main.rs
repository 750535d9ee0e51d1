use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use cablemor_cli::config::{load_config_with, parse_config};
use cablemor_cli::presets::PRESETS;
use cablemor_cli::{run_stage, ExperimentReport, Overrides, Stage};
use clap::{Parser, Subcommand};

/// Balanced truncation of the nonlinear cable-mass system.
///
/// Settings are layered as built-in defaults, the preset, the config file,
/// then flags. Every flag can also be set through the environment variable
/// named in its help text.
#[derive(Debug, Parser)]
#[command(name = "cablemor", version, after_help = preset_list())]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML config file.
    #[arg(long, global = true, env = "CABLEMOR_CONFIG", value_name = "PATH")]
    config: Option<PathBuf>,
    /// Named parameter set (see the list below).
    #[arg(long, global = true, env = "CABLEMOR_PRESET", value_name = "NAME")]
    preset: Option<String>,
    /// Reduced order.
    #[arg(long, global = true, env = "CABLEMOR_R", value_name = "INT")]
    r: Option<usize>,
    /// Artifact directory.
    #[arg(long, global = true, env = "CABLEMOR_OUT", value_name = "DIR")]
    out: Option<PathBuf>,
    /// Number of grid nodes.
    #[arg(long, global = true, env = "CABLEMOR_N", value_name = "INT")]
    n: Option<usize>,
    /// Final time.
    #[arg(long, global = true, env = "CABLEMOR_TF", value_name = "REAL")]
    tf: Option<f64>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Assemble the finite-difference model and report its size.
    Build,
    /// Spectrum of the linear part (eigs.csv).
    Eigs,
    /// Hankel singular values and truncation bounds (hsv.csv).
    Balance,
    /// Full- and reduced-order outputs (outputs.csv).
    Simulate,
    /// All artifacts plus output errors (error.csv).
    Compare,
    /// Unforced energy history (energy.csv).
    Energy,
}

impl From<Command> for Stage {
    fn from(c: Command) -> Self {
        match c {
            Command::Build => Stage::Build,
            Command::Eigs => Stage::Eigs,
            Command::Balance => Stage::Balance,
            Command::Simulate => Stage::Simulate,
            Command::Compare => Stage::Compare,
            Command::Energy => Stage::Energy,
        }
    }
}

fn preset_list() -> String {
    let mut s = String::from("Presets:\n");
    for p in PRESETS {
        s.push_str(&format!("  {:<22}{}\n", p.name, p.summary));
    }
    s
}

fn print_report(rep: &ExperimentReport) {
    println!("states: {}", rep.states);
    if let Some(m) = rep.stability_margin {
        println!("stability margin: {m:.6e}");
    }
    if let Some((a, b)) = rep.input2_frequencies {
        println!("input 2 frequencies: a = {a:.6e}, b = {b:.6e}");
    }
    if let Some(b) = rep.error_bound {
        println!("truncation bound: {b:.6e}");
    }
    if let Some(e) = &rep.errors {
        println!(
            "relative output error: L2 {:.6e}, max {:.6e}",
            e.rel_l2, e.rel_linf
        );
    }
    if let Some(e) = &rep.energy {
        if e.degenerate {
            println!("energy: zero initial energy, no rate fitted");
        } else {
            println!(
                "energy: fitted rate {:.6e}, largest increase {:.3e}",
                e.fitted_rate,
                e.max_increase()
            );
        }
    }
    for f in &rep.files {
        println!("wrote {}", f.display());
    }
}

fn run(cli: Cli) -> Result<()> {
    let overrides = Overrides {
        preset: cli.preset,
        n: cli.n,
        r: cli.r,
        tf: cli.tf,
        out: cli.out,
    };
    let cfg = match &cli.config {
        Some(path) => load_config_with(path, &overrides)?,
        None => parse_config("", &overrides)?,
    };
    let rep = run_stage(&cfg, cli.command.into())?;
    print_report(&rep);
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
