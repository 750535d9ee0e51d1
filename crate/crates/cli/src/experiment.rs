//! Runs an experiment and writes its artifacts.
//!
//! | file          | columns                              |
//! |---------------|--------------------------------------|
//! | `eigs.csv`    | `re,im` (sorted by real part, descending) |
//! | `hsv.csv`     | `index,sigma,bound` with `bound = 2 Σ_{i>index} σ_i` |
//! | `outputs.csv` | `t,y1_fom,y2_fom,y1_rom,y2_rom`      |
//! | `error.csv`   | `channel,rel_l2,rel_linf`            |
//! | `energy.csv`  | `t,E,EK,EP`                          |

use std::collections::HashSet;
use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use cablemor::analysis::{energy_decay, output_error, EnergyReport, ErrorMetrics};
use cablemor::balance::{balance, error_bound, reduce};
use cablemor::linalg::eigenvalues;
use cablemor::model::{build_system, quadratic_forms, sample_initial_data, StateSpaceSystem};
use cablemor::ode::OdeOptions;
use cablemor::rom::{simulate_fom, simulate_rom, OutputSeries, SimulationOptions};
use cablemor::signals::{frequencies_from_spectrum, InputKind, InputSpec};
use num_complex::Complex64;

use crate::config::ExperimentConfig;
use crate::csv_out::{fmt, write_table};

/// How far a run goes; each stage writes its own artifacts, `Compare` all of
/// them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    /// Assemble the model only.
    Build,
    /// `eigs.csv`.
    Eigs,
    /// `hsv.csv`.
    Balance,
    /// `outputs.csv`.
    Simulate,
    /// Everything, plus `energy.csv` when the energy study is enabled.
    Compare,
    /// `energy.csv`.
    Energy,
}

#[derive(Debug, Clone, Default)]
pub struct ExperimentReport {
    pub states: usize,
    pub stability_margin: Option<f64>,
    /// Input-2 frequencies actually used.
    pub input2_frequencies: Option<(f64, f64)>,
    pub hsv: Option<Vec<f64>>,
    /// `2 Σ_{i>r} σ_i` at the configured order.
    pub error_bound: Option<f64>,
    pub fom: Option<OutputSeries>,
    pub rom: Option<OutputSeries>,
    pub errors: Option<ErrorMetrics>,
    pub energy: Option<EnergyReport>,
    pub files: Vec<PathBuf>,
}

/// Eigenvalues ordered by real part then imaginary part, both descending.
pub fn sorted_eigenvalues(sys: &StateSpaceSystem) -> Result<Vec<Complex64>> {
    let mut eigs = eigenvalues(&sys.a).context("computing the spectrum")?;
    eigs.sort_by(|x, y| y.re.total_cmp(&x.re).then(y.im.total_cmp(&x.im)));
    Ok(eigs)
}

fn resolve_input(
    cfg: &ExperimentConfig,
    eigs: Option<&[Complex64]>,
) -> Result<(InputSpec, Option<(f64, f64)>)> {
    let spec = cfg.input.spec;
    if spec.kind != InputKind::EigCos2 {
        return Ok((spec, None));
    }
    let (a, b) = match (cfg.input.frequencies, eigs) {
        (Some(ab), _) => ab,
        (None, Some(eigs)) => frequencies_from_spectrum(eigs, cfg.input.mode)?,
        (None, None) => unreachable!("spectrum is computed whenever input 2 needs it"),
    };
    Ok((InputSpec { a, b, ..spec }, Some((a, b))))
}

fn write_energy(
    cfg: &ExperimentConfig,
    sys: &StateSpaceSystem,
    rep: &mut ExperimentReport,
) -> Result<()> {
    let forms = quadratic_forms(&cfg.params, cfg.n)?;
    let x0 = sample_initial_data(&cfg.params, cfg.n, |x| x.exp() * (1.0 - x).sin(), f64::cos)?;
    let opts = OdeOptions::with_tolerances(cfg.rtol, cfg.atol);
    let energy = energy_decay(sys, &forms, &x0, cfg.energy_tf(), &opts, cfg.energy.samples)
        .context("integrating the unforced model")?;
    let path = cfg.out_dir.join("energy.csv");
    let rows = (0..energy.times.len()).map(|k| {
        [
            energy.times[k],
            energy.total[k],
            energy.kinetic[k],
            energy.potential[k],
        ]
        .map(fmt)
    });
    write_table(&path, &["t", "E", "EK", "EP"], rows)?;
    rep.files.push(path);
    rep.energy = Some(energy);
    Ok(())
}

/// Runs `stage` and writes its artifacts into `cfg.out_dir`.
pub fn run_stage(cfg: &ExperimentConfig, stage: Stage) -> Result<ExperimentReport> {
    cfg.validate()?;
    let sys = build_system(&cfg.params, cfg.n).context("building the model")?;
    let mut rep = ExperimentReport {
        states: sys.dim(),
        ..Default::default()
    };
    if stage == Stage::Build {
        return Ok(rep);
    }
    fs::create_dir_all(&cfg.out_dir)
        .with_context(|| format!("cannot create {}", cfg.out_dir.display()))?;

    if stage == Stage::Energy {
        write_energy(cfg, &sys, &mut rep)?;
        return Ok(rep);
    }

    let needs_spectrum = matches!(stage, Stage::Eigs | Stage::Compare)
        || (stage == Stage::Simulate
            && cfg.input.spec.kind == InputKind::EigCos2
            && cfg.input.frequencies.is_none());
    let eigs = needs_spectrum
        .then(|| sorted_eigenvalues(&sys))
        .transpose()?;
    if let Some(eigs) = &eigs {
        rep.stability_margin = Some(eigs.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max));
        if matches!(stage, Stage::Eigs | Stage::Compare) {
            let path = cfg.out_dir.join("eigs.csv");
            write_table(
                &path,
                &["re", "im"],
                eigs.iter().map(|l| [fmt(l.re), fmt(l.im)]),
            )?;
            rep.files.push(path);
        }
    }
    if stage == Stage::Eigs {
        return Ok(rep);
    }

    let bal = balance(&sys, cfg.r).with_context(|| format!("balancing at order {}", cfg.r))?;
    rep.error_bound = Some(bal.error_bound());
    if matches!(stage, Stage::Balance | Stage::Compare) {
        let path = cfg.out_dir.join("hsv.csv");
        let rows = bal.hsv.iter().enumerate().map(|(i, &s)| {
            [
                (i + 1).to_string(),
                fmt(s),
                fmt(error_bound(&bal.hsv, i + 1)),
            ]
        });
        write_table(&path, &["index", "sigma", "bound"], rows)?;
        rep.files.push(path);
    }
    rep.hsv = Some(bal.hsv.clone());
    if stage == Stage::Balance {
        return Ok(rep);
    }

    let (input, freqs) = resolve_input(cfg, eigs.as_deref())?;
    rep.input2_frequencies = freqs;
    let red = reduce(&sys, &bal)?;
    let opts = SimulationOptions {
        samples: cfg.samples,
        ..SimulationOptions::with_tolerances(cfg.rtol, cfg.atol)
    };
    let fom = simulate_fom(&sys, input, cfg.t0, cfg.tf, &opts)
        .context("integrating the full-order model")?
        .outputs;
    let rom = simulate_rom(&red, input, cfg.t0, cfg.tf, &opts)
        .context("integrating the reduced model")?
        .outputs;
    let path = cfg.out_dir.join("outputs.csv");
    let rows = (0..fom.len()).map(|k| {
        [
            fom.times[k],
            fom.channels[0][k],
            fom.channels[1][k],
            rom.channels[0][k],
            rom.channels[1][k],
        ]
        .map(fmt)
    });
    write_table(&path, &["t", "y1_fom", "y2_fom", "y1_rom", "y2_rom"], rows)?;
    rep.files.push(path);

    if stage == Stage::Compare {
        let errors = output_error(&fom, &rom)?;
        let path = cfg.out_dir.join("error.csv");
        let mut rows: Vec<_> = errors
            .per_channel
            .iter()
            .enumerate()
            .map(|(c, e)| [format!("y{}", c + 1), fmt(e.rel_l2), fmt(e.rel_linf)])
            .collect();
        rows.push([
            "combined".to_owned(),
            fmt(errors.rel_l2),
            fmt(errors.rel_linf),
        ]);
        write_table(&path, &["channel", "rel_l2", "rel_linf"], rows)?;
        rep.files.push(path);
        rep.errors = Some(errors);
        if cfg.energy.enabled {
            write_energy(cfg, &sys, &mut rep)?;
        }
    }
    rep.fom = Some(fom);
    rep.rom = Some(rom);
    Ok(rep)
}

/// Full comparison run.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    run_stage(cfg, Stage::Compare)
}

/// Runs independent experiments concurrently, one thread each. Output
/// directories must be distinct.
pub fn run_batch(cfgs: &[ExperimentConfig]) -> Result<Vec<Result<ExperimentReport>>> {
    let mut dirs = HashSet::new();
    for cfg in cfgs {
        if !dirs.insert(&cfg.out_dir) {
            bail!(
                "output directory {} is shared by two experiments",
                cfg.out_dir.display()
            );
        }
    }
    Ok(std::thread::scope(|s| {
        let handles: Vec<_> = cfgs
            .iter()
            .map(|cfg| s.spawn(|| run_experiment(cfg)))
            .collect();
        handles
            .into_iter()
            .map(|h| {
                h.join()
                    .unwrap_or_else(|_| Err(anyhow::anyhow!("experiment panicked")))
            })
            .collect()
    }))
}
