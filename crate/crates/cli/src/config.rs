//! Experiment configuration.
//!
//! A config file is TOML with the optional top-level key `preset` and the
//! sections `[params]`, `[grid]`, `[input]`, `[reduction]`, `[simulation]`,
//! `[energy]` and `[output]`. Every key is optional. Values are layered as
//! built-in defaults, then the preset, then explicit file keys, then
//! command-line flags (or their `CABLEMOR_*` environment variables).
//!
//! ```toml
//! preset = "small_damp_ex1_in2"
//!
//! [params]
//! gamma = 0.002
//!
//! [input]
//! kind = 2          # 1..4, or sine | eigcos | sincos | square | zero
//! mode = "literal"  # how input 2 reads its frequencies: imag | literal
//!
//! [simulation]
//! tf = 50.0
//! rtol = 1e-6
//! ```

use std::fmt;
use std::path::{Path, PathBuf};

use cablemor::model::PhysicalParams;
use cablemor::signals::{Input2Mode, InputKind, InputSpec};
use serde::Deserialize;
use thiserror::Error;

use crate::presets;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid value for `{field}`: {reason}")]
    Validation { field: String, reason: String },
}

impl ConfigError {
    fn invalid(field: &str, reason: impl fmt::Display) -> Self {
        Self::Validation {
            field: field.to_owned(),
            reason: reason.to_string(),
        }
    }

    /// The offending key of a validation failure.
    pub fn field(&self) -> Option<&str> {
        match self {
            Self::Validation { field, .. } => Some(field),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InputConfig {
    pub spec: InputSpec,
    pub mode: Input2Mode,
    /// Input-2 frequencies given explicitly instead of read off the spectrum.
    pub frequencies: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyConfig {
    pub enabled: bool,
    /// Horizon of the unforced run; `None` reuses the simulation horizon.
    pub tf: Option<f64>,
    pub samples: usize,
}

/// A fully resolved and validated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub preset: Option<String>,
    pub params: PhysicalParams,
    pub n: usize,
    pub input: InputConfig,
    pub r: usize,
    pub t0: f64,
    pub tf: f64,
    pub rtol: f64,
    pub atol: f64,
    pub samples: usize,
    pub energy: EnergyConfig,
    pub out_dir: PathBuf,
}

impl Default for ExperimentConfig {
    /// Fixed physical values with the stability-study coefficients, 100
    /// nodes, input 1, `r = 4` on `[0, 100]`.
    fn default() -> Self {
        Self {
            preset: None,
            params: PhysicalParams::default(),
            n: 100,
            input: InputConfig {
                spec: InputSpec::input1(),
                mode: Input2Mode::Imag,
                frequencies: None,
            },
            r: 4,
            t0: 0.0,
            tf: 100.0,
            rtol: 1e-3,
            atol: 1e-6,
            samples: 1000,
            energy: EnergyConfig {
                enabled: false,
                tf: None,
                samples: 1000,
            },
            out_dir: PathBuf::from("out"),
        }
    }
}

impl ExperimentConfig {
    pub fn energy_tf(&self) -> f64 {
        self.energy.tf.unwrap_or(self.tf)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.params.validate().map_err(core_field)?;
        self.input.spec.validate().map_err(core_field)?;
        if self.n < 3 {
            return Err(ConfigError::invalid("n", "need at least 3 nodes"));
        }
        if self.r == 0 || self.r > 2 * self.n {
            return Err(ConfigError::invalid(
                "r",
                format!("must lie in 1..={}", 2 * self.n),
            ));
        }
        if !self.t0.is_finite() {
            return Err(ConfigError::invalid("t0", "must be finite"));
        }
        if !self.tf.is_finite() || self.tf <= self.t0 {
            return Err(ConfigError::invalid("tf", "must be finite and exceed t0"));
        }
        for (field, v) in [("rtol", self.rtol), ("atol", self.atol)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(ConfigError::invalid(field, "must be positive"));
            }
        }
        if self.samples < 2 {
            return Err(ConfigError::invalid("samples", "need at least 2"));
        }
        if let Some(tf) = self.energy.tf {
            if !tf.is_finite() || tf <= 0.0 {
                return Err(ConfigError::invalid("energy.tf", "must be positive"));
            }
        }
        if self.energy.samples < 2 {
            return Err(ConfigError::invalid("energy.samples", "need at least 2"));
        }
        if let Some((a, b)) = self.input.frequencies {
            for (field, v) in [("a", a), ("b", b)] {
                if !v.is_finite() || v < 0.0 {
                    return Err(ConfigError::invalid(
                        field,
                        "must be finite and nonnegative",
                    ));
                }
            }
        }
        Ok(())
    }

    fn apply_preset(&mut self, name: &str) -> Result<(), ConfigError> {
        let p = presets::find(name).ok_or_else(|| {
            let known: Vec<_> = presets::PRESETS.iter().map(|p| p.name).collect();
            ConfigError::invalid(
                "preset",
                format!("unknown `{name}` (known: {})", known.join(", ")),
            )
        })?;
        self.preset = Some(p.name.to_owned());
        self.params = p.params();
        self.input.spec = InputSpec {
            kind: p.input,
            ..self.input.spec
        };
        if let Some(mode) = p.input2_mode() {
            self.input.mode = mode;
        }
        if let Some(r) = p.r {
            self.r = r;
        }
        if let Some(tf) = p.tf {
            self.tf = tf;
        }
        self.energy.enabled = p.energy;
        Ok(())
    }
}

fn core_field(e: cablemor::Error) -> ConfigError {
    match e {
        cablemor::Error::InvalidParams { field, reason } => ConfigError::invalid(field, reason),
        other => ConfigError::invalid("config", other),
    }
}

/// Command-line (or environment) values that win over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub preset: Option<String>,
    pub n: Option<usize>,
    pub r: Option<usize>,
    pub tf: Option<f64>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawConfig {
    preset: Option<String>,
    params: RawParams,
    grid: RawGrid,
    input: RawInput,
    reduction: RawReduction,
    simulation: RawSimulation,
    energy: RawEnergy,
    output: RawOutput,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawParams {
    l: Option<f64>,
    m0: Option<f64>,
    ml: Option<f64>,
    k0: Option<f64>,
    kl: Option<f64>,
    k3: Option<f64>,
    beta: Option<f64>,
    gamma: Option<f64>,
    alpha: Option<f64>,
    alpha0: Option<f64>,
    alphal: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawGrid {
    n: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawKind {
    Number(i64),
    Name(String),
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawInput {
    kind: Option<RawKind>,
    mode: Option<String>,
    scale: Option<f64>,
    c1: Option<f64>,
    c2: Option<f64>,
    m: Option<f64>,
    nfreq: Option<f64>,
    a: Option<f64>,
    b: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawReduction {
    r: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawSimulation {
    t0: Option<f64>,
    tf: Option<f64>,
    rtol: Option<f64>,
    atol: Option<f64>,
    samples: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawEnergy {
    enabled: Option<bool>,
    tf: Option<f64>,
    samples: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawOutput {
    dir: Option<PathBuf>,
}

fn parse_kind(kind: &RawKind) -> Result<InputKind, ConfigError> {
    let name = match kind {
        RawKind::Number(k) => k.to_string(),
        RawKind::Name(s) => s.to_ascii_lowercase(),
    };
    Ok(match name.as_str() {
        "1" | "sine" => InputKind::Sine1,
        "2" | "eigcos" => InputKind::EigCos2,
        "3" | "sincos" => InputKind::SinCos3,
        "4" | "square" => InputKind::Square4,
        "0" | "zero" | "none" => InputKind::Zero,
        _ => {
            return Err(ConfigError::invalid(
                "input.kind",
                format!("`{name}` is not one of 1, 2, 3, 4, zero"),
            ))
        }
    })
}

fn parse_mode(mode: &str) -> Result<Input2Mode, ConfigError> {
    match mode.to_ascii_lowercase().as_str() {
        "imag" => Ok(Input2Mode::Imag),
        "literal" => Ok(Input2Mode::Literal),
        _ => Err(ConfigError::invalid(
            "input.mode",
            format!("`{mode}` is not imag or literal"),
        )),
    }
}

fn set<T: Copy>(dst: &mut T, src: Option<T>) {
    if let Some(v) = src {
        *dst = v;
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Parses config text and layers `overrides` on top.
pub fn parse_config(text: &str, overrides: &Overrides) -> Result<ExperimentConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Parse {
        line: e.span().map_or(1, |s| line_of(text, s.start)),
        message: e.message().to_owned(),
    })?;
    let mut cfg = ExperimentConfig::default();
    if let Some(name) = overrides.preset.as_deref().or(raw.preset.as_deref()) {
        cfg.apply_preset(name)?;
    }

    let p = &raw.params;
    let params = &mut cfg.params;
    set(&mut params.l, p.l);
    set(&mut params.m0, p.m0);
    set(&mut params.ml, p.ml);
    set(&mut params.k0, p.k0);
    set(&mut params.kl, p.kl);
    set(&mut params.k3, p.k3);
    set(&mut params.beta, p.beta);
    set(&mut params.gamma, p.gamma);
    set(&mut params.alpha, p.alpha);
    set(&mut params.alpha0, p.alpha0);
    set(&mut params.alphal, p.alphal);

    set(&mut cfg.n, raw.grid.n);

    let i = &raw.input;
    if let Some(kind) = &i.kind {
        cfg.input.spec.kind = parse_kind(kind)?;
    }
    if let Some(mode) = &i.mode {
        cfg.input.mode = parse_mode(mode)?;
    }
    let spec = &mut cfg.input.spec;
    set(&mut spec.scale, i.scale);
    set(&mut spec.c1, i.c1);
    set(&mut spec.c2, i.c2);
    set(&mut spec.m, i.m);
    set(&mut spec.nfreq, i.nfreq);
    match (i.a, i.b) {
        (Some(a), Some(b)) => cfg.input.frequencies = Some((a, b)),
        (None, None) => {}
        (Some(_), None) => return Err(ConfigError::invalid("b", "set together with `a`")),
        (None, Some(_)) => return Err(ConfigError::invalid("a", "set together with `b`")),
    }

    set(&mut cfg.r, raw.reduction.r);

    let s = &raw.simulation;
    set(&mut cfg.t0, s.t0);
    set(&mut cfg.tf, s.tf);
    set(&mut cfg.rtol, s.rtol);
    set(&mut cfg.atol, s.atol);
    set(&mut cfg.samples, s.samples);

    set(&mut cfg.energy.enabled, raw.energy.enabled);
    if raw.energy.tf.is_some() {
        cfg.energy.tf = raw.energy.tf;
    }
    set(&mut cfg.energy.samples, raw.energy.samples);

    if let Some(dir) = raw.output.dir {
        cfg.out_dir = dir;
    }

    set(&mut cfg.n, overrides.n);
    set(&mut cfg.r, overrides.r);
    set(&mut cfg.tf, overrides.tf);
    if let Some(dir) = &overrides.out {
        cfg.out_dir = dir.clone();
    }

    cfg.validate()?;
    Ok(cfg)
}

/// Reads and validates a config file.
pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig, ConfigError> {
    load_config_with(path, &Overrides::default())
}

pub fn load_config_with(
    path: impl AsRef<Path>,
    overrides: &Overrides,
) -> Result<ExperimentConfig, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_owned(),
        source,
    })?;
    parse_config(&text, overrides)
}
