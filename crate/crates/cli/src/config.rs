//! Run configuration: TOML files, command-line flags and validation.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use lzsm_core::sweep::{Horizon, SweepSpec};
use lzsm_core::{BiorthState, Error as CoreError, IntegratorOptions, ModelParams};

use crate::manifest::Manifest;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Spectrum,
    Region,
    Trajectory,
    Bloch,
    Trapping,
    Weak,
    Sweep,
    Figure,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Region => "region",
            Command::Trajectory => "trajectory",
            Command::Bloch => "bloch",
            Command::Trapping => "trapping",
            Command::Weak => "weak",
            Command::Sweep => "sweep",
            Command::Figure => "figure",
        }
    }

    fn needs_model(&self) -> bool {
        !matches!(self, Command::Region | Command::Sweep | Command::Figure)
    }

    fn needs_time(&self) -> bool {
        self.needs_model()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
    /// Greyscale portable pixmap (binary PGM).
    Ppm,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "ppm" | "pgm" => Ok(Format::Ppm),
            other => Err(format!("unknown output format `{other}` (expected csv, json or ppm)")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Ppm => "ppm",
        })
    }
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_formats() -> Vec<Format> {
    vec![Format::Csv, Format::Json, Format::Ppm]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: default_dir(), formats: default_formats() }
    }
}

fn default_samples() -> usize {
    1001
}

/// Time grid of a single-trajectory run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpan {
    #[serde(default)]
    pub t0: f64,
    /// Length of the run, resolved against the model.
    pub horizon: Horizon,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

impl TimeSpan {
    pub fn end(&self, p: &ModelParams) -> f64 {
        self.t0 + self.horizon.resolve(p)
    }
}

/// Initial amplitudes as `[re, im]` pairs; the left state is rescaled so
/// that `⟨ψˡ|ψʳ⟩ = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialState {
    pub right: [[f64; 2]; 2],
    pub left: [[f64; 2]; 2],
}

impl InitialState {
    pub fn to_state(&self) -> Result<BiorthState, CoreError> {
        let c = |v: [f64; 2]| Complex64::new(v[0], v[1]);
        BiorthState::from_pair([c(self.right[0]), c(self.right[1])], [c(self.left[0]), c(self.left[1])])
    }
}

/// Grid over `(c/Δ, γ/Δ)` for the reality-region map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub x_count: usize,
    pub y_min: f64,
    pub y_max: f64,
    pub y_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub figure: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelParams>,
    #[serde(default)]
    pub integrator: IntegratorOptions,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<TimeSpan>,
    /// Spectrum only: nonlinearities to overlay (defaults to the model's `c`).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub c_values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialState>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<RegionGrid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
}

impl RunConfig {
    /// Minimal config for `command` with everything else defaulted.
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            figure: None,
            model: None,
            integrator: IntegratorOptions::default(),
            output: OutputConfig::default(),
            time: None,
            c_values: Vec::new(),
            initial: None,
            region: None,
            sweep: None,
        }
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(format!("cannot serialize config: {e}")))
    }

    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Model parameters, which every command except `region` has (sweeps
    /// use their template).
    pub fn model(&self) -> Option<&ModelParams> {
        self.model.as_ref().or(self.sweep.as_ref().map(|s| &s.fixed))
    }

    /// Base name of the output files.
    pub fn stem(&self) -> String {
        self.figure.clone().unwrap_or_else(|| self.command.name().to_string())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let cmd = self.command;
        if cmd == Command::Figure {
            return Err(CliError::Config("`figure` configs must be resolved against the manifest first".into()));
        }
        let stray = |key: &str, present: bool, allowed: bool| {
            if present && !allowed {
                Err(CliError::Config(format!("key `{key}` is not used by the `{}` command", cmd.name())))
            } else {
                Ok(())
            }
        };
        stray("model", self.model.is_some(), cmd.needs_model())?;
        stray("time", self.time.is_some(), cmd.needs_time())?;
        stray("c_values", !self.c_values.is_empty(), cmd == Command::Spectrum)?;
        stray("initial", self.initial.is_some(), matches!(cmd, Command::Trajectory | Command::Bloch | Command::Trapping | Command::Weak))?;
        stray("region", self.region.is_some(), cmd == Command::Region)?;
        stray("sweep", self.sweep.is_some(), cmd == Command::Sweep)?;

        if cmd.needs_model() {
            let p = self.model.as_ref().ok_or_else(|| missing("model", cmd))?;
            check_model(p, "model")?;
            let time = self.time.as_ref().ok_or_else(|| missing("time", cmd))?;
            let t1 = time.end(p);
            if !(time.t0.is_finite() && t1.is_finite() && t1 > time.t0) {
                return Err(CliError::Config("time.horizon: must be positive and finite".into()));
            }
            if time.samples < 2 {
                return Err(CliError::Config("time.samples: need at least 2 samples".into()));
            }
        }
        for c in &self.c_values {
            if !c.is_finite() {
                return Err(CliError::Config(format!("c_values: must be finite, got {c}")));
            }
        }
        if let Some(init) = &self.initial {
            init.to_state().map_err(|e| CliError::Config(format!("initial: {e}")))?;
        }
        if cmd == Command::Weak {
            let p = self.model.as_ref().expect("checked above");
            lzsm_core::weakcoupling::DiracParams::new(*p).map_err(|e| config_from_core("model", e))?;
        }
        if cmd == Command::Region {
            let r = self.region.as_ref().ok_or_else(|| missing("region", cmd))?;
            if r.x_count < 2 || r.y_count < 2 || !(r.x_max > r.x_min) || !(r.y_max > r.y_min) {
                return Err(CliError::Config("region: need counts ≥ 2 and min < max on both axes".into()));
            }
        }
        if cmd == Command::Sweep {
            let s = self.sweep.as_ref().ok_or_else(|| missing("sweep", cmd))?;
            check_model(&s.fixed, "sweep.fixed")?;
            s.validate().map_err(|e| config_from_core("sweep", e))?;
        }
        if self.output.formats.is_empty() {
            return Err(CliError::Config("output.formats: at least one format is required".into()));
        }
        let opts = &self.integrator;
        if !(opts.rtol > 0.0 && opts.atol > 0.0 && opts.h_init > 0.0 && opts.max_steps > 0) {
            return Err(CliError::Config("integrator: tolerances, h_init and max_steps must be positive".into()));
        }
        Ok(())
    }
}

fn missing(key: &str, cmd: Command) -> CliError {
    CliError::Config(format!("missing `{key}` section required by the `{}` command", cmd.name()))
}

fn check_model(p: &ModelParams, section: &str) -> Result<(), CliError> {
    p.validate().map_err(|e| config_from_core(section, e))
}

fn config_from_core(section: &str, e: CoreError) -> CliError {
    match e {
        CoreError::InvalidParams { field, reason } => CliError::Config(format!("{section}.{field}: {reason}")),
        other => CliError::Config(format!("{section}: {other}")),
    }
}

/// Overrides taken from the command line.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub delta1: Option<f64>,
    pub delta2: Option<f64>,
    pub c: Option<f64>,
    pub amp: Option<f64>,
    pub omega: Option<f64>,
    pub eps0: Option<f64>,
    pub t1: Option<f64>,
    pub samples: Option<usize>,
    pub out: Option<PathBuf>,
    pub formats: Option<Vec<Format>>,
}

impl Overrides {
    fn touches_run(&self) -> bool {
        self.delta1.is_some()
            || self.delta2.is_some()
            || self.c.is_some()
            || self.amp.is_some()
            || self.omega.is_some()
            || self.eps0.is_some()
            || self.t1.is_some()
            || self.samples.is_some()
            || self.formats.is_some()
    }

    fn model_from_flags(&self) -> Result<ModelParams, CliError> {
        let need = |v: Option<f64>, name: &str| v.ok_or_else(|| CliError::Config(format!("missing --{name} (or pass --config)")));
        Ok(ModelParams {
            delta1: need(self.delta1, "delta1")?,
            delta2: need(self.delta2, "delta2")?,
            c: need(self.c, "c")?,
            amp: need(self.amp, "amp")?,
            omega: need(self.omega, "omega")?,
            eps0: self.eps0.unwrap_or(0.0),
        })
    }

    fn apply(&self, cfg: &mut RunConfig) -> Result<(), CliError> {
        if let Some(p) = cfg.model.as_mut() {
            let fields = [
                (&mut p.delta1, self.delta1),
                (&mut p.delta2, self.delta2),
                (&mut p.c, self.c),
                (&mut p.amp, self.amp),
                (&mut p.omega, self.omega),
                (&mut p.eps0, self.eps0),
            ];
            for (slot, v) in fields {
                if let Some(v) = v {
                    *slot = v;
                }
            }
        } else if self.delta1.is_some() || self.delta2.is_some() || self.c.is_some() || self.amp.is_some() || self.omega.is_some() {
            return Err(CliError::Config(format!("model flags are not used by the `{}` command", cfg.command.name())));
        }
        if self.t1.is_some() || self.samples.is_some() {
            let time = cfg
                .time
                .as_mut()
                .ok_or_else(|| CliError::Config(format!("time flags are not used by the `{}` command", cfg.command.name())))?;
            if let Some(t1) = self.t1 {
                time.horizon = Horizon::Absolute(t1 - time.t0);
            }
            if let Some(n) = self.samples {
                time.samples = n;
            }
        }
        if let Some(f) = &self.formats {
            cfg.output.formats = f.clone();
        }
        if let Some(dir) = &self.out {
            cfg.output.dir = dir.clone();
        }
        Ok(())
    }
}

/// Builds a validated config for `command` from an optional TOML file and
/// command-line overrides. `figure` runs take everything but the output
/// directory from the manifest.
pub fn parse_config(command: Command, figure: Option<&str>, path: Option<&Path>, ov: &Overrides) -> Result<RunConfig, CliError> {
    if let Some(id) = figure {
        if path.is_some() || ov.touches_run() {
            return Err(CliError::Config("`figure` runs take all settings from the manifest; only --out may be given".into()));
        }
        let mut cfg = Manifest::builtin()?.resolve(id)?;
        if let Some(dir) = &ov.out {
            cfg.output.dir = dir.clone();
        }
        cfg.validate()?;
        return Ok(cfg);
    }
    let mut cfg = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
            let cfg: RunConfig = toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
            if cfg.command == Command::Figure {
                let only_figure = cfg.model.is_none()
                    && cfg.time.is_none()
                    && cfg.c_values.is_empty()
                    && cfg.initial.is_none()
                    && cfg.region.is_none()
                    && cfg.sweep.is_none()
                    && cfg.integrator == IntegratorOptions::default()
                    && cfg.output.formats == default_formats();
                if !only_figure || ov.touches_run() {
                    return Err(CliError::Config("`figure` configs may only set `figure` and `output.dir`".into()));
                }
                let id = cfg.figure.ok_or_else(|| CliError::Config("`figure` config needs a `figure` key".into()))?;
                let out = Overrides { out: Some(ov.out.clone().unwrap_or(cfg.output.dir)), ..Overrides::default() };
                return parse_config(Command::Figure, Some(&id), None, &out);
            }
            if cfg.command != command {
                return Err(CliError::Config(format!(
                    "{}: config is for `{}` but the `{}` command was invoked",
                    p.display(),
                    cfg.command.name(),
                    command.name()
                )));
            }
            cfg
        }
        None if command == Command::Figure => {
            return Err(CliError::Config("`figure` needs a figure id".into()));
        }
        None => {
            let mut cfg = RunConfig::new(command);
            if command.needs_model() {
                cfg.model = Some(ov.model_from_flags()?);
                let t1 = ov.t1.ok_or_else(|| CliError::Config("missing --t1 (or pass --config)".into()))?;
                cfg.time = Some(TimeSpan { t0: 0.0, horizon: Horizon::Absolute(t1), samples: ov.samples.unwrap_or(default_samples()) });
            } else {
                return Err(CliError::Config(format!("the `{}` command needs --config", command.name())));
            }
            cfg
        }
    };
    ov.apply(&mut cfg)?;
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_names() {
        assert_eq!("CSV".parse::<Format>().unwrap(), Format::Csv);
        assert_eq!("pgm".parse::<Format>().unwrap(), Format::Ppm);
        assert!("png".parse::<Format>().is_err());
        assert_eq!(Format::Json.to_string(), "json");
    }

    #[test]
    fn region_needs_no_model() {
        let mut cfg = RunConfig::new(Command::Region);
        assert!(cfg.validate().is_err());
        cfg.region = Some(RegionGrid { x_min: 0.0, x_max: 1.0, x_count: 3, y_min: -1.0, y_max: 1.0, y_count: 3 });
        cfg.validate().unwrap();
        cfg.model = Some(ModelParams { delta1: 1.0, delta2: 1.0, c: 0.0, amp: 1.0, omega: 1.0, eps0: 0.0 });
        let err = cfg.validate().unwrap_err().to_string();
        assert!(err.contains("`model`"), "{err}");
    }

    #[test]
    fn flags_build_a_model_run() {
        let ov = Overrides {
            delta1: Some(2.0),
            delta2: Some(-0.5),
            c: Some(1.0),
            amp: Some(2.5),
            omega: Some(1.0),
            t1: Some(5.0),
            ..Overrides::default()
        };
        let cfg = parse_config(Command::Bloch, None, None, &ov).unwrap();
        assert_eq!(cfg.model.unwrap().eps0, 0.0);
        assert_eq!(cfg.time.unwrap().end(&cfg.model.unwrap()), 5.0);
        assert_eq!(cfg.stem(), "bloch");
    }

    #[test]
    fn missing_flag_is_named() {
        let ov = Overrides { delta1: Some(1.0), delta2: Some(1.0), c: Some(0.0), amp: Some(1.0), t1: Some(1.0), ..Overrides::default() };
        let err = parse_config(Command::Trajectory, None, None, &ov).unwrap_err().to_string();
        assert!(err.contains("--omega"), "{err}");
    }

    #[test]
    fn sweep_requires_a_file() {
        assert!(parse_config(Command::Sweep, None, None, &Overrides::default()).is_err());
    }
}
