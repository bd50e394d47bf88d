//! Parallel two-dimensional parameter sweeps.
//!
//! Every cell is an independent trajectory. Cells are evaluated on a rayon
//! pool and collected by index, so the grid does not depend on the worker
//! count.

use std::io::{self, Write};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{classify_min_z, integrate_biorthogonal, integrate_biorthogonal_visit, TrajectoryOptions};
use crate::error::{Error, Result};
use crate::model::{BiorthState, ModelParams};
use crate::ode::{uniform_times, IntegratorOptions};

/// Quantity varied along an axis. Ratios are taken against the cell's
/// current `Δ` or `ω`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisParam {
    Eps0OverDelta,
    OmegaOverDelta,
    DeltaOverOmega,
    COverDelta,
    COverOmega,
    Eps0OverOmega,
    AmpOverDelta,
    AmpOverOmega,
    Eps0,
    Omega,
    C,
    Amp,
}

impl AxisParam {
    pub fn name(&self) -> &'static str {
        match self {
            AxisParam::Eps0OverDelta => "eps0_over_delta",
            AxisParam::OmegaOverDelta => "omega_over_delta",
            AxisParam::DeltaOverOmega => "delta_over_omega",
            AxisParam::COverDelta => "c_over_delta",
            AxisParam::COverOmega => "c_over_omega",
            AxisParam::Eps0OverOmega => "eps0_over_omega",
            AxisParam::AmpOverDelta => "amp_over_delta",
            AxisParam::AmpOverOmega => "amp_over_omega",
            AxisParam::Eps0 => "eps0",
            AxisParam::Omega => "omega",
            AxisParam::C => "c",
            AxisParam::Amp => "amp",
        }
    }

    // ω first, then Δ, then quantities measured in those units
    fn stage(&self) -> u8 {
        match self {
            AxisParam::OmegaOverDelta | AxisParam::Omega => 0,
            AxisParam::DeltaOverOmega => 1,
            _ => 2,
        }
    }

    fn apply(&self, p: &mut ModelParams, v: f64) {
        let delta = p.mean_amplitude();
        match self {
            AxisParam::Eps0OverDelta => p.eps0 = v * delta,
            AxisParam::OmegaOverDelta => p.omega = v * delta,
            AxisParam::DeltaOverOmega => {
                let f = v * p.omega / delta;
                p.delta1 *= f;
                p.delta2 *= f;
            }
            AxisParam::COverDelta => p.c = v * delta,
            AxisParam::COverOmega => p.c = v * p.omega,
            AxisParam::Eps0OverOmega => p.eps0 = v * p.omega,
            AxisParam::AmpOverDelta => p.amp = v * delta,
            AxisParam::AmpOverOmega => p.amp = v * p.omega,
            AxisParam::Eps0 => p.eps0 = v,
            AxisParam::Omega => p.omega = v,
            AxisParam::C => p.c = v,
            AxisParam::Amp => p.amp = v,
        }
    }
}

/// Linearly spaced axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub param: AxisParam,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(param: AxisParam, min: f64, max: f64, count: usize) -> Self {
        Axis { param, min, max, count }
    }

    pub fn coords(&self) -> Vec<f64> {
        uniform_times(self.min, self.max, self.count)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Observable {
    /// Raw `|α₁|²` at the horizon.
    RawPopA1,
    /// Projective `|ã|²` at the horizon.
    ProjPopA,
    /// 0 Josephson, 0.5 boundary, 1 self-trapped over `[0, horizon]`.
    TrappingClass,
    /// Minimum of `z` over `[0, horizon]`.
    MinZ,
}

impl Observable {
    pub fn is_trapping(&self) -> bool {
        matches!(self, Observable::TrappingClass | Observable::MinZ)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Horizon {
    Absolute(f64),
    /// Multiples of the cell's drive period.
    DrivePeriods(f64),
    /// Multiples of `1/Δ` of the cell.
    InverseDelta(f64),
}

impl Horizon {
    pub fn resolve(&self, p: &ModelParams) -> f64 {
        match *self {
            Horizon::Absolute(t) => t,
            Horizon::DrivePeriods(n) => n * p.period(),
            Horizon::InverseDelta(n) => n / p.mean_amplitude(),
        }
    }
}

fn default_samples_per_period() -> usize {
    200
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axis_x: Axis,
    pub axis_y: Axis,
    /// Template; axis values overwrite the swept quantities.
    pub fixed: ModelParams,
    pub observable: Observable,
    pub horizon: Horizon,
    #[serde(default)]
    pub initial: BiorthState,
    #[serde(default)]
    pub integrator: IntegratorOptions,
    /// Re-impose `A = ratio·ω` after the axes are applied.
    #[serde(default)]
    pub lock_amp_over_omega: Option<f64>,
    /// Sampling density of the trapping observables.
    #[serde(default = "default_samples_per_period")]
    pub samples_per_period: usize,
}

impl SweepSpec {
    pub fn new(axis_x: Axis, axis_y: Axis, fixed: ModelParams, observable: Observable, horizon: Horizon) -> Self {
        SweepSpec {
            axis_x,
            axis_y,
            fixed,
            observable,
            horizon,
            initial: BiorthState::lower_level(),
            integrator: IntegratorOptions::default(),
            lock_amp_over_omega: None,
            samples_per_period: default_samples_per_period(),
        }
    }

    pub fn with_amp_lock(mut self, ratio: f64) -> Self {
        self.lock_amp_over_omega = Some(ratio);
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.fixed.validate()?;
        for (name, a) in [("axis_x", &self.axis_x), ("axis_y", &self.axis_y)] {
            if a.count < 2 {
                return Err(Error::invalid(name, "count must be at least 2"));
            }
            if !(a.min.is_finite() && a.max.is_finite() && a.max > a.min) {
                return Err(Error::invalid(name, "need finite min < max"));
            }
        }
        if self.axis_x.param == self.axis_y.param {
            return Err(Error::invalid("axis_y", format!("duplicate axis parameter {}", self.axis_x.param.name())));
        }
        if self.fixed.delta1 == 0.0 {
            return Err(Error::invalid("delta1", "ratio axes need a nonzero mean amplitude"));
        }
        if self.observable.is_trapping() && self.samples_per_period < 100 {
            return Err(Error::invalid("samples_per_period", "trapping needs at least 100 samples per period"));
        }
        let h = match self.horizon {
            Horizon::Absolute(t) | Horizon::DrivePeriods(t) | Horizon::InverseDelta(t) => t,
        };
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::invalid("horizon", "must be positive"));
        }
        Ok(())
    }

    /// Parameters of cell `(iy, ix)`.
    pub fn cell_params(&self, iy: usize, ix: usize) -> ModelParams {
        let xs = self.axis_x.coords();
        let ys = self.axis_y.coords();
        self.params_at(xs[ix], ys[iy])
    }

    fn params_at(&self, x: f64, y: f64) -> ModelParams {
        let mut p = self.fixed;
        let mut axes = [(self.axis_x.param, x), (self.axis_y.param, y)];
        axes.sort_by_key(|(a, _)| a.stage());
        for (a, v) in axes {
            a.apply(&mut p, v);
        }
        if let Some(r) = self.lock_amp_over_omega {
            p.amp = r * p.omega;
        }
        p
    }
}

/// One evaluated cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub value: f64,
    pub singular: bool,
    /// 0 when the cell integrated cleanly, otherwise an error code.
    pub error_code: u8,
}

/// Evaluates one cell of the sweep.
pub fn evaluate_cell(spec: &SweepSpec, p: &ModelParams) -> Result<CellResult> {
    p.validate()?;
    let horizon = spec.horizon.resolve(p);
    let init = spec.initial;
    let base = TrajectoryOptions { integrator: spec.integrator, ..TrajectoryOptions::default() };
    match spec.observable {
        Observable::RawPopA1 => {
            let traj = integrate_biorthogonal(p, &init, 0.0, horizon, &base.with_samples(1).stopping_at_singular())?;
            let value = traj.final_state.raw_pop_alpha1();
            Ok(CellResult { value, singular: traj.is_singular(), error_code: 0 })
        }
        Observable::ProjPopA => {
            let traj = integrate_biorthogonal(p, &init, 0.0, horizon, &base.with_samples(1))?;
            let value = traj.final_state.proj_pop_alpha();
            Ok(CellResult { value, singular: traj.is_singular(), error_code: 0 })
        }
        Observable::TrappingClass | Observable::MinZ => {
            let period = p.period();
            if horizon < period * (1.0 - 1e-12) {
                return Err(Error::WindowTooShort { window: horizon, period });
            }
            let n = ((horizon / period * spec.samples_per_period as f64).ceil() as usize).max(2) + 1;
            let times = uniform_times(0.0, horizon, n);
            let mut min_z = f64::INFINITY;
            let traj = integrate_biorthogonal_visit(p, &init, 0.0, horizon, &times, &base, |s| {
                min_z = min_z.min(s.right.z())
            })?;
            let value = match spec.observable {
                Observable::MinZ => min_z,
                _ => classify_min_z(min_z, p.nonreciprocity()).as_value(),
            };
            Ok(CellResult { value, singular: traj.is_singular(), error_code: 0 })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    /// `values[iy][ix]`.
    pub values: Vec<Vec<f64>>,
    pub singular_mask: Vec<Vec<bool>>,
    /// Per-cell error codes; 0 means none.
    pub error_codes: Vec<Vec<u8>>,
    pub x_coords: Vec<f64>,
    pub y_coords: Vec<f64>,
    pub spec: SweepSpec,
    pub wall_time_s: f64,
    pub workers: usize,
}

impl SweepGrid {
    pub fn masked_count(&self) -> usize {
        self.singular_mask.iter().flatten().filter(|m| **m).count()
    }

    pub fn error_count(&self) -> usize {
        self.error_codes.iter().flatten().filter(|c| **c != 0).count()
    }

    /// Whether `(iy, ix)` should be excluded from comparisons and drawn white.
    pub fn is_masked(&self, iy: usize, ix: usize) -> bool {
        self.singular_mask[iy][ix] || self.error_codes[iy][ix] != 0
    }

    /// Metadata for the JSON sidecar.
    pub fn metadata(&self) -> GridMetadata {
        let finite = self.unmasked_values();
        GridMetadata {
            spec: self.spec.clone(),
            x_coords: self.x_coords.clone(),
            y_coords: self.y_coords.clone(),
            rows: self.values.len(),
            cols: self.x_coords.len(),
            masked_cells: self.masked_count(),
            error_cells: self.error_count(),
            value_min: finite.iter().copied().fold(f64::INFINITY, f64::min),
            value_max: finite.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            wall_time_s: self.wall_time_s,
            workers: self.workers,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    fn unmasked_values(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for (iy, row) in self.values.iter().enumerate() {
            for (ix, v) in row.iter().enumerate() {
                if !self.is_masked(iy, ix) && v.is_finite() {
                    out.push(*v);
                }
            }
        }
        out
    }

    /// CSV: header row of x coordinates, then one row per y value.
    /// Masked cells are written as `NaN`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        write!(w, "{}\\{}", self.spec.axis_y.param.name(), self.spec.axis_x.param.name())?;
        for x in &self.x_coords {
            write!(w, ",{x}")?;
        }
        writeln!(w)?;
        for (iy, row) in self.values.iter().enumerate() {
            write!(w, "{}", self.y_coords[iy])?;
            for (ix, v) in row.iter().enumerate() {
                if self.is_masked(iy, ix) {
                    write!(w, ",NaN")?;
                } else {
                    write!(w, ",{v}")?;
                }
            }
            writeln!(w)?;
        }
        Ok(())
    }

    /// Binary 8-bit greyscale PGM, largest y on top. Values map linearly onto
    /// 0..=254; masked cells are 255 (white).
    pub fn write_pgm<W: Write>(&self, mut w: W) -> io::Result<()> {
        let (rows, cols) = (self.values.len(), self.x_coords.len());
        let finite = self.unmasked_values();
        let lo = finite.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let span = if hi > lo { hi - lo } else { 1.0 };
        write!(w, "P5\n{cols} {rows}\n255\n")?;
        let mut bytes = Vec::with_capacity(rows * cols);
        for iy in (0..rows).rev() {
            for ix in 0..cols {
                let v = self.values[iy][ix];
                let px = if self.is_masked(iy, ix) || !v.is_finite() {
                    255
                } else {
                    (((v - lo) / span) * 254.0).round().clamp(0.0, 254.0) as u8
                };
                bytes.push(px);
            }
        }
        w.write_all(&bytes)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridMetadata {
    pub spec: SweepSpec,
    pub x_coords: Vec<f64>,
    pub y_coords: Vec<f64>,
    pub rows: usize,
    pub cols: usize,
    pub masked_cells: usize,
    pub error_cells: usize,
    pub value_min: f64,
    pub value_max: f64,
    pub wall_time_s: f64,
    pub workers: usize,
    pub version: String,
}

/// Runs every cell on a pool of `workers` threads.
pub fn run_sweep(spec: &SweepSpec, workers: usize) -> Result<SweepGrid> {
    spec.validate()?;
    if workers == 0 {
        return Err(Error::invalid("workers", "must be positive"));
    }
    let start = Instant::now();
    let xs = spec.axis_x.coords();
    let ys = spec.axis_y.coords();
    let (nx, ny) = (xs.len(), ys.len());
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::invalid("workers", e.to_string()))?;
    let cells: Vec<CellResult> = pool.install(|| {
        (0..nx * ny)
            .into_par_iter()
            .map(|idx| {
                let p = spec.params_at(xs[idx % nx], ys[idx / nx]);
                evaluate_cell(spec, &p)
                    .unwrap_or_else(|e| CellResult { value: f64::NAN, singular: false, error_code: e.code() })
            })
            .collect()
    });
    let mut values = vec![vec![0.0; nx]; ny];
    let mut singular_mask = vec![vec![false; nx]; ny];
    let mut error_codes = vec![vec![0u8; nx]; ny];
    for (idx, cell) in cells.into_iter().enumerate() {
        let (iy, ix) = (idx / nx, idx % nx);
        values[iy][ix] = cell.value;
        singular_mask[iy][ix] = cell.singular;
        error_codes[iy][ix] = cell.error_code;
    }
    Ok(SweepGrid {
        values,
        singular_mask,
        error_codes,
        x_coords: xs,
        y_coords: ys,
        spec: spec.clone(),
        wall_time_s: start.elapsed().as_secs_f64(),
        workers,
    })
}

/// Trapping grid over `[0, horizon]`.
pub fn run_trapping_sweep(spec: &SweepSpec, workers: usize) -> Result<SweepGrid> {
    if !spec.observable.is_trapping() {
        return Err(Error::invalid("observable", "trapping sweep needs TRAPPING_CLASS or MIN_Z"));
    }
    run_sweep(spec, workers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TunnelingClass;

    fn template() -> ModelParams {
        ModelParams::from_mean(1.0, 2.0, TunnelingClass::InPhase, 0.0, 2.5, 1.0, 0.0).unwrap()
    }

    #[test]
    fn ratio_axes_resolve_in_order() {
        let spec = SweepSpec::new(
            Axis::new(AxisParam::DeltaOverOmega, 0.1, 0.5, 3),
            Axis::new(AxisParam::COverOmega, 0.0, 4.0, 3),
            ModelParams { omega: 2.0, ..template() },
            Observable::TrappingClass,
            Horizon::DrivePeriods(1.0),
        )
        .with_amp_lock(0.05);
        let p = spec.cell_params(2, 1);
        assert!((p.mean_amplitude() / p.omega - 0.3).abs() < 1e-14);
        assert!((p.c / p.omega - 4.0).abs() < 1e-14);
        assert!((p.amp - 0.1).abs() < 1e-14);
        assert!((p.nonreciprocity() - 2.0).abs() < 1e-14);

        let spec = SweepSpec::new(
            Axis::new(AxisParam::Eps0OverDelta, -2.0, 2.0, 5),
            Axis::new(AxisParam::OmegaOverDelta, 0.5, 1.5, 3),
            ModelParams::from_mean(2.0, 2.0, TunnelingClass::InPhase, 0.0, 5.0, 1.0, 0.0).unwrap(),
            Observable::RawPopA1,
            Horizon::InverseDelta(50.0),
        );
        let p = spec.cell_params(1, 0);
        assert!((p.eps0 + 4.0).abs() < 1e-14 && (p.omega - 2.0).abs() < 1e-14);
        assert!((spec.horizon.resolve(&p) - 25.0).abs() < 1e-14);
    }

    #[test]
    fn validation() {
        let mut spec = SweepSpec::new(
            Axis::new(AxisParam::Eps0, -1.0, 1.0, 2),
            Axis::new(AxisParam::Eps0, 0.5, 1.5, 2),
            template(),
            Observable::RawPopA1,
            Horizon::Absolute(1.0),
        );
        assert!(spec.validate().is_err());
        spec.axis_y.param = AxisParam::Omega;
        assert!(spec.validate().is_ok());
        spec.axis_x.count = 1;
        assert!(spec.validate().is_err());
    }

    #[test]
    fn writers() {
        let spec = SweepSpec::new(
            Axis::new(AxisParam::Eps0, -1.0, 1.0, 3),
            Axis::new(AxisParam::Omega, 0.5, 1.5, 2),
            template(),
            Observable::ProjPopA,
            Horizon::Absolute(1.0),
        );
        let mut grid = run_sweep(&spec, 2).unwrap();
        grid.singular_mask[0][1] = true;
        let mut csv = Vec::new();
        grid.write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with("omega\\eps0,-1,0,1"));
        assert_eq!(lines[1].split(',').nth(2), Some("NaN"));

        let mut pgm = Vec::new();
        grid.write_pgm(&mut pgm).unwrap();
        let header = b"P5\n3 2\n255\n";
        assert_eq!(&pgm[..header.len()], header);
        let body = &pgm[header.len()..];
        assert_eq!(body.len(), 6);
        // row 0 is drawn last
        assert_eq!(body[3 + 1], 255);
        assert!(body.iter().enumerate().all(|(i, b)| i == 4 || *b < 255));
    }
}
