//! Coupled right/left amplitude integration.

use std::cell::Cell;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::projective::{project, ProjectiveState, Side};
use crate::error::{Error, Result};
use crate::model::{drive_gamma, BiorthState, HamiltonianMatrix, ModelParams};
use crate::ode::{drive, uniform_times, Dopri5, Flow, IntegratorOptions};

/// Amplitude trajectories, rescaling and singular reporting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrajectoryOptions {
    pub integrator: IntegratorOptions,
    /// Uniform samples over `[t0, t1]`, endpoints included. `1` keeps only `t1`.
    pub samples: usize,
    /// Jointly rescale once a stored component exceeds this magnitude.
    pub rescale_threshold: f64,
    /// Raw `|α₁|²` above this is reported singular.
    pub singular_cap: f64,
    /// End the run at the first singular step.
    pub stop_at_singular: bool,
}

impl Default for TrajectoryOptions {
    fn default() -> Self {
        TrajectoryOptions {
            integrator: IntegratorOptions::default(),
            samples: 201,
            rescale_threshold: 1e6,
            singular_cap: 1e12,
            stop_at_singular: false,
        }
    }
}

impl TrajectoryOptions {
    pub fn with_samples(mut self, n: usize) -> Self {
        self.samples = n;
        self
    }

    pub fn stopping_at_singular(mut self) -> Self {
        self.stop_at_singular = true;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub state: BiorthState,
    pub right: ProjectiveState,
    pub left: ProjectiveState,
}

impl TrajectorySample {
    pub fn t(&self) -> f64 {
        self.state.t
    }

    /// Feedback `w` from raw amplitudes.
    pub fn feedback(&self) -> Complex64 {
        crate::model::nonlinear_feedback(&self.state) * (self.state.logscale_r + self.state.logscale_l).exp()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryStats {
    pub steps: usize,
    pub rejected: usize,
    pub rescales: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
    pub stats: TrajectoryStats,
    /// First time raw `|α₁|²` exceeded the singular cap.
    pub singular_at: Option<f64>,
    pub final_state: BiorthState,
}

impl Trajectory {
    pub fn is_singular(&self) -> bool {
        self.singular_at.is_some()
    }

    /// `max |⟨ψˡ|ψʳ⟩ − 1|` over the stored samples, from raw amplitudes.
    pub fn max_norm_error(&self) -> f64 {
        self.samples.iter().map(|s| (s.state.raw_overlap() - 1.0).norm()).fold(0.0, f64::max)
    }

    pub fn right_states(&self) -> Vec<ProjectiveState> {
        self.samples.iter().map(|s| s.right).collect()
    }

    pub fn left_states(&self) -> Vec<ProjectiveState> {
        self.samples.iter().map(|s| s.left).collect()
    }
}

pub(crate) fn pack(s: &BiorthState) -> [f64; 8] {
    [
        s.alpha1.re, s.alpha1.im, s.beta1.re, s.beta1.im, s.alpha2.re, s.alpha2.im, s.beta2.re, s.beta2.im,
    ]
}

pub(crate) fn unpack(y: &[f64; 8]) -> [Complex64; 4] {
    [
        Complex64::new(y[0], y[1]),
        Complex64::new(y[2], y[3]),
        Complex64::new(y[4], y[5]),
        Complex64::new(y[6], y[7]),
    ]
}

/// `ψʳ' = −iHψʳ`, `ψˡ' = −iH†ψˡ`, with the stored product scaled by
/// `e^{lr+ll}` to recover the raw feedback.
pub(crate) fn amplitude_rhs(p: &ModelParams, log_product: f64, t: f64, y: &[f64; 8], dy: &mut [f64; 8]) {
    let [a1, b1, a2, b2] = unpack(y);
    let w = (b1 * b2.conj() - a1 * a2.conj()) * log_product.exp();
    let h = HamiltonianMatrix::from_feedback(p, drive_gamma(t, p), w);
    let mi = Complex64::new(0.0, -1.0);
    let r = h.apply([a1, b1]);
    let l = h.apply_adjoint([a2, b2]);
    let out = [mi * r[0], mi * r[1], mi * l[0], mi * l[1]];
    for (i, z) in out.iter().enumerate() {
        dy[2 * i] = z.re;
        dy[2 * i + 1] = z.im;
    }
}

fn component_max(y: &[f64; 8], offset: usize) -> f64 {
    Complex64::new(y[offset], y[offset + 1]).norm().max(Complex64::new(y[offset + 2], y[offset + 3]).norm())
}

fn half_norm(y: &[f64; 8], offset: usize) -> f64 {
    y[offset..offset + 4].iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Integrates the coupled right/left equations over uniform samples.
pub fn integrate_biorthogonal(
    p: &ModelParams,
    init: &BiorthState,
    t0: f64,
    t1: f64,
    opts: &TrajectoryOptions,
) -> Result<Trajectory> {
    let times = uniform_times(t0, t1, opts.samples);
    integrate_biorthogonal_at(p, init, t0, t1, &times, opts)
}

/// Same as [`integrate_biorthogonal`] with explicit sample times in `[t0, t1]`.
pub fn integrate_biorthogonal_at(
    p: &ModelParams,
    init: &BiorthState,
    t0: f64,
    t1: f64,
    times: &[f64],
    opts: &TrajectoryOptions,
) -> Result<Trajectory> {
    let mut samples = Vec::with_capacity(times.len());
    let mut traj = integrate_biorthogonal_visit(p, init, t0, t1, times, opts, |s| samples.push(*s))?;
    traj.samples = samples;
    Ok(traj)
}

/// Streams each sample to `visit` instead of storing it; the returned
/// trajectory has no samples.
pub fn integrate_biorthogonal_visit(
    p: &ModelParams,
    init: &BiorthState,
    t0: f64,
    t1: f64,
    times: &[f64],
    opts: &TrajectoryOptions,
    mut visit: impl FnMut(&TrajectorySample),
) -> Result<Trajectory> {
    p.validate()?;
    if !(t1 > t0) {
        return Err(Error::invalid("t1", format!("end time {t1} must exceed start {t0}")));
    }
    if !init.is_finite() {
        return Err(Error::NonFinite { t: t0 });
    }
    let norm_err = (init.raw_overlap() - 1.0).norm();
    if norm_err > 1e-12 {
        return Err(Error::invalid("init", format!("not biorthogonally normalized (|⟨l|r⟩ − 1| = {norm_err:e})")));
    }
    if times.windows(2).any(|w| w[1] < w[0]) || times.iter().any(|&t| t < t0 || t > t1) {
        return Err(Error::invalid("samples", "sample times must be sorted and inside [t0, t1]"));
    }

    // start from unit-norm halves so the step sequence does not depend on how init was scaled
    let mut init = *init;
    init.normalize_halves();
    let init = &init;

    let lr = Cell::new(init.logscale_r);
    let ll = Cell::new(init.logscale_l);
    let rhs = |t: f64, y: &[f64; 8], dy: &mut [f64; 8]| amplitude_rhs(p, lr.get() + ll.get(), t, y, dy);
    let mut kernel = Dopri5::new(&rhs);
    let rescales = Cell::new(0usize);
    let singular_at: Cell<Option<f64>> = Cell::new(None);

    let state_of = |t: f64, y: &[f64; 8]| {
        let [alpha1, beta1, alpha2, beta2] = unpack(y);
        BiorthState { alpha1, beta1, alpha2, beta2, logscale_r: lr.get(), logscale_l: ll.get(), t }
    };

    let mut prev: Option<TrajectorySample> = None;
    let mut sample_err: Option<Error> = None;

    let on_step = |t: f64, y: &mut [f64; 8]| {
        // each half is renormalised on its own; w picks up e^{lr+ll}
        for (offset, log) in [(0, &lr), (4, &ll)] {
            if component_max(y, offset) > opts.rescale_threshold {
                let n = half_norm(y, offset);
                for v in y[offset..offset + 4].iter_mut() {
                    *v /= n;
                }
                log.set(log.get() + n.ln());
                rescales.set(rescales.get() + 1);
            }
        }
        if singular_at.get().is_none() {
            let raw = (y[0] * y[0] + y[1] * y[1]) * (2.0 * lr.get()).exp();
            if !(raw <= opts.singular_cap) {
                singular_at.set(Some(t));
                if opts.stop_at_singular {
                    return Flow::Stop;
                }
            }
        }
        Flow::Continue
    };

    let on_sample = |t: f64, y: &[f64; 8]| {
        if sample_err.is_some() {
            return;
        }
        let state = state_of(t, y);
        let right = project(&state, Side::Right).map(|s| match prev {
            Some(q) => s.continued_from(q.right.nu),
            None => s,
        });
        let left = project(&state, Side::Left).map(|s| match prev {
            Some(q) => s.continued_from(q.left.nu),
            None => s,
        });
        match (right, left) {
            (Ok(right), Ok(left)) => {
                let sample = TrajectorySample { state, right, left };
                visit(&sample);
                prev = Some(sample);
            }
            (Err(e), _) | (_, Err(e)) => sample_err = Some(e),
        }
    };

    let end = drive(&mut kernel, t0, pack(init), t1, times, &opts.integrator, on_step, on_sample)?;
    if let Some(e) = sample_err {
        return Err(e);
    }
    let final_state = state_of(end.t, &end.y);
    Ok(Trajectory {
        samples: Vec::new(),
        stats: TrajectoryStats { steps: end.stats.accepted, rejected: end.stats.rejected, rescales: rescales.get() },
        singular_at: singular_at.get(),
        final_state,
    })
}
