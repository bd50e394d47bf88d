//! Angle-space (Bloch sphere) integration of the projective dynamics.
//!
//! The cot/tan terms have coordinate singularities at the poles. Steps that
//! start within `pole_tol` of `θ ∈ {0, π}` are taken in amplitude space and
//! mapped back.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::biorth::amplitude_rhs;
use super::projective::{wrap_angle, ProjectiveState};
use crate::error::{Error, Result};
use crate::model::{drive_gamma, ModelParams};
use crate::ode::{drive, uniform_times, Dopri5, Flow, IntegratorOptions, OdeSystem, StepKernel, StepStats, Trial};

use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BlochOptions {
    pub integrator: IntegratorOptions,
    /// Uniform samples over `[t0, t1]`, endpoints included.
    pub samples: usize,
    /// Distance from a pole below which a step is taken in amplitude space.
    pub pole_tol: f64,
}

impl Default for BlochOptions {
    fn default() -> Self {
        BlochOptions { integrator: IntegratorOptions::default(), samples: 1001, pole_tol: 1e-10 }
    }
}

impl BlochOptions {
    pub fn with_samples(mut self, n: usize) -> Self {
        self.samples = n;
        self
    }
}

/// Right and left projective states at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochPair {
    pub right: ProjectiveState,
    pub left: ProjectiveState,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlochRun<T> {
    pub samples: Vec<T>,
    pub stats: StepStats,
    /// Accepted steps taken in amplitude space.
    pub pole_steps: usize,
}

fn pole_distance(theta: f64) -> f64 {
    theta.min(PI - theta)
}

/// Linear right-state angle equations with effective complex diagonal `g = γ + A`.
fn angle_rhs(d1: f64, d2: f64, g: Complex64, y: &[f64], dy: &mut [f64]) {
    let (theta, phi) = (y[0], y[1]);
    let (s, c) = (0.5 * theta).sin_cos();
    let (sp, cp) = phi.sin_cos();
    let (tan, cot) = (s / c, c / s);
    let sin_t = theta.sin();
    dy[0] = -d1 * sp * c * c - d2 * sp * s * s + g.im * sin_t;
    dy[1] = -g.re - 0.5 * d1 * cot * cp + 0.5 * d2 * tan * cp;
    dy[2] = 0.25 * (d2 - d1) * sin_t * sp - 0.5 * g.im * theta.cos();
    dy[3] = 0.5 * g.re - 0.5 * d2 * tan * cp;
}

/// Keeps `θ ∈ [0, π]` and `φ ∈ (−π, π]` without changing the amplitudes.
fn normalise_angles(y: &mut [f64]) -> bool {
    let mut changed = false;
    if y[0] < 0.0 {
        y[0] = -y[0];
        y[1] += PI;
        changed = true;
    } else if y[0] > PI {
        y[0] = 2.0 * PI - y[0];
        y[1] += PI;
        y[3] += PI;
        changed = true;
    }
    if y[1] <= -PI || y[1] > PI {
        y[1] = wrap_angle(y[1]);
        changed = true;
    }
    changed
}

fn to_amplitudes(y: &[f64], mu_offset: f64) -> [Complex64; 2] {
    ProjectiveState { theta: y[0], phi: y[1], mu: y[2], nu: y[3], t: 0.0 }.amplitudes_scaled(mu_offset)
}

fn from_amplitudes(v: [Complex64; 2], mu_offset: f64, prev_nu: f64, out: &mut [f64]) -> bool {
    match ProjectiveState::from_amplitudes(v, mu_offset, 0.0) {
        Ok(s) => {
            let s = s.continued_from(prev_nu);
            out[..4].copy_from_slice(&[s.theta, s.phi, s.mu, s.nu]);
            true
        }
        Err(_) => false,
    }
}

/// Angle-space model with an amplitude-space fallback near the poles.
trait AngleModel<const N: usize, const M: usize> {
    fn angle_rhs(&self, t: f64, y: &[f64; N], dy: &mut [f64; N]);
    fn amp_rhs(&self, t: f64, x: &[f64; M], dx: &mut [f64; M]);
    fn near_pole(&self, y: &[f64; N], tol: f64) -> bool;
    fn pole_distance(&self, y: &[f64; N]) -> f64;
    /// Amplitudes plus whatever offset is needed to map back.
    fn to_amp(&self, y: &[f64; N]) -> ([f64; M], f64);
    fn amp_to_angles(&self, x: &[f64; M], offset: f64, prev: &[f64; N]) -> Option<[f64; N]>;
    fn normalise(&self, y: &mut [f64; N]) -> bool;
}

// adapters carry the other dimension so the impls are unambiguous
struct AngleSystemN<'a, T, const M: usize>(&'a T);
struct AmpSystem<'a, T, const N: usize>(&'a T);

impl<T: AngleModel<N, M>, const N: usize, const M: usize> OdeSystem<N> for AngleSystemN<'_, T, M> {
    fn rhs(&self, t: f64, y: &[f64; N], dy: &mut [f64; N]) {
        self.0.angle_rhs(t, y, dy)
    }
}

impl<T: AngleModel<N, M>, const N: usize, const M: usize> OdeSystem<M> for AmpSystem<'_, T, N> {
    fn rhs(&self, t: f64, x: &[f64; M], dx: &mut [f64; M]) {
        self.0.amp_rhs(t, x, dx)
    }
}

struct HybridKernel<'a, T: AngleModel<N, M>, const N: usize, const M: usize> {
    model: &'a T,
    angles: Dopri5<'a, AngleSystemN<'a, T, M>, N>,
    amps: AmpSystem<'a, T, N>,
    pole_tol: f64,
}

impl<T: AngleModel<N, M>, const N: usize, const M: usize> StepKernel<N> for HybridKernel<'_, T, N, M> {
    fn attempt(&mut self, t: f64, y: &[f64; N], h: f64, opts: &IntegratorOptions) -> Trial<N> {
        if self.model.near_pole(y, self.pole_tol) {
            let (x0, offset) = self.model.to_amp(y);
            let trial = Dopri5::new(&self.amps).attempt(t, &x0, h, opts);
            match self.model.amp_to_angles(&trial.y, offset, y) {
                Some(y_new) => Trial { y: y_new, err: trial.err },
                None => Trial { y: *y, err: f64::INFINITY },
            }
        } else {
            self.angles.attempt(t, y, h, opts)
        }
    }
}

fn run_hybrid<T, S, const N: usize, const M: usize>(
    model: &T,
    y0: [f64; N],
    t0: f64,
    t1: f64,
    opts: &BlochOptions,
    mut sample: impl FnMut(f64, &[f64; N]) -> S,
) -> Result<BlochRun<S>>
where
    T: AngleModel<N, M>,
{
    if !(t1 > t0) {
        return Err(Error::invalid("t1", format!("end time {t1} must exceed start {t0}")));
    }
    let angle_sys = AngleSystemN::<T, M>(model);
    let mut kernel = HybridKernel {
        model,
        angles: Dopri5::new(&angle_sys),
        amps: AmpSystem::<T, N>(model),
        pole_tol: opts.pole_tol,
    };
    let mut y0 = y0;
    model.normalise(&mut y0);

    let times = uniform_times(t0, t1, opts.samples);
    let mut samples = Vec::with_capacity(times.len());
    let mut pole_steps = 0usize;
    let mut stalls = 0usize;
    let mut last_distance = model.pole_distance(&y0);
    let mut stalled_at: Option<f64> = None;
    let pole_tol = opts.pole_tol;

    let end = {
        let on_step = |t: f64, y: &mut [f64; N]| {
            model.normalise(y);
            let d = model.pole_distance(y);
            if d < pole_tol || last_distance < pole_tol {
                pole_steps += 1;
                if d < pole_tol && d <= last_distance {
                    stalls += 1;
                } else {
                    stalls = 0;
                }
            } else {
                stalls = 0;
            }
            last_distance = d;
            if stalls > 1 {
                stalled_at = Some(t);
                return Flow::Stop;
            }
            Flow::Continue
        };
        let on_sample = |t: f64, y: &[f64; N]| samples.push(sample(t, y));
        drive(&mut kernel, t0, y0, t1, &times, &opts.integrator, on_step, on_sample)?
    };
    if let Some(t) = stalled_at {
        return Err(Error::PoleStall { t });
    }
    Ok(BlochRun { samples, stats: end.stats, pole_steps })
}

struct LinearModel {
    p: ModelParams,
}

impl AngleModel<4, 4> for LinearModel {
    fn angle_rhs(&self, t: f64, y: &[f64; 4], dy: &mut [f64; 4]) {
        let g = Complex64::from(drive_gamma(t, &self.p));
        angle_rhs(self.p.delta1, self.p.delta2, g, y, dy);
    }

    fn amp_rhs(&self, t: f64, x: &[f64; 4], dx: &mut [f64; 4]) {
        let g = drive_gamma(t, &self.p);
        let (a, b) = (Complex64::new(x[0], x[1]), Complex64::new(x[2], x[3]));
        let mi = Complex64::new(0.0, -1.0);
        let da = mi * (a * (0.5 * g) + b * (0.5 * self.p.delta1));
        let db = mi * (a * (0.5 * self.p.delta2) - b * (0.5 * g));
        *dx = [da.re, da.im, db.re, db.im];
    }

    fn near_pole(&self, y: &[f64; 4], tol: f64) -> bool {
        pole_distance(y[0]) < tol
    }

    fn pole_distance(&self, y: &[f64; 4]) -> f64 {
        pole_distance(y[0])
    }

    fn to_amp(&self, y: &[f64; 4]) -> ([f64; 4], f64) {
        let [a, b] = to_amplitudes(y, y[2]);
        ([a.re, a.im, b.re, b.im], y[2])
    }

    fn amp_to_angles(&self, x: &[f64; 4], offset: f64, prev: &[f64; 4]) -> Option<[f64; 4]> {
        let mut out = [0.0; 4];
        let v = [Complex64::new(x[0], x[1]), Complex64::new(x[2], x[3])];
        from_amplitudes(v, offset, prev[3], &mut out).then_some(out)
    }

    fn normalise(&self, y: &mut [f64; 4]) -> bool {
        normalise_angles(y)
    }
}

fn state_from(y: &[f64], t: f64) -> ProjectiveState {
    ProjectiveState { theta: y[0], phi: y[1], mu: y[2], nu: y[3], t }
}

fn check_init(s: &ProjectiveState, name: &'static str) -> Result<()> {
    let vals = [s.theta, s.phi, s.mu, s.nu];
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid(name, "angles must be finite"));
    }
    if !(0.0..=PI).contains(&s.theta) {
        return Err(Error::invalid(name, format!("theta {} outside [0, π]", s.theta)));
    }
    Ok(())
}

/// Integrates the linear (`c = 0`) right-state angle system.
pub fn integrate_bloch_linear(
    p: &ModelParams,
    init: &ProjectiveState,
    t0: f64,
    t1: f64,
    opts: &BlochOptions,
) -> Result<BlochRun<ProjectiveState>> {
    p.validate()?;
    if p.c != 0.0 {
        return Err(Error::invalid("c", "linear angle system requires c = 0"));
    }
    check_init(init, "init")?;
    let model = LinearModel { p: *p };
    run_hybrid(&model, [init.theta, init.phi, init.mu, init.nu], t0, t1, opts, |t, y| state_from(y, t))
}

struct NonlinearModel {
    p: ModelParams,
}

impl NonlinearModel {
    /// `A = c·w` rebuilt from both projective states.
    fn feedback_term(&self, y: &[f64; 8]) -> Complex64 {
        let (sr, cr) = (0.5 * y[0]).sin_cos();
        let (sl, cl) = (0.5 * y[4]).sin_cos();
        let rel = Complex64::from_polar(sr * sl, y[1] - y[5]);
        let w = (Complex64::from(cr * cl) - rel) * Complex64::from_polar((y[2] + y[6]).exp(), y[3] - y[7]);
        w * self.p.c
    }
}

impl AngleModel<8, 8> for NonlinearModel {
    fn angle_rhs(&self, t: f64, y: &[f64; 8], dy: &mut [f64; 8]) {
        let gamma = drive_gamma(t, &self.p);
        let a = self.feedback_term(y);
        let g = Complex64::from(gamma) + a;
        angle_rhs(self.p.delta1, self.p.delta2, g, &y[..4], &mut dy[..4]);
        // H† swaps the tunneling amplitudes and conjugates the diagonal
        angle_rhs(self.p.delta2, self.p.delta1, g.conj(), &y[4..], &mut dy[4..]);
    }

    fn amp_rhs(&self, t: f64, x: &[f64; 8], dx: &mut [f64; 8]) {
        amplitude_rhs(&self.p, 0.0, t, x, dx);
    }

    fn near_pole(&self, y: &[f64; 8], tol: f64) -> bool {
        self.pole_distance(y) < tol
    }

    fn pole_distance(&self, y: &[f64; 8]) -> f64 {
        pole_distance(y[0]).min(pole_distance(y[4]))
    }

    fn to_amp(&self, y: &[f64; 8]) -> ([f64; 8], f64) {
        // balance the magnitudes; the product, and hence w, is unchanged
        let m = 0.5 * (y[2] - y[6]);
        let r = to_amplitudes(&y[..4], m);
        let l = to_amplitudes(&y[4..], -m);
        ([r[0].re, r[0].im, r[1].re, r[1].im, l[0].re, l[0].im, l[1].re, l[1].im], m)
    }

    fn amp_to_angles(&self, x: &[f64; 8], m: f64, prev: &[f64; 8]) -> Option<[f64; 8]> {
        let mut out = [0.0; 8];
        let r = [Complex64::new(x[0], x[1]), Complex64::new(x[2], x[3])];
        let l = [Complex64::new(x[4], x[5]), Complex64::new(x[6], x[7])];
        let ok = from_amplitudes(r, m, prev[3], &mut out[..4]) && from_amplitudes(l, -m, prev[7], &mut out[4..]);
        ok.then_some(out)
    }

    fn normalise(&self, y: &mut [f64; 8]) -> bool {
        let a = normalise_angles(&mut y[..4]);
        let b = normalise_angles(&mut y[4..]);
        a || b
    }
}

/// Integrates the coupled right/left angle systems with the nonlinear feedback.
///
/// The feedback enters as `A = c·w`, `w = β₁β₂* − α₁α₂*`, the sign that makes
/// the angle equations equivalent to the amplitude equations.
pub fn integrate_bloch_nonlinear(
    p: &ModelParams,
    init_r: &ProjectiveState,
    init_l: &ProjectiveState,
    t0: f64,
    t1: f64,
    opts: &BlochOptions,
) -> Result<BlochRun<BlochPair>> {
    p.validate()?;
    check_init(init_r, "init_r")?;
    check_init(init_l, "init_l")?;
    if p.c == 0.0 {
        // decoupled: the left state follows the linear system with Δ₁ and Δ₂ swapped
        let right = integrate_bloch_linear(p, init_r, t0, t1, opts)?;
        let swapped = ModelParams { delta1: p.delta2, delta2: p.delta1, ..*p };
        let left = integrate_bloch_linear(&swapped, init_l, t0, t1, opts)?;
        let samples = right.samples.iter().zip(&left.samples).map(|(r, l)| BlochPair { right: *r, left: *l }).collect();
        let stats = StepStats {
            accepted: right.stats.accepted + left.stats.accepted,
            rejected: right.stats.rejected + left.stats.rejected,
        };
        return Ok(BlochRun { samples, stats, pole_steps: right.pole_steps + left.pole_steps });
    }
    let model = NonlinearModel { p: *p };
    let y0 = [
        init_r.theta, init_r.phi, init_r.mu, init_r.nu, init_l.theta, init_l.phi, init_l.mu, init_l.nu,
    ];
    run_hybrid(&model, y0, t0, t1, opts, |t, y| BlochPair { right: state_from(&y[..4], t), left: state_from(&y[4..], t) })
}

/// `z₀ = (1 − k²)/(1 + k²)`, the circle `tan²(θ₀/2) = k²`.
pub fn asymptotic_circle_z(k: f64) -> f64 {
    let k2 = k * k;
    (1.0 - k2) / (1.0 + k2)
}
