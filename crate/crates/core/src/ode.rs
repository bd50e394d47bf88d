//! Adaptive embedded Runge-Kutta 5(4) (Dormand-Prince) on fixed-size real
//! state vectors.
//!
//! The driver lands exactly on every requested sample time, so sampled
//! values carry the full step accuracy instead of interpolation error.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances and step limits shared by all integrations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorOptions {
    pub rtol: f64,
    pub atol: f64,
    /// First trial step; adapted immediately.
    pub h_init: f64,
    /// Upper bound on the step, `None` for unbounded.
    pub h_max: Option<f64>,
    pub max_steps: usize,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        IntegratorOptions { rtol: 1e-10, atol: 1e-13, h_init: 1e-3, h_max: None, max_steps: 5_000_000 }
    }
}

impl IntegratorOptions {
    pub fn with_tolerances(mut self, rtol: f64, atol: f64) -> Self {
        self.rtol = rtol;
        self.atol = atol;
        self
    }

    pub fn with_h_max(mut self, h_max: f64) -> Self {
        self.h_max = Some(h_max);
        self
    }
}

/// Right-hand side of `y' = f(t, y)`.
pub trait OdeSystem<const N: usize> {
    fn rhs(&self, t: f64, y: &[f64; N], dy: &mut [f64; N]);
}

impl<const N: usize, F> OdeSystem<N> for F
where
    F: Fn(f64, &[f64; N], &mut [f64; N]),
{
    fn rhs(&self, t: f64, y: &[f64; N], dy: &mut [f64; N]) {
        self(t, y, dy)
    }
}

/// Outcome of one trial step.
#[derive(Debug, Clone, Copy)]
pub struct Trial<const N: usize> {
    pub y: [f64; N],
    /// Scaled error norm; the step is acceptable when `err <= 1`.
    pub err: f64,
}

/// Something that can attempt a step of size `h` from `(t, y)`.
pub trait StepKernel<const N: usize> {
    fn attempt(&mut self, t: f64, y: &[f64; N], h: f64, opts: &IntegratorOptions) -> Trial<N>;
}

// Dormand-Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// b - b*, the embedded 4th-order difference
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Plain Dormand-Prince kernel with first-same-as-last reuse.
pub struct Dopri5<'a, S, const N: usize> {
    sys: &'a S,
    // derivative at the last point we know it for
    cache: Option<(f64, [f64; N], [f64; N])>,
    pending: Option<(f64, [f64; N], [f64; N])>,
    pub evaluations: usize,
}

impl<'a, S: OdeSystem<N>, const N: usize> Dopri5<'a, S, N> {
    pub fn new(sys: &'a S) -> Self {
        Dopri5 { sys, cache: None, pending: None, evaluations: 0 }
    }

    fn eval(&mut self, t: f64, y: &[f64; N]) -> [f64; N] {
        let mut dy = [0.0; N];
        self.sys.rhs(t, y, &mut dy);
        self.evaluations += 1;
        dy
    }

    fn derivative_at(&mut self, t: f64, y: &[f64; N]) -> [f64; N] {
        for (tc, yc, fc) in [&self.pending, &self.cache].into_iter().flatten() {
            if *tc == t && yc == y {
                return *fc;
            }
        }
        self.eval(t, y)
    }
}

#[inline]
fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut s = 0.0;
        for (a, k) in terms {
            s += a * k[i];
        }
        *o += h * s;
    }
    out
}

impl<S: OdeSystem<N>, const N: usize> StepKernel<N> for Dopri5<'_, S, N> {
    fn attempt(&mut self, t: f64, y: &[f64; N], h: f64, opts: &IntegratorOptions) -> Trial<N> {
        let k1 = self.derivative_at(t, y);
        self.cache = Some((t, *y, k1));
        let k2 = self.eval(t + C2 * h, &axpy(y, h, &[(A21, &k1)]));
        let k3 = self.eval(t + C3 * h, &axpy(y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = self.eval(t + C4 * h, &axpy(y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = self.eval(t + C5 * h, &axpy(y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
        let k6 = self.eval(
            t + h,
            &axpy(y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y_new = axpy(y, h, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let k7 = self.eval(t + h, &y_new);
        self.pending = Some((t + h, y_new, k7));

        let mut acc = 0.0;
        for i in 0..N {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
            acc += (e / sc) * (e / sc);
        }
        let err = (acc / N as f64).sqrt();
        Trial { y: y_new, err: if err.is_finite() { err } else { f64::INFINITY } }
    }
}

/// What the post-step hook wants the driver to do next.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flow {
    Continue,
    Stop,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
}

/// Result of a driven integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveEnd<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    pub stats: StepStats,
    /// True when the hook stopped the run before `t_end`.
    pub stopped: bool,
}

/// Integrates from `t0` to `t_end`, landing on every time in `samples`
/// (sorted, inside `[t0, t_end]`) and calling `on_sample` there.
///
/// After every accepted step `on_step` may modify the state in place (e.g.
/// rescaling) or stop the run.
#[allow(clippy::too_many_arguments)]
pub fn drive<K, const N: usize>(
    kernel: &mut K,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    samples: &[f64],
    opts: &IntegratorOptions,
    mut on_step: impl FnMut(f64, &mut [f64; N]) -> Flow,
    mut on_sample: impl FnMut(f64, &[f64; N]),
) -> Result<DriveEnd<N>>
where
    K: StepKernel<N>,
{
    let span = t_end - t0;
    if !(span > 0.0) {
        return Err(Error::invalid("t1", format!("end time {t_end} must exceed start {t0}")));
    }
    if y0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { t: t0 });
    }
    let h_min = 1e-14 * span;
    let h_cap = opts.h_max.unwrap_or(f64::INFINITY).min(span);
    let mut h = opts.h_init.min(h_cap).max(h_min * 10.0);
    let mut t = t0;
    let mut y = y0;
    let mut stats = StepStats::default();
    let mut next_sample = 0;

    while next_sample < samples.len() && samples[next_sample] <= t0 {
        on_sample(t0, &y);
        next_sample += 1;
    }

    while t < t_end {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Error::TooManySteps { t, max_steps: opts.max_steps });
        }
        let target = if next_sample < samples.len() { samples[next_sample].min(t_end) } else { t_end };
        let remaining = target - t;
        // land exactly, and avoid leaving a sliver step behind
        let (h_try, lands) = if h >= remaining * (1.0 - 1e-12) {
            (remaining, true)
        } else if h > 0.5 * remaining {
            (0.5 * remaining, false)
        } else {
            (h, false)
        };

        let trial = kernel.attempt(t, &y, h_try, opts);
        let err = trial.err;

        if err <= 1.0 {
            stats.accepted += 1;
            t = if lands { target } else { t + h_try };
            y = trial.y;
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            // clipped landing steps should not shrink the working step
            let base = if lands { h.max(h_try) } else { h_try };
            h = (base * fac).min(h_cap);

            let flow = on_step(t, &mut y);
            if y.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite { t });
            }
            while next_sample < samples.len() && samples[next_sample] <= t {
                on_sample(t, &y);
                next_sample += 1;
            }
            if flow == Flow::Stop {
                return Ok(DriveEnd { t, y, stats, stopped: true });
            }
        } else {
            stats.rejected += 1;
            let fac = if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.2, 1.0) } else { 0.2 };
            h = h_try * fac;
            if h < h_min {
                return Err(if err.is_finite() {
                    Error::StepUnderflow { t, h }
                } else {
                    Error::NonFinite { t }
                });
            }
        }
    }
    Ok(DriveEnd { t, y, stats, stopped: false })
}

/// `n` uniformly spaced times from `t0` to `t1` inclusive.
pub fn uniform_times(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![t1],
        _ => (0..n)
            .map(|i| if i + 1 == n { t1 } else { t0 + (t1 - t0) * i as f64 / (n - 1) as f64 })
            .collect(),
    }
}
