//! Weak-coupling (`Δ ≪ ω`) Dirac picture.
//!
//! Freezing the feedback at `w₀` and removing the diagonal with the gauge
//! `ψ = diag(e^{−iΦ/2}, e^{iΦ/2}) ψ̃`, `Φ(t) = ε₀t − (A/ω)cos ωt + c·w₀·t`,
//! leaves a purely off-diagonal system driven by `Ω = (Δ/2)e^{iΦ}`:
//!
//! ```text
//! i ∂ₜ ψ̃ʳ = [ 0, kΩ ; (−1)ʲ Ω*/k, 0 ] ψ̃ʳ
//! ```
//!
//! with `j = 1` for anti-phase and `j = 2` for in-phase tunneling. The left
//! ket obeys the same construction applied to `H†`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BiorthState, ModelParams};
use crate::ode::{drive, uniform_times, Dopri5, Flow, IntegratorOptions, StepStats};

/// Resonance-distance tolerance in units of ω.
pub const CONDITION_TOL: f64 = 0.05;

/// `Φ(t) = ε₀t − (A/ω)cos(ωt) + ct`.
pub fn phi_phase(t: f64, p: &ModelParams) -> f64 {
    p.eps0 * t - p.amp / p.omega * (p.omega * t).cos() + p.c * t
}

fn phase_with_feedback(t: f64, p: &ModelParams, w0: Complex64) -> Complex64 {
    Complex64::from(p.eps0 * t - p.amp / p.omega * (p.omega * t).cos()) + w0 * (p.c * t)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiracParams {
    pub params: ModelParams,
    /// 1 for anti-phase, 2 for in-phase.
    pub j: u8,
}

impl DiracParams {
    /// Derives `j` from the sign of `Δ₂`.
    pub fn new(params: ModelParams) -> Result<Self> {
        let j = if params.delta2 < 0.0 { 1 } else { 2 };
        let dp = DiracParams { params, j };
        dp.validate()?;
        Ok(dp)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if !(self.params.delta1 > 0.0) {
            return Err(Error::invalid("delta1", "the Dirac picture assumes Δ₁ > 0"));
        }
        let expected = if self.params.delta2 < 0.0 { 1 } else { 2 };
        if self.j != expected {
            return Err(Error::invalid("j", format!("j = {} inconsistent with sign of Δ₂ = {}", self.j, self.params.delta2)));
        }
        Ok(())
    }

    /// `(−1)ʲ`.
    pub fn sign(&self) -> f64 {
        if self.j == 1 {
            -1.0
        } else {
            1.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiracSample {
    pub t: f64,
    /// Dirac-picture right amplitudes `(α̃₁, β̃₁)`.
    pub right: [Complex64; 2],
    /// Dirac-picture left amplitudes `(α̃₂, β̃₂)`.
    pub left: [Complex64; 2],
}

impl DiracSample {
    /// `|ã|²`; gauge invariant.
    pub fn proj_pop_a(&self) -> f64 {
        let a = self.right[0].norm_sqr();
        a / (a + self.right[1].norm_sqr())
    }

    /// `β̃₁β̃₂* − α̃₁α̃₂*`, equal to the lab-frame `w`.
    pub fn feedback(&self) -> Complex64 {
        self.right[1] * self.left[1].conj() - self.right[0] * self.left[0].conj()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiracRun {
    pub samples: Vec<DiracSample>,
    /// Feedback frozen into `Φ`.
    pub w0: Complex64,
    /// `max |w(t) − w₀|` over the samples.
    pub max_w_drift: f64,
    pub stats: StepStats,
}

/// Integrates the Dirac-picture right and left systems from the lab-frame
/// state `init` at `t0`, sampling `samples` uniform times.
pub fn integrate_dirac(
    dp: &DiracParams,
    init: &BiorthState,
    t0: f64,
    t1: f64,
    samples: usize,
    opts: &IntegratorOptions,
) -> Result<DiracRun> {
    dp.validate()?;
    let p = dp.params;
    let ratio = p.mean_amplitude() / p.omega;
    if ratio > 0.1 {
        log::warn!("weak-coupling approximation used outside its range (Δ/ω = {ratio})");
    }
    let w0 = crate::model::nonlinear_feedback(init) * (init.logscale_r + init.logscale_l).exp();
    let (k, half) = (p.nonreciprocity(), 0.5 * p.mean_amplitude());
    let sign = dp.sign();

    let rhs = |t: f64, y: &[f64; 8], dy: &mut [f64; 8]| {
        let phase = phase_with_feedback(t, &p, w0);
        let i = Complex64::new(0.0, 1.0);
        let up = (i * phase).exp() * half; // Ω
        let down = (-i * phase).exp() * half; // Ω* for real Φ
        let up_l = (i * phase.conj()).exp() * half;
        let down_l = (-i * phase.conj()).exp() * half;
        let (a1, b1) = (Complex64::new(y[0], y[1]), Complex64::new(y[2], y[3]));
        let (a2, b2) = (Complex64::new(y[4], y[5]), Complex64::new(y[6], y[7]));
        let out = [
            -i * (up * k * b1),
            -i * (down * (sign / k) * a1),
            -i * (up_l * (sign / k) * b2),
            -i * (down_l * k * a2),
        ];
        for (n, z) in out.iter().enumerate() {
            dy[2 * n] = z.re;
            dy[2 * n + 1] = z.im;
        }
    };

    let i = Complex64::new(0.0, 1.0);
    let ph0 = phase_with_feedback(t0, &p, w0);
    let (gr_a, gr_b) = ((0.5 * i * ph0).exp(), (-0.5 * i * ph0).exp());
    let (gl_a, gl_b) = ((0.5 * i * ph0.conj()).exp(), (-0.5 * i * ph0.conj()).exp());
    let sr = init.logscale_r.exp();
    let sl = init.logscale_l.exp();
    let v = [init.alpha1 * gr_a * sr, init.beta1 * gr_b * sr, init.alpha2 * gl_a * sl, init.beta2 * gl_b * sl];
    let y0 = [v[0].re, v[0].im, v[1].re, v[1].im, v[2].re, v[2].im, v[3].re, v[3].im];

    let times = uniform_times(t0, t1, samples);
    let mut out = Vec::with_capacity(times.len());
    let mut kernel = Dopri5::new(&rhs);
    let end = drive(&mut kernel, t0, y0, t1, &times, opts, |_, _| Flow::Continue, |t, y| {
        out.push(DiracSample {
            t,
            right: [Complex64::new(y[0], y[1]), Complex64::new(y[2], y[3])],
            left: [Complex64::new(y[4], y[5]), Complex64::new(y[6], y[7])],
        })
    })?;
    let max_w_drift = out.iter().map(|s| (s.feedback() - w0).norm()).fold(0.0, f64::max);
    Ok(DiracRun { samples: out, w0, max_w_drift, stats: end.stats })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Constructive,
    Destructive,
    Neither,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseCondition {
    pub verdict: Verdict,
    pub nearest_d: i64,
    /// `|(ε₀ + c)/ω − d|` for the nearest integer `d`.
    pub residue: f64,
}

/// Stückelberg condition: constructive near integer `(ε₀ + c)/ω`,
/// destructive near half-integers.
pub fn interference_condition(p: &ModelParams) -> PhaseCondition {
    let x = (p.eps0 + p.c) / p.omega;
    let d = x.round();
    let residue = (x - d).abs();
    let verdict = if residue < CONDITION_TOL {
        Verdict::Constructive
    } else if (residue - 0.5).abs() < CONDITION_TOL {
        Verdict::Destructive
    } else {
        Verdict::Neither
    };
    PhaseCondition { verdict, nearest_d: d as i64, residue }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TunnelingClass;
    use std::f64::consts::PI;

    fn weak(k: f64, class: TunnelingClass, c: f64) -> ModelParams {
        ModelParams::from_mean(0.05, k, class, c, 10.5, 1.0, 3.0).unwrap()
    }

    #[test]
    fn phase_values() {
        let p = weak(2.0, TunnelingClass::InPhase, 0.0);
        assert!((phi_phase(0.0, &p) + 10.5).abs() < 1e-15);
        assert!((phi_phase(2.0 * PI, &p) - (6.0 * PI - 10.5)).abs() < 1e-12);
        let p = weak(2.0, TunnelingClass::InPhase, 0.7).with_eps0(1.3);
        for t in [0.0, 0.4, 5.0] {
            let inc = phi_phase(t + p.period(), &p) - phi_phase(t, &p);
            assert!((inc - 2.0 * PI * 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn j_follows_sign_of_delta2() {
        assert_eq!(DiracParams::new(weak(2.0, TunnelingClass::InPhase, 0.0)).unwrap().j, 2);
        assert_eq!(DiracParams::new(weak(2.0, TunnelingClass::AntiPhase, 0.0)).unwrap().j, 1);
        let bad = DiracParams { params: weak(2.0, TunnelingClass::InPhase, 0.0), j: 1 };
        assert!(bad.validate().is_err());
        let neg = ModelParams::new(-1.0, 1.0, 0.0, 1.0, 1.0, 0.0).unwrap();
        assert!(DiracParams::new(neg).is_err());
    }

    #[test]
    fn verdicts() {
        let v = |c: f64| interference_condition(&weak(2.0, TunnelingClass::InPhase, c));
        assert_eq!((v(0.0).verdict, v(0.0).nearest_d), (Verdict::Constructive, 3));
        assert_eq!(v(0.5).verdict, Verdict::Destructive);
        assert_eq!((v(1.0).verdict, v(1.0).nearest_d), (Verdict::Constructive, 4));
        assert_eq!(v(0.25).verdict, Verdict::Neither);
    }

    #[test]
    fn gauge_leaves_feedback_and_populations() {
        let dp = DiracParams::new(weak(2.0, TunnelingClass::InPhase, 0.5)).unwrap();
        let run = integrate_dirac(&dp, &BiorthState::lower_level(), 0.0, 2.0 * PI, 11, &IntegratorOptions::default()).unwrap();
        assert_eq!(run.w0, Complex64::new(1.0, 0.0));
        assert_eq!(run.samples[0].proj_pop_a(), 0.0);
        assert!(run.max_w_drift < 0.05);
    }
}
