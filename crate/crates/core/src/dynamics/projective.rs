//! Projective (Bloch-sphere) decomposition `ψ = e^{μ+iν}(sin(θ/2)e^{iφ}, cos(θ/2))`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::BiorthState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Right,
    Left,
}

/// Bloch angles plus the stripped norm exponent and global phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectiveState {
    /// Polar angle in `[0, π]`.
    pub theta: f64,
    /// Azimuth in `(−π, π]`.
    pub phi: f64,
    pub mu: f64,
    /// Global phase, continued along a trajectory.
    pub nu: f64,
    pub t: f64,
}

/// Wraps an angle into `(−π, π]`.
pub fn wrap_angle(x: f64) -> f64 {
    let mut y = x.rem_euclid(TAU);
    if y > PI {
        y -= TAU;
    }
    y
}

impl ProjectiveState {
    /// The north-pole state `(ã, b̃) = (0, 1)`.
    pub fn lower_level(t: f64) -> Self {
        ProjectiveState { theta: 0.0, phi: 0.0, mu: 0.0, nu: 0.0, t }
    }

    /// Population imbalance `z = |b̃|² − |ã|² = cos θ`.
    pub fn z(&self) -> f64 {
        self.theta.cos()
    }

    /// Projective population `|ã|²`.
    pub fn pop_a(&self) -> f64 {
        let s = (0.5 * self.theta).sin();
        s * s
    }

    /// Normalised `(ã, b̃)`.
    pub fn amplitudes(&self) -> [Complex64; 2] {
        let (s, c) = (0.5 * self.theta).sin_cos();
        [Complex64::from_polar(s, self.phi), Complex64::from(c)]
    }

    /// `e^{μ+iν}(ã, b̃)`.
    pub fn raw_amplitudes(&self) -> [Complex64; 2] {
        let f = Complex64::from_polar(self.mu.exp(), self.nu);
        let [a, b] = self.amplitudes();
        [f * a, f * b]
    }

    /// Same amplitudes with an offset removed from `μ` (keeps magnitudes in range).
    pub fn amplitudes_scaled(&self, mu_offset: f64) -> [Complex64; 2] {
        let f = Complex64::from_polar((self.mu - mu_offset).exp(), self.nu);
        let [a, b] = self.amplitudes();
        [f * a, f * b]
    }

    /// Cartesian point on the unit sphere.
    pub fn bloch_vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        [st * self.phi.cos(), st * self.phi.sin(), ct]
    }

    /// Decomposes raw amplitudes `v·e^{log_scale}`.
    pub fn from_amplitudes(v: [Complex64; 2], log_scale: f64, t: f64) -> Result<Self> {
        let (na, nb) = (v[0].norm(), v[1].norm());
        let norm = na.hypot(nb);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroState);
        }
        let theta = 2.0 * na.atan2(nb);
        let (phi, nu) = if na == 0.0 {
            (0.0, v[1].arg())
        } else if nb == 0.0 {
            (0.0, v[0].arg())
        } else {
            (wrap_angle(v[0].arg() - v[1].arg()), v[1].arg())
        };
        Ok(ProjectiveState { theta, phi, mu: norm.ln() + log_scale, nu, t })
    }

    /// Moves `nu` by a multiple of 2π to sit closest to `reference`.
    pub fn continued_from(mut self, reference: f64) -> Self {
        self.nu += TAU * ((reference - self.nu) / TAU).round();
        self
    }
}

/// Projects one side of a biorthogonal state.
pub fn project(state: &BiorthState, side: Side) -> Result<ProjectiveState> {
    match side {
        Side::Right => ProjectiveState::from_amplitudes(state.right(), state.logscale_r, state.t),
        Side::Left => ProjectiveState::from_amplitudes(state.left(), state.logscale_l, state.t),
    }
}

/// Projects with `ν` continued from the previous sample of the same side.
pub fn project_continued(state: &BiorthState, side: Side, prev: Option<&ProjectiveState>) -> Result<ProjectiveState> {
    let s = project(state, side)?;
    Ok(match prev {
        Some(p) => s.continued_from(p.nu),
        None => s,
    })
}
