//! Trapping classification and the Aharonov-Anandan phase of closed loops.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::bloch::asymptotic_circle_z;
use super::projective::{wrap_angle, ProjectiveState};
use crate::error::{Error, Result};

/// Half-width of the band around `z₀` classified as boundary.
pub const TIE_MARGIN: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TrappingClass {
    Josephson,
    SelfTrapped,
    Boundary,
}

impl TrappingClass {
    /// Numeric code for grids: 0 Josephson, 0.5 boundary, 1 self-trapped.
    pub fn as_value(&self) -> f64 {
        match self {
            TrappingClass::Josephson => 0.0,
            TrappingClass::Boundary => 0.5,
            TrappingClass::SelfTrapped => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrappingReport {
    pub classification: TrappingClass,
    pub min_z_over_window: f64,
    pub boundary_z: f64,
    pub window: (f64, f64),
}

/// Classifies a right-state trajectory against the circle `z₀(k)`.
///
/// The trajectory should resolve the drive period finely (100 samples per
/// period or more) since only stored samples enter the minimum.
pub fn trapping_metric(traj: &[ProjectiveState], k: f64, window: (f64, f64), period: f64) -> Result<TrappingReport> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::invalid("k", format!("nonreciprocity must be positive, got {k}")));
    }
    let (w0, w1) = window;
    if !(w1 - w0 >= period * (1.0 - 1e-12)) {
        return Err(Error::WindowTooShort { window: w1 - w0, period });
    }
    let (first, last) = match (traj.first(), traj.last()) {
        (Some(a), Some(b)) => (a.t, b.t),
        _ => return Err(Error::invalid("traj", "empty trajectory")),
    };
    let slack = 1e-9 * (last - first).abs().max(1.0);
    if w0 < first - slack || w1 > last + slack {
        return Err(Error::invalid("window", format!("[{w0}, {w1}] outside trajectory span [{first}, {last}]")));
    }
    let min_z = traj
        .iter()
        .filter(|s| s.t >= w0 - slack && s.t <= w1 + slack)
        .map(|s| s.z())
        .fold(f64::INFINITY, f64::min);
    let classification = classify_min_z(min_z, k);
    Ok(TrappingReport { classification, min_z_over_window: min_z, boundary_z: asymptotic_circle_z(k), window })
}

/// Compares a window minimum of `z` with `z₀(k) ± TIE_MARGIN`.
pub fn classify_min_z(min_z: f64, k: f64) -> TrappingClass {
    let z0 = asymptotic_circle_z(k);
    if min_z > z0 + TIE_MARGIN {
        TrappingClass::SelfTrapped
    } else if min_z < z0 - TIE_MARGIN {
        TrappingClass::Josephson
    } else {
        TrappingClass::Boundary
    }
}

const CLOSURE_TOL: f64 = 1e-6;

/// `∮ ½(1 − z) dφ` along a closed loop, reduced to `[0, 2π)`.
pub fn geometric_phase(traj: &[ProjectiveState]) -> Result<f64> {
    let (first, last) = match (traj.first(), traj.last()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::invalid("traj", "empty trajectory")),
    };
    let mismatch = (last.theta - first.theta).abs().max(wrap_angle(last.phi - first.phi).abs());
    if mismatch > CLOSURE_TOL {
        return Err(Error::NotClosed { mismatch });
    }
    let mut phase = 0.0;
    for pair in traj.windows(2) {
        let z_mid = 0.5 * (pair[0].z() + pair[1].z());
        phase += 0.5 * (1.0 - z_mid) * wrap_angle(pair[1].phi - pair[0].phi);
    }
    Ok(phase.rem_euclid(TAU))
}
