//! Reality regions of the anti-phase spectrum in the `(c/Δ, γ/Δ)` plane.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegionLabel {
    /// `f < 0`.
    I,
    /// `f > 0` and `(γ/Δ)² > 1`.
    II,
    /// `(γ/Δ)² < 1`.
    III,
}

impl RegionLabel {
    pub fn index(&self) -> u8 {
        match self {
            RegionLabel::I => 1,
            RegionLabel::II => 2,
            RegionLabel::III => 3,
        }
    }
}

/// `f(x, y) = (x² − y² + 1)³ + 27x²y²`.
pub fn region_function(x: f64, y: f64) -> f64 {
    let base = x * x - y * y + 1.0;
    base * base * base + 27.0 * x * x * y * y
}

const BOUNDARY_TOL: f64 = 1e-12;

/// Region of `(x, y) = (c/Δ, γ/Δ)`. On `f = 0` the point goes to region I,
/// on `y² = 1` to region II.
pub fn region_classify(x: f64, y: f64) -> RegionLabel {
    let y2 = y * y;
    if y2 < 1.0 - BOUNDARY_TOL {
        return RegionLabel::III;
    }
    let f = region_function(x, y);
    if (y2 - 1.0).abs() < BOUNDARY_TOL && f.abs() >= BOUNDARY_TOL {
        return RegionLabel::II;
    }
    if f < BOUNDARY_TOL {
        RegionLabel::I
    } else {
        RegionLabel::II
    }
}
