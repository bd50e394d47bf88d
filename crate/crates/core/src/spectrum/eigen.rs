//! Biorthogonal eigenpairs of the self-consistent Hamiltonian.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Right/left eigenvectors normalised so that `⟨φˡ|φʳ⟩ = 1` and `‖φʳ‖ = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenpair {
    pub energy: Complex64,
    pub right: [Complex64; 2],
    pub left: [Complex64; 2],
    /// Self-consistent diagonal `F = γ/2 + c·w/2 = γE/(2E + c)`.
    pub shift: Complex64,
}

impl Eigenpair {
    /// `w = β₁β₂* − α₁α₂*` of the pair.
    pub fn feedback(&self) -> Complex64 {
        self.right[1] * self.left[1].conj() - self.right[0] * self.left[0].conj()
    }
}

fn norm2(v: &[Complex64; 2]) -> f64 {
    v[0].norm_sqr() + v[1].norm_sqr()
}

/// Eigenpair belonging to a root `energy` of the quartic at drive `gamma`.
pub fn eigenstate_for_root(energy: Complex64, p: &ModelParams, gamma: f64) -> Result<Eigenpair> {
    let denom = energy * 2.0 + p.c;
    if denom.norm() < 1e-12 {
        return Err(Error::SelfConsistencySingular { magnitude: denom.norm() });
    }
    let f = energy * gamma / denom;
    let h12 = Complex64::from(0.5 * p.delta1);
    let h21 = Complex64::from(0.5 * p.delta2);

    // two algebraically equivalent null vectors each; keep the better conditioned one
    let r_a = [h12, energy - f];
    let r_b = [energy + f, h21];
    let right = if norm2(&r_a) >= norm2(&r_b) { r_a } else { r_b };
    // left row vector u with u·H = E·u
    let u_a = [energy + f, h12];
    let u_b = [h21, energy - f];
    let u = if norm2(&u_a) >= norm2(&u_b) { u_a } else { u_b };

    let rn = norm2(&right).sqrt();
    if rn == 0.0 || norm2(&u) == 0.0 {
        return Err(Error::ZeroState);
    }
    let right = [right[0] / rn, right[1] / rn];
    let overlap = u[0] * right[0] + u[1] * right[1];
    if overlap.norm() < 1e-14 * norm2(&u).sqrt() {
        return Err(Error::ExceptionalPoint { overlap: overlap.norm() });
    }
    let left = [(u[0] / overlap).conj(), (u[1] / overlap).conj()];
    Ok(Eigenpair { energy, right, left, shift: f })
}
