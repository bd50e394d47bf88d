//! Adiabatic spectrum of the nonlinear nonreciprocal Hamiltonian.
//!
//! Self-consistent eigenvalues solve a quartic whose reality structure is
//! fixed by the sign of `δ = −c²γ²Δ₁Δ₂·ξ`, with
//! `ξ = (c² − γ² − Δ₁Δ₂)³ − 27c²γ²Δ₁Δ₂`.

mod eigen;
mod quartic;
mod region;
mod tracking;

pub use eigen::{eigenstate_for_root, Eigenpair};
pub use quartic::{quartic_coeffs, residual_tolerance, solve_quartic, QuarticCoeffs};
pub use region::{region_classify, region_function, RegionLabel};
pub use tracking::{spectrum_vs_time, TieBreak};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::ModelParams;

/// Reality structure of the four roots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RootClass {
    AllReal,
    TwoRealOneConjPair,
    TwoConjPairs,
    /// `δ = 0`: at least one repeated root.
    Degenerate,
}

impl RootClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            RootClass::AllReal => "ALL_REAL",
            RootClass::TwoRealOneConjPair => "TWO_REAL_ONE_CONJ_PAIR",
            RootClass::TwoConjPairs => "TWO_CONJ_PAIRS",
            RootClass::Degenerate => "DEGENERATE",
        }
    }
}

/// Spectrum at one drive value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPoint {
    pub gamma: f64,
    /// Sorted by real part, then imaginary part.
    pub roots: [Complex64; 4],
    pub classification: RootClass,
    pub delta_disc: f64,
    pub xi: f64,
    /// Branch label of each entry of `roots`.
    pub branch_ids: [usize; 4],
    /// Roots that are artifacts of the derivation (the double zero at `c = 0`).
    pub spurious: [bool; 4],
    /// Multiplicity of each root (clustering radius 1e-8).
    pub multiplicity: [usize; 4],
}

impl SpectrumPoint {
    pub fn root_of_branch(&self, branch: usize) -> Complex64 {
        let i = self.branch_ids.iter().position(|&b| b == branch).expect("branch id in 0..4");
        self.roots[i]
    }

    /// Roots that are not flagged spurious.
    pub fn physical_roots(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.roots.iter().zip(self.spurious).filter(|(_, s)| !s).map(|(z, _)| *z)
    }

    pub fn real_root_count(&self, tol: f64) -> usize {
        self.roots.iter().filter(|z| z.im.abs() < tol).count()
    }
}

/// `ξ` and `δ` straight from the parameters.
pub fn discriminants(p: &ModelParams, gamma: f64) -> (f64, f64) {
    let (c2, g2, d) = (p.c * p.c, gamma * gamma, p.tunneling_product());
    let base = c2 - g2 - d;
    let xi = base * base * base - 27.0 * c2 * g2 * d;
    (xi, -c2 * g2 * d * xi)
}

const MULTIPLICITY_RADIUS: f64 = 1e-8;

fn multiplicities(roots: &[Complex64; 4]) -> [usize; 4] {
    let mut m = [0; 4];
    for i in 0..4 {
        m[i] = roots.iter().filter(|z| (**z - roots[i]).norm() <= MULTIPLICITY_RADIUS).count();
    }
    m
}

pub(crate) fn sort_roots(roots: &mut [Complex64; 4]) {
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// Solves and classifies the spectrum at drive value `gamma`.
pub fn classify_point(p: &ModelParams, gamma: f64) -> Result<SpectrumPoint> {
    let d = p.tunneling_product();
    let (xi, delta) = discriminants(p, gamma);

    let (mut roots, spurious_zero) = if p.c == 0.0 {
        // the quartic carries an extra E² factor here; use the 2×2 roots
        let s = gamma * gamma + d;
        let e = if s >= 0.0 { Complex64::new(0.5 * s.sqrt(), 0.0) } else { Complex64::new(0.0, 0.5 * (-s).sqrt()) };
        ([e, -e, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)], true)
    } else {
        (solve_quartic(&quartic_coeffs(p, gamma))?, false)
    };
    sort_roots(&mut roots);

    let mut spurious = [false; 4];
    if spurious_zero {
        // flag two exact zeros (the physical pair may also vanish at an EP)
        let mut left = 2;
        for i in (0..4).rev() {
            if left > 0 && roots[i] == Complex64::new(0.0, 0.0) {
                spurious[i] = true;
                left -= 1;
            }
        }
    }

    let (c2, g2) = (p.c * p.c, gamma * gamma);
    let xi_scale = (c2 - g2 - d).abs().powi(3) + 27.0 * c2 * g2 * d.abs();
    let degenerate = delta == 0.0 || xi.abs() <= 1e-12 * xi_scale;
    let classification = if degenerate {
        RootClass::Degenerate
    } else if delta > 0.0 {
        RootClass::TwoRealOneConjPair
    } else if c2 + 2.0 * (d + g2) > 0.0 && (d + g2) * (2.0 * c2 + d + g2) > 0.0 {
        RootClass::AllReal
    } else {
        RootClass::TwoConjPairs
    };

    Ok(SpectrumPoint {
        gamma,
        roots,
        classification,
        delta_disc: delta,
        xi,
        branch_ids: [0, 1, 2, 3],
        spurious,
        multiplicity: multiplicities(&roots),
    })
}
