//! Physical parameters, the periodic drive and the instantaneous mean-field
//! Hamiltonian of the nonreciprocal two-level system.
//!
//! Energies are dimensionless with ħ = 1. The Hamiltonian acting on the right
//! state `(α₁, β₁)` is
//!
//! ```text
//!     ⎡ (γ + c·w)/2      Δ₁/2     ⎤
//! H = ⎢                           ⎥ ,   w = β₁β₂* − α₁α₂*
//!     ⎣    Δ₂/2     −(γ + c·w)/2  ⎦
//! ```
//!
//! and the left state `(α₂, β₂)` evolves under `H†`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sign class of the tunneling product `Δ₁Δ₂`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TunnelingClass {
    /// `Δ₁Δ₂ > 0`: similar to a Hermitian system, real spectrum.
    InPhase,
    /// `Δ₁Δ₂ < 0`: exceptional points in the linear limit.
    AntiPhase,
    /// `Δ₁Δ₂ = 0`.
    Degenerate,
}

/// Full parameter set of the driven model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub delta1: f64,
    pub delta2: f64,
    /// Nonlinearity strength.
    pub c: f64,
    /// Drive amplitude `A`.
    pub amp: f64,
    /// Drive angular frequency.
    pub omega: f64,
    /// Drive offset.
    #[serde(default)]
    pub eps0: f64,
}

impl ModelParams {
    pub fn new(delta1: f64, delta2: f64, c: f64, amp: f64, omega: f64, eps0: f64) -> Result<Self> {
        let p = ModelParams { delta1, delta2, c, amp, omega, eps0 };
        p.validate()?;
        Ok(p)
    }

    /// Builds `Δ₁ = kΔ` and `Δ₂ = ±Δ/k`, with the sign of `Δ₂` chosen by `class`.
    /// `Δ₁` is always positive.
    pub fn from_mean(
        delta: f64,
        k: f64,
        class: TunnelingClass,
        c: f64,
        amp: f64,
        omega: f64,
        eps0: f64,
    ) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::invalid("k", format!("nonreciprocity must be positive, got {k}")));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::invalid("delta", format!("mean amplitude must be positive, got {delta}")));
        }
        let sign = match class {
            TunnelingClass::InPhase => 1.0,
            TunnelingClass::AntiPhase => -1.0,
            TunnelingClass::Degenerate => {
                return Err(Error::invalid("delta2", "degenerate tunneling has no mean amplitude"))
            }
        };
        Self::new(k * delta, sign * delta / k, c, amp, omega, eps0)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("delta1", self.delta1),
            ("delta2", self.delta2),
            ("c", self.c),
            ("amp", self.amp),
            ("omega", self.omega),
            ("eps0", self.eps0),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::invalid(name, format!("must be finite, got {v}")));
            }
        }
        if self.delta2 == 0.0 {
            return Err(Error::invalid("delta2", "must be nonzero (nonreciprocity undefined)"));
        }
        if self.omega <= 0.0 {
            return Err(Error::invalid("omega", format!("must be positive, got {}", self.omega)));
        }
        Ok(())
    }

    /// Mean tunneling amplitude `Δ = sqrt|Δ₁Δ₂|`.
    pub fn mean_amplitude(&self) -> f64 {
        (self.delta1 * self.delta2).abs().sqrt()
    }

    /// Nonreciprocity `k = sqrt|Δ₁/Δ₂|`.
    pub fn nonreciprocity(&self) -> f64 {
        (self.delta1 / self.delta2).abs().sqrt()
    }

    pub fn tunneling_product(&self) -> f64 {
        self.delta1 * self.delta2
    }

    pub fn class(&self) -> TunnelingClass {
        let d = self.tunneling_product();
        if d > 0.0 {
            TunnelingClass::InPhase
        } else if d < 0.0 {
            TunnelingClass::AntiPhase
        } else {
            TunnelingClass::Degenerate
        }
    }

    pub fn period(&self) -> f64 {
        std::f64::consts::TAU / self.omega
    }

    pub fn with_c(mut self, c: f64) -> Self {
        self.c = c;
        self
    }

    pub fn with_eps0(mut self, eps0: f64) -> Self {
        self.eps0 = eps0;
        self
    }
}

/// `γ(t) = A·sin(ωt) + ε₀`.
pub fn drive_gamma(t: f64, p: &ModelParams) -> f64 {
    p.amp * (p.omega * t).sin() + p.eps0
}

/// Paired right/left amplitudes of the mean-field state.
///
/// Stored amplitudes may be rescaled; the raw amplitudes are
/// `exp(logscale)` times the stored ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiorthState {
    pub alpha1: Complex64,
    pub beta1: Complex64,
    pub alpha2: Complex64,
    pub beta2: Complex64,
    pub logscale_r: f64,
    pub logscale_l: f64,
    pub t: f64,
}

impl Default for BiorthState {
    fn default() -> Self {
        Self::lower_level()
    }
}

impl BiorthState {
    /// `(α₁, β₁) = (α₂, β₂) = (0, 1)`.
    pub fn lower_level() -> Self {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        BiorthState {
            alpha1: zero,
            beta1: one,
            alpha2: zero,
            beta2: one,
            logscale_r: 0.0,
            logscale_l: 0.0,
            t: 0.0,
        }
    }

    /// Pairs a right state with the direction of a left state, scaling the left
    /// one so that `⟨ψˡ|ψʳ⟩ = 1`.
    pub fn from_pair(right: [Complex64; 2], left: [Complex64; 2]) -> Result<Self> {
        let overlap = left[0].conj() * right[0] + left[1].conj() * right[1];
        if overlap.norm() < 1e-300 || !overlap.is_finite() {
            return Err(Error::ZeroState);
        }
        let scale = overlap.conj().inv();
        Ok(BiorthState {
            alpha1: right[0],
            beta1: right[1],
            alpha2: left[0] * scale,
            beta2: left[1] * scale,
            logscale_r: 0.0,
            logscale_l: 0.0,
            t: 0.0,
        })
    }

    pub fn at(mut self, t: f64) -> Self {
        self.t = t;
        self
    }

    pub fn right(&self) -> [Complex64; 2] {
        [self.alpha1, self.beta1]
    }

    pub fn left(&self) -> [Complex64; 2] {
        [self.alpha2, self.beta2]
    }

    /// `α₁α₂* + β₁β₂*` of the stored amplitudes (invariant under joint rescale).
    pub fn biorthogonal_norm(&self) -> Complex64 {
        self.alpha1 * self.alpha2.conj() + self.beta1 * self.beta2.conj()
    }

    /// Applies `ψʳ → ψʳ/s`, `ψˡ → s·ψˡ` and books `ln s` in the log scales.
    pub fn rescale(&mut self, s: f64) {
        debug_assert!(s > 0.0);
        let inv = 1.0 / s;
        self.alpha1 *= inv;
        self.beta1 *= inv;
        self.alpha2 *= s;
        self.beta2 *= s;
        let ln = s.ln();
        self.logscale_r += ln;
        self.logscale_l -= ln;
    }

    /// `⟨ψˡ|ψʳ⟩` of the raw amplitudes.
    pub fn raw_overlap(&self) -> Complex64 {
        self.biorthogonal_norm() * (self.logscale_r + self.logscale_l).exp()
    }

    /// Moves the norm of each half into its log scale.
    pub fn normalize_halves(&mut self) {
        let nr = self.alpha1.norm().hypot(self.beta1.norm());
        let nl = self.alpha2.norm().hypot(self.beta2.norm());
        if nr > 0.0 && nr.is_finite() {
            self.alpha1 /= nr;
            self.beta1 /= nr;
            self.logscale_r += nr.ln();
        }
        if nl > 0.0 && nl.is_finite() {
            self.alpha2 /= nl;
            self.beta2 /= nl;
            self.logscale_l += nl.ln();
        }
    }

    /// Raw population `|α₁|²` including the accumulated scale.
    pub fn raw_pop_alpha1(&self) -> f64 {
        self.alpha1.norm_sqr() * (2.0 * self.logscale_r).exp()
    }

    /// Projective population `|ã|² = |α₁|²/(|α₁|² + |β₁|²)`.
    pub fn proj_pop_alpha(&self) -> f64 {
        let a = self.alpha1.norm_sqr();
        a / (a + self.beta1.norm_sqr())
    }

    pub fn is_finite(&self) -> bool {
        self.alpha1.is_finite()
            && self.beta1.is_finite()
            && self.alpha2.is_finite()
            && self.beta2.is_finite()
            && self.logscale_r.is_finite()
            && self.logscale_l.is_finite()
    }

    pub fn max_right_component(&self) -> f64 {
        self.alpha1.norm().max(self.beta1.norm())
    }

    pub fn max_left_component(&self) -> f64 {
        self.alpha2.norm().max(self.beta2.norm())
    }
}

/// Nonlinear feedback `w = β₁β₂* − α₁α₂*`.
///
/// Note the sign: the diagonal of the Hamiltonian carries `+c·w`; the
/// frequently quoted feedback `c(α₁α₂* − β₁β₂*)` is `−c·w`.
pub fn nonlinear_feedback(state: &BiorthState) -> Complex64 {
    state.beta1 * state.beta2.conj() - state.alpha1 * state.alpha2.conj()
}

/// Instantaneous 2×2 mean-field Hamiltonian, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianMatrix {
    pub entries: [[Complex64; 2]; 2],
    /// Feedback `w` the diagonal was built from.
    pub feedback: Complex64,
}

impl HamiltonianMatrix {
    /// Builds the matrix for a given drive value and feedback.
    pub fn from_feedback(p: &ModelParams, gamma: f64, w: Complex64) -> Self {
        let diag = (Complex64::from(gamma) + p.c * w) * 0.5;
        HamiltonianMatrix {
            entries: [
                [diag, Complex64::from(0.5 * p.delta1)],
                [Complex64::from(0.5 * p.delta2), -diag],
            ],
            feedback: w,
        }
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        let m = &self.entries;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }

    /// `H† v`.
    pub fn apply_adjoint(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        let m = &self.entries;
        [
            m[0][0].conj() * v[0] + m[1][0].conj() * v[1],
            m[0][1].conj() * v[0] + m[1][1].conj() * v[1],
        ]
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.entries;
        HamiltonianMatrix {
            entries: [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]],
            feedback: self.feedback,
        }
    }

    /// Both eigenvalues `±sqrt(h₁₁² + h₁₂h₂₁)` (traceless matrix).
    pub fn eigenvalues(&self) -> [Complex64; 2] {
        let m = &self.entries;
        let r = (m[0][0] * m[0][0] + m[0][1] * m[1][0]).sqrt();
        [r, -r]
    }
}

/// Hamiltonian at time `t` for the given (possibly rescaled) state.
///
/// The feedback is computed from raw amplitudes.
pub fn hamiltonian_at(state: &BiorthState, p: &ModelParams, t: f64) -> Result<HamiltonianMatrix> {
    if !state.is_finite() {
        return Err(Error::NonFinite { t });
    }
    let w = nonlinear_feedback(state) * (state.logscale_r + state.logscale_l).exp();
    Ok(HamiltonianMatrix::from_feedback(p, drive_gamma(t, p), w))
}
