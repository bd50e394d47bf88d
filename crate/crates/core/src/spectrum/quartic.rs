//! Closed-form quartic solver (Ferrari) with Newton polishing.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Monic quartic `e4 E⁴ + e3 E³ + e2 E² + e1 E + e0`, with `e4 = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuarticCoeffs {
    pub e4: f64,
    pub e3: f64,
    pub e2: f64,
    pub e1: f64,
    pub e0: f64,
}

impl QuarticCoeffs {
    /// Highest degree first.
    pub fn as_array(&self) -> [f64; 5] {
        [self.e4, self.e3, self.e2, self.e1, self.e0]
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        (((z * self.e4 + self.e3) * z + self.e2) * z + self.e1) * z + self.e0
    }

    pub fn eval_derivative(&self, z: Complex64) -> Complex64 {
        ((z * (4.0 * self.e4) + 3.0 * self.e3) * z + 2.0 * self.e2) * z + self.e1
    }

    /// Running-error bound for Horner evaluation at `z`.
    fn eval_error_bound(&self, z: Complex64) -> f64 {
        let r = z.norm();
        let s = (((self.e4.abs() * r + self.e3.abs()) * r + self.e2.abs()) * r + self.e1.abs()) * r + self.e0.abs();
        16.0 * f64::EPSILON * s
    }
}

/// Coefficients of the adiabatic energy equation at drive value `gamma`:
///
/// `E⁴ + cE³ + (c² − γ² − Δ₁Δ₂)/4 E² − cΔ₁Δ₂/4 E − Δ₁Δ₂c²/16 = 0`.
pub fn quartic_coeffs(p: &ModelParams, gamma: f64) -> QuarticCoeffs {
    let d = p.tunneling_product();
    let c = p.c;
    QuarticCoeffs {
        e4: 1.0,
        e3: c,
        e2: (c * c - gamma * gamma - d) / 4.0,
        e1: -c * d / 4.0,
        e0: -d * c * c / 16.0,
    }
}

/// Acceptance threshold on `|q(E)|` for a polished root.
pub fn residual_tolerance(q: &QuarticCoeffs, z: Complex64) -> f64 {
    let r2 = z.norm_sqr();
    (1e-12 * (r2 * r2).max(1.0)).max(q.eval_error_bound(z))
}

const MAX_POLISH: usize = 8;

/// All four roots with multiplicity, polished and closed under conjugation.
pub fn solve_quartic(q: &QuarticCoeffs) -> Result<[Complex64; 4]> {
    if q.e4 != 1.0 {
        return Err(Error::invalid("e4", format!("quartic must be monic, got leading {}", q.e4)));
    }
    if q.as_array().iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { t: f64::NAN });
    }
    let mut roots = ferrari(q);
    for z in roots.iter_mut() {
        *z = polish(q, *z);
    }
    conjugate_close(&mut roots);
    for z in roots.iter_mut() {
        *z = polish(q, *z);
        let res = q.eval(*z).norm();
        if !(res <= residual_tolerance(q, *z)) {
            return Err(Error::NoConvergence { residual: res });
        }
    }
    Ok(roots)
}

fn ferrari(q: &QuarticCoeffs) -> [Complex64; 4] {
    let (b, c, d, e) = (q.e3, q.e2, q.e1, q.e0);
    // E = y − b/4 gives y⁴ + p y² + r1 y + r0
    let shift = b / 4.0;
    let p = c - 3.0 * b * b / 8.0;
    let r1 = d - b * c / 2.0 + b * b * b / 8.0;
    let r0 = e - b * d / 4.0 + b * b * c / 16.0 - 3.0 * b * b * b * b / 256.0;

    let ys: [Complex64; 4] = if r1 == 0.0 {
        // biquadratic
        let disc = Complex64::from(p * p - 4.0 * r0).sqrt();
        let u1 = (-p + disc) * 0.5;
        let u2 = (-p - disc) * 0.5;
        let (s1, s2) = (u1.sqrt(), u2.sqrt());
        [s1, -s1, s2, -s2]
    } else {
        // resolvent m³ + p m² + (p²/4 − r0) m − r1²/8 = 0, take the largest root
        let ms = cubic_roots(p, p * p / 4.0 - r0, -r1 * r1 / 8.0);
        let m = ms.into_iter().fold(Complex64::new(0.0, 0.0), |a, z| if z.norm() > a.norm() { z } else { a });
        let s = (m * 2.0).sqrt();
        let half_p_m = m + p / 2.0;
        let corr = Complex64::from(r1) / (s * 2.0);
        let [a1, a2] = quadratic_roots(-s, half_p_m + corr);
        let [a3, a4] = quadratic_roots(s, half_p_m - corr);
        [a1, a2, a3, a4]
    };
    ys.map(|y| y - shift)
}

/// Roots of `z² + b z + c`.
fn quadratic_roots(b: Complex64, c: Complex64) -> [Complex64; 2] {
    let disc = (b * b - c * 4.0).sqrt();
    // avoid cancellation
    let t = if (b.conj() * disc).re >= 0.0 { -(b + disc) * 0.5 } else { -(b - disc) * 0.5 };
    if t.norm() == 0.0 {
        return [t, t];
    }
    [t, c / t]
}

/// Roots of the real cubic `z³ + a z² + b z + c`.
fn cubic_roots(a: f64, b: f64, c: f64) -> [Complex64; 3] {
    let shift = a / 3.0;
    let pp = b - a * a / 3.0;
    let qq = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let omega = Complex64::new(-0.5, 3f64.sqrt() / 2.0);
    let disc = Complex64::from(qq * qq / 4.0 + pp * pp * pp / 27.0).sqrt();
    let u3a = -qq / 2.0 + disc;
    let u3b = -qq / 2.0 - disc;
    let u3 = if u3a.norm() >= u3b.norm() { u3a } else { u3b };
    let xs = if u3.norm() == 0.0 {
        [Complex64::new(0.0, 0.0); 3]
    } else {
        let u = u3.powf(1.0 / 3.0);
        let mut out = [Complex64::new(0.0, 0.0); 3];
        let mut rot = Complex64::new(1.0, 0.0);
        for x in out.iter_mut() {
            let uk = u * rot;
            *x = uk - pp / (uk * 3.0);
            rot *= omega;
        }
        out
    };
    xs.map(|x| x - shift)
}

fn polish(q: &QuarticCoeffs, mut z: Complex64) -> Complex64 {
    let mut res = q.eval(z).norm();
    for _ in 0..MAX_POLISH {
        if res == 0.0 {
            break;
        }
        let dp = q.eval_derivative(z);
        if dp.norm() == 0.0 {
            break;
        }
        let cand = z - q.eval(z) / dp;
        let cres = q.eval(cand).norm();
        if !(cres < res) {
            break;
        }
        z = cand;
        res = cres;
        if res <= q.eval_error_bound(z) {
            break;
        }
    }
    z
}

fn is_real(z: Complex64) -> bool {
    z.im.abs() <= 1e-9 * z.norm().max(1.0)
}

/// Snaps numerically-real roots onto the axis and pairs the rest into exact
/// conjugate pairs.
fn conjugate_close(roots: &mut [Complex64; 4]) {
    let mut real: Vec<usize> = Vec::new();
    let mut upper: Vec<usize> = Vec::new();
    let mut lower: Vec<usize> = Vec::new();
    for (i, z) in roots.iter().enumerate() {
        if is_real(*z) {
            real.push(i);
        } else if z.im > 0.0 {
            upper.push(i);
        } else {
            lower.push(i);
        }
    }
    // unbalanced halves: the least-imaginary offender is really real
    while upper.len() != lower.len() {
        let side = if upper.len() > lower.len() { &mut upper } else { &mut lower };
        let (pos, _) = side
            .iter()
            .enumerate()
            .min_by(|a, b| roots[*a.1].im.abs().total_cmp(&roots[*b.1].im.abs()))
            .expect("nonempty");
        real.push(side.remove(pos));
    }
    for &i in &real {
        roots[i] = Complex64::new(roots[i].re, 0.0);
    }
    let mut free = lower.clone();
    for &u in &upper {
        let (pos, &l) = free
            .iter()
            .enumerate()
            .min_by(|a, b| (roots[*a.1].conj() - roots[u]).norm().total_cmp(&(roots[*b.1].conj() - roots[u]).norm()))
            .expect("balanced");
        free.remove(pos);
        let mid = (roots[u] + roots[l].conj()) * 0.5;
        roots[u] = mid;
        roots[l] = mid.conj();
    }
}
