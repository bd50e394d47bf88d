//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{Complex, Matrix2, Matrix4};
use num_complex::Complex64;

use lzsm_core::spectrum::QuarticCoeffs;
use lzsm_core::{drive_gamma, ModelParams};

/// Eigenvalues of the companion matrix of a monic quartic.
pub fn companion_roots(q: &QuarticCoeffs) -> [Complex64; 4] {
    let m = Matrix4::new(
        -q.e3, -q.e2, -q.e1, -q.e0, //
        1.0, 0.0, 0.0, 0.0, //
        0.0, 1.0, 0.0, 0.0, //
        0.0, 0.0, 1.0, 0.0,
    );
    let ev = m.complex_eigenvalues();
    [0, 1, 2, 3].map(|i| Complex64::new(ev[i].re, ev[i].im))
}

/// Smallest achievable max distance over all pairings of two root sets.
pub fn paired_max_error(a: &[Complex64; 4], b: &[Complex64; 4]) -> f64 {
    let mut best = f64::INFINITY;
    let mut idx = [0usize, 1, 2, 3];
    permute(&mut idx, 0, &mut |perm| {
        let e = (0..4).map(|i| (a[i] - b[perm[i]]).norm()).fold(0.0, f64::max);
        best = best.min(e);
    });
    best
}

fn permute(v: &mut [usize; 4], k: usize, f: &mut impl FnMut(&[usize; 4])) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, f);
        v.swap(k, i);
    }
}

fn to_na(z: Complex64) -> Complex<f64> {
    Complex::new(z.re, z.im)
}

fn from_na(z: Complex<f64>) -> Complex64 {
    Complex64::new(z.re, z.im)
}

/// Linear Hamiltonian at drive value `gamma`.
pub fn linear_h(p: &ModelParams, gamma: f64) -> Matrix2<Complex<f64>> {
    Matrix2::new(
        Complex::new(0.5 * gamma, 0.0),
        Complex::new(0.5 * p.delta1, 0.0),
        Complex::new(0.5 * p.delta2, 0.0),
        Complex::new(-0.5 * gamma, 0.0),
    )
}

/// `exp(−iHt)` by nalgebra's Padé matrix exponential.
pub fn propagator(h: &Matrix2<Complex<f64>>, t: f64) -> Matrix2<Complex<f64>> {
    (h * Complex::new(0.0, -t)).exp()
}

pub fn apply(u: &Matrix2<Complex<f64>>, v: [Complex64; 2]) -> [Complex64; 2] {
    let r = u * nalgebra::Vector2::new(to_na(v[0]), to_na(v[1]));
    [from_na(r[0]), from_na(r[1])]
}

/// Right and left amplitudes of the linear model at `t` by a product of
/// piecewise-constant propagators (drive frozen at each step midpoint).
pub fn piecewise_linear(p: &ModelParams, right: [Complex64; 2], left: [Complex64; 2], t: f64, h: f64) -> [[Complex64; 2]; 2] {
    let n = (t / h).ceil() as usize;
    let dt = t / n as f64;
    let mut ur = Matrix2::identity();
    let mut ul = Matrix2::identity();
    for i in 0..n {
        let hm = linear_h(p, drive_gamma((i as f64 + 0.5) * dt, p));
        ur = propagator(&hm, dt) * ur;
        ul = propagator(&hm.adjoint(), dt) * ul;
    }
    [apply(&ur, right), apply(&ul, left)]
}

/// The Hermitian nonlinear model with off-diagonal `Δ/2` and diagonal
/// `±(γ + c·z)/2`, `z = |b|² − |a|²` of the normalised state, integrated by
/// fixed-step classical RK4.
pub fn hermitian_nonlinear(p: &ModelParams, init: [Complex64; 2], t1: f64, h: f64, sample_every: usize) -> Vec<(f64, [Complex64; 2])> {
    let delta = p.mean_amplitude();
    let rhs = |t: f64, v: [Complex64; 2]| -> [Complex64; 2] {
        let n = v[0].norm_sqr() + v[1].norm_sqr();
        let z = (v[1].norm_sqr() - v[0].norm_sqr()) / n;
        let d = 0.5 * (drive_gamma(t, p) + p.c * z);
        let mi = Complex64::new(0.0, -1.0);
        [mi * (v[0] * d + v[1] * (0.5 * delta)), mi * (v[0] * (0.5 * delta) - v[1] * d)]
    };
    let n = (t1 / h).round() as usize;
    let dt = t1 / n as f64;
    let mut v = init;
    let mut out = vec![(0.0, v)];
    let add = |a: [Complex64; 2], b: [Complex64; 2], s: f64| [a[0] + b[0] * s, a[1] + b[1] * s];
    for i in 0..n {
        let t = i as f64 * dt;
        let k1 = rhs(t, v);
        let k2 = rhs(t + 0.5 * dt, add(v, k1, 0.5 * dt));
        let k3 = rhs(t + 0.5 * dt, add(v, k2, 0.5 * dt));
        let k4 = rhs(t + dt, add(v, k3, dt));
        for j in 0..2 {
            v[j] += (k1[j] + k2[j] * 2.0 + k3[j] * 2.0 + k4[j]) * (dt / 6.0);
        }
        if (i + 1) % sample_every == 0 {
            out.push(((i + 1) as f64 * dt, v));
        }
    }
    out
}
