//! Acceptance criteria, one line per criterion. Run with
//! `cargo test -p lzsm-core --release --test acceptance`.

mod common;

use std::f64::consts::{PI, TAU};
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use lzsm_core::dynamics::{
    geometric_phase, integrate_biorthogonal, integrate_biorthogonal_at, trapping_metric, ProjectiveState, TrajectoryOptions,
    TrappingClass,
};
use lzsm_core::spectrum::{classify_point, quartic_coeffs, solve_quartic, RootClass};
use lzsm_core::sweep::{run_sweep, Axis, AxisParam, Horizon, Observable, SweepSpec};
use lzsm_core::weakcoupling::{integrate_dirac, interference_condition, DiracParams, Verdict};
use lzsm_core::{BiorthState, IntegratorOptions, ModelParams, TunnelingClass};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn raw(d1: f64, d2: f64, c: f64) -> ModelParams {
    ModelParams { delta1: d1, delta2: d2, c, amp: 0.0, omega: 1.0, eps0: 0.0 }
}

fn quartic_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let d1 = rng.gen_range(0.1..3.0);
        let d2 = rng.gen_range(0.1..3.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let p = raw(d1, d2, rng.gen_range(-5.0..5.0));
        let q = quartic_coeffs(&p, rng.gen_range(-10.0..10.0));
        let ours = solve_quartic(&q).map_err(|e| e.to_string())?;
        worst = worst.max(common::paired_max_error(&ours, &common::companion_roots(&q)));
    }
    let secs = start.elapsed().as_secs_f64();
    check(worst < 1e-9 && secs < 10.0, format!("max paired error {worst:.1e} over 10^4 draws in {secs:.2} s"))
}

fn linear_spectrum() -> Outcome {
    let mut rng = StdRng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let d1 = rng.gen_range(0.1..3.0);
        let d2 = rng.gen_range(0.1..3.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let g = rng.gen_range(-10.0..10.0);
        let mut r = solve_quartic(&quartic_coeffs(&raw(d1, d2, 0.0), g)).map_err(|e| e.to_string())?.to_vec();
        r.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
        let e = Complex64::from(g * g + d1 * d2).sqrt() * 0.5;
        let pair = (r[2] - e).norm().max((r[3] + e).norm()).min((r[2] + e).norm().max((r[3] - e).norm()));
        worst = worst.max(pair);
    }
    // EP of the anti-phase linear spectrum: γ² = −Δ₁Δ₂
    let ep = classify_point(&raw(2.0, -0.5, 0.0), 1.0).map_err(|e| e.to_string())?;
    let coalesced = ep.roots.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let off = classify_point(&raw(2.0, -0.5, 0.0), 1.01).map_err(|e| e.to_string())?;
    let split = off.physical_roots().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    check(
        worst < 1e-12 && coalesced < 1e-12 && ep.classification == RootClass::Degenerate && split > 1e-3,
        format!("max error {worst:.1e} over 10^3 draws; EP roots within {coalesced:.1e} of 0, split {split:.2e} off the EP"),
    )
}

fn zero_root_law() -> Outcome {
    let mut mismatches = 0;
    let mut cells = 0;
    for i in 0..=40 {
        let c = -5.0 + 0.25 * i as f64;
        for j in 0..=32 {
            let d = -4.0 + 0.25 * j as f64;
            for g in [0.5, 2.0, 7.0] {
                let r = solve_quartic(&quartic_coeffs(&raw(1.0, d, c), g)).map_err(|e| e.to_string())?;
                let has_zero = r.iter().any(|z| z.norm() < 1e-10);
                if has_zero != ((c * d).abs() < 1e-10) {
                    mismatches += 1;
                }
                cells += 1;
            }
        }
    }
    check(mismatches == 0, format!("{mismatches} violations over {cells} points"))
}

fn ep_removal() -> Outcome {
    let min_root = |c: f64| -> Result<f64, String> {
        let p = ModelParams::new(1.0, -1.0, c, 10.0, 1.0, 0.0).map_err(|e| e.to_string())?;
        let mut m = f64::INFINITY;
        for i in 0..=20_000 {
            let t = TAU * i as f64 / 20_000.0;
            let pt = classify_point(&p, lzsm_core::drive_gamma(t, &p)).map_err(|e| e.to_string())?;
            m = m.min(pt.physical_roots().map(|z| z.norm()).fold(f64::INFINITY, f64::min));
        }
        Ok(m)
    };
    let (nonlinear, linear) = (min_root(3.0)?, min_root(0.0)?);
    check(nonlinear > 1e-6, format!("min |E| = {nonlinear:.3e} at c = 3 (c = 0 reaches {linear:.1e})"))
}

fn norm_conservation() -> Outcome {
    let mut rng = StdRng::seed_from_u64(5);
    let opts = TrajectoryOptions::default().with_samples(101).stopping_at_singular();
    let mut lines = Vec::new();
    let mut ok = true;
    for (label, class, c) in [
        ("a", TunnelingClass::InPhase, 0.0),
        ("b", TunnelingClass::InPhase, 1.05),
        ("c", TunnelingClass::AntiPhase, 0.0),
        ("d", TunnelingClass::AntiPhase, 1.05),
    ] {
        let (mut worst, mut masked): (f64, usize) = (0.0, 0);
        for _ in 0..100 {
            let eps0 = rng.gen_range(-6.0..6.0);
            let omega = rng.gen_range(0.2..3.0);
            let p = ModelParams::from_mean(1.0, 2.0, class, c, 2.5, omega, eps0).map_err(|e| e.to_string())?;
            let traj = integrate_biorthogonal(&p, &BiorthState::lower_level(), 0.0, 50.0, &opts).map_err(|e| e.to_string())?;
            if traj.is_singular() {
                masked += 1;
                continue;
            }
            worst = worst.max(traj.max_norm_error());
        }
        ok &= worst < 1e-8;
        lines.push(format!("({label}) {worst:.1e} [{masked} masked]"));
    }
    check(ok, format!("max |<l|r> - 1|: {}", lines.join(", ")))
}

fn similarity() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for k in [2.0, 0.5] {
        for c in [0.0, 1.0] {
            let p = ModelParams::from_mean(1.0, k, TunnelingClass::InPhase, c, 2.5, 1.0, 0.5).map_err(|e| e.to_string())?;
            let reference = common::hermitian_nonlinear(&p, [Complex64::new(0.0, 0.0), Complex64::new(k, 0.0)], 20.0, 1e-3, 50);
            let times: Vec<f64> = reference.iter().map(|(t, _)| *t).collect();
            let traj = integrate_biorthogonal_at(&p, &BiorthState::lower_level(), 0.0, 20.0, &times, &TrajectoryOptions::default())
                .map_err(|e| e.to_string())?;
            for (s, (_, v)) in traj.samples.iter().zip(&reference) {
                let f = s.state.logscale_r.exp();
                let mapped = [s.state.alpha1 * f, s.state.beta1 * f * k];
                worst = worst.max((mapped[0] - v[0]).norm().max((mapped[1] - v[1]).norm()));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(worst < 1e-6 && secs < 30.0, format!("max |S psi_r - psi_h| = {worst:.1e} in {secs:.2} s"))
}

fn k_theta_law() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for (k, target) in [(2.0, -0.6), (0.5, 0.6)] {
        let p = ModelParams::from_mean(1.0, k, TunnelingClass::AntiPhase, 0.0, 2.5, 1.0, 0.0).map_err(|e| e.to_string())?;
        let traj = integrate_biorthogonal(&p, &BiorthState::lower_level(), 0.0, 200.0, &TrajectoryOptions::default().with_samples(4001))
            .map_err(|e| e.to_string())?;
        let tail: Vec<f64> = traj.samples.iter().filter(|s| s.t() >= 160.0).map(|s| s.right.z()).collect();
        let mean = tail.iter().sum::<f64>() / tail.len() as f64;
        ok &= (mean - target).abs() < 0.02;
        parts.push(format!("k={k}: mean z {mean:+.5} (target {target:+})"));
    }
    check(ok, parts.join(", "))
}

const TRAP_PERIODS: f64 = 10.0;

fn classify(class: TunnelingClass, k: f64, delta: f64, c: f64) -> Result<TrappingClass, String> {
    let p = ModelParams::from_mean(delta, k, class, c, 0.05, 1.0, 0.0).map_err(|e| e.to_string())?;
    let t1 = TRAP_PERIODS * p.period();
    let opts = TrajectoryOptions::default().with_samples((TRAP_PERIODS * 200.0) as usize + 1);
    let traj = integrate_biorthogonal(&p, &BiorthState::lower_level(), 0.0, t1, &opts).map_err(|e| e.to_string())?;
    trapping_metric(&traj.right_states(), k, (0.0, t1), p.period()).map(|r| r.classification).map_err(|e| e.to_string())
}

fn trapping_boundary() -> Outcome {
    let start = Instant::now();
    let mut parts = Vec::new();
    let mut ok = true;
    for delta in [0.2, 0.4] {
        let cs: Vec<f64> = (0..=20).map(|i| 1.5 + 0.05 * i as f64).collect();
        let classes = cs.iter().map(|&c| classify(TunnelingClass::InPhase, 2.0, delta, c * delta)).collect::<Result<Vec<_>, _>>()?;
        // first upward Josephson → self-trapped switch; later isolated dips are reported
        let switch = classes.windows(2).position(|w| w[0] == TrappingClass::Josephson && w[1] == TrappingClass::SelfTrapped);
        let transition = switch.map_or(f64::NAN, |i| 0.5 * (cs[i] + cs[i + 1]));
        let reentrant: Vec<String> = switch
            .map(|i| (i + 1..cs.len()).filter(|&j| classes[j] != TrappingClass::SelfTrapped).map(|j| format!("{:.2}", cs[j])).collect())
            .unwrap_or_default();
        let starts_josephson = classes[0] == TrappingClass::Josephson;
        ok &= starts_josephson && (transition - 2.0).abs() <= 0.1;
        let note = if reentrant.is_empty() { String::new() } else { format!(" (re-entrant at {})", reentrant.join(", ")) };
        parts.push(format!("Δ/ω={delta}: transition at c/Δ ≈ {transition:.3}{note}"));
    }
    let secs = start.elapsed().as_secs_f64();
    ok &= secs < 120.0;
    check(ok, format!("{} in {secs:.2} s", parts.join(", ")))
}

fn anti_phase_trapping() -> Outcome {
    let mut bad = Vec::new();
    for delta in [0.2, 0.4] {
        for c in [0.1, 0.5, 1.0] {
            let cls = classify(TunnelingClass::AntiPhase, 2.0, delta, c * delta)?;
            if cls != TrappingClass::SelfTrapped {
                bad.push(format!("Δ/ω={delta} c/Δ={c}: {cls:?}"));
            }
        }
    }
    check(bad.is_empty(), if bad.is_empty() { "all six cases self-trapped".into() } else { bad.join(", ") })
}

fn weak_coupling() -> Outcome {
    let mut maxima = Vec::new();
    let mut sup: f64 = 0.0;
    for c in [0.0, 0.5, 1.0] {
        let p = ModelParams::from_mean(0.05, 2.0, TunnelingClass::InPhase, c, 10.5, 1.0, 3.0).map_err(|e| e.to_string())?;
        let t1 = 10.0 * p.period();
        let n = 4001;
        let init = BiorthState::lower_level();
        let exact = integrate_biorthogonal(&p, &init, 0.0, t1, &TrajectoryOptions::default().with_samples(n)).map_err(|e| e.to_string())?;
        let dp = DiracParams::new(p).map_err(|e| e.to_string())?;
        let dirac = integrate_dirac(&dp, &init, 0.0, t1, n, &IntegratorOptions::default()).map_err(|e| e.to_string())?;
        maxima.push(exact.samples.iter().map(|s| s.right.pop_a()).fold(0.0, f64::max));
        for (a, b) in exact.samples.iter().zip(&dirac.samples) {
            sup = sup.max((a.right.pop_a() - b.proj_pop_a()).abs());
        }
    }
    let ok = maxima[0] >= 10.0 * maxima[1] && maxima[2] >= 10.0 * maxima[1] && sup < 0.05;
    check(
        ok,
        format!("max |ã|²: c=0 {:.3e}, c=0.5 {:.3e}, c=1 {:.3e}; Dirac sup diff {sup:.3e}", maxima[0], maxima[1], maxima[2]),
    )
}

fn verdict_neutrality() -> Outcome {
    let (mut differing, mut constructive, mut destructive) = (0, 0, 0);
    for i in 0..10 {
        for j in 0..10 {
            let (eps, c) = (0.5 * i as f64, 0.1 * j as f64);
            let verdicts = [0.5, 1.0, 2.0]
                .map(|k| ModelParams::from_mean(0.05, k, TunnelingClass::InPhase, c, 10.5, 1.0, eps).map(|p| interference_condition(&p).verdict));
            let v0 = verdicts[0].clone().map_err(|e| e.to_string())?;
            if verdicts.iter().any(|v| v.as_ref().ok() != Some(&v0)) {
                differing += 1;
            }
            constructive += usize::from(v0 == Verdict::Constructive);
            destructive += usize::from(v0 == Verdict::Destructive);
        }
    }
    check(
        differing == 0 && constructive > 0 && destructive > 0,
        format!("{differing} of 100 cells differ ({constructive} constructive, {destructive} destructive)"),
    )
}

fn geometric_phase_loops() -> Outcome {
    let mut worst: f64 = 0.0;
    for theta in [PI / 6.0, PI / 2.0, 5.0 * PI / 6.0] {
        let n = 2000;
        let traj: Vec<ProjectiveState> = (0..=n)
            .map(|i| {
                let phi = lzsm_core::dynamics::wrap_angle(TAU * i as f64 / n as f64);
                ProjectiveState { theta, phi, mu: 0.0, nu: 0.0, t: i as f64 }
            })
            .collect();
        let gp = geometric_phase(&traj).map_err(|e| e.to_string())?;
        worst = worst.max((gp - PI * (1.0 - theta.cos())).abs());
    }
    check(worst < 1e-3, format!("max deviation {worst:.1e}"))
}

fn pattern(n: usize, class: TunnelingClass, c: f64) -> Result<SweepSpec, String> {
    Ok(SweepSpec::new(
        Axis::new(AxisParam::Eps0OverDelta, -6.0, 6.0, n),
        Axis::new(AxisParam::OmegaOverDelta, 0.2, 3.0, n),
        ModelParams::from_mean(1.0, 2.0, class, c, 2.5, 1.0, 0.0).map_err(|e| e.to_string())?,
        Observable::RawPopA1,
        Horizon::InverseDelta(50.0),
    ))
}

fn axisymmetry() -> Outcome {
    let grid = run_sweep(&pattern(41, TunnelingClass::InPhase, 0.0)?, workers()).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for iy in 0..41 {
        for ix in 0..41 {
            if !grid.is_masked(iy, ix) && !grid.is_masked(iy, 40 - ix) {
                worst = worst.max((grid.values[iy][ix] - grid.values[iy][40 - ix]).abs());
            }
        }
    }
    check(worst < 1e-6, format!("max |P(ε₀) - P(-ε₀)| = {worst:.3e}"))
}

fn workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn determinism_and_throughput() -> Outcome {
    let spec = pattern(21, TunnelingClass::AntiPhase, 1.05)?;
    let grids = [1, 4, 8].map(|w| run_sweep(&spec, w));
    let first = grids[0].as_ref().map_err(|e| e.to_string())?;
    let identical = grids.iter().all(|g| {
        g.as_ref().is_ok_and(|g| {
            g.singular_mask == first.singular_mask
                && g.values.iter().flatten().zip(first.values.iter().flatten()).all(|(a, b)| a.to_bits() == b.to_bits())
        })
    });
    let big = run_sweep(&pattern(201, TunnelingClass::AntiPhase, 1.05)?, workers()).map_err(|e| e.to_string())?;
    check(
        identical && big.wall_time_s < 300.0,
        format!(
            "workers 1/4/8 {}; 201x201 in {:.1} s on {} worker(s)",
            if identical { "bitwise identical" } else { "DIFFER" },
            big.wall_time_s,
            big.workers
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 14] = [
        ("quartic oracle equivalence", quartic_oracle),
        ("linear spectrum", linear_spectrum),
        ("zero-root law", zero_root_law),
        ("EP removal by nonlinearity", ep_removal),
        ("biorthogonal norm conservation", norm_conservation),
        ("similarity equivalence", similarity),
        ("k-theta0 law", k_theta_law),
        ("self-trapping boundary", trapping_boundary),
        ("anti-phase universal trapping", anti_phase_trapping),
        ("weak-coupling interference", weak_coupling),
        ("verdict nonreciprocity neutrality", verdict_neutrality),
        ("geometric phase", geometric_phase_loops),
        ("axisymmetry", axisymmetry),
        ("sweep determinism and throughput", determinism_and_throughput),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (tag, detail) = match run() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} {:>2} {name}: {detail}", i + 1);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
