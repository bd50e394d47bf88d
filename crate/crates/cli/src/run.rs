//! Executes a validated [`RunConfig`].

use std::time::Instant;

use serde::Serialize;
use serde_json::json;

use lzsm_core::dynamics::{
    integrate_biorthogonal, integrate_bloch_nonlinear, project, trapping_metric, BlochOptions, Side, TrajectoryOptions,
};
use lzsm_core::spectrum::{region_classify, region_function, spectrum_vs_time, TieBreak};
use lzsm_core::sweep::run_sweep;
use lzsm_core::weakcoupling::{integrate_dirac, interference_condition, DiracParams};
use lzsm_core::{BiorthState, ModelParams};

use crate::config::{Command, Format, RunConfig};
use crate::output::{write_label_pgm, write_table, Sink};
use crate::CliError;

/// What a run produced.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: Command,
    pub figure: Option<String>,
    pub files: Vec<std::path::PathBuf>,
    /// Masked or failed sweep cells.
    pub masked_cells: usize,
    pub summary: serde_json::Value,
}

fn samples_of(cfg: &RunConfig) -> (ModelParams, f64, f64, usize) {
    let p = *cfg.model.as_ref().expect("validated");
    let time = cfg.time.expect("validated");
    (p, time.t0, time.end(&p), time.samples)
}

fn initial(cfg: &RunConfig) -> Result<BiorthState, CliError> {
    let t0 = cfg.time.map_or(0.0, |t| t.t0);
    let s = match &cfg.initial {
        Some(init) => init.to_state()?,
        None => BiorthState::lower_level(),
    };
    Ok(s.at(t0))
}

fn wants(cfg: &RunConfig, f: Format) -> bool {
    cfg.output.formats.contains(&f)
}

/// Runs `cfg`, writing its artifacts. Numerical divergence is reported as
/// data; only failed integrations are errors.
pub fn run(cfg: &RunConfig, workers: usize) -> Result<RunReport, CliError> {
    cfg.validate()?;
    let mut sink = Sink::new(&cfg.output.dir, &cfg.stem())?;
    let start = Instant::now();
    let (summary, masked_cells) = match cfg.command {
        Command::Spectrum => (spectrum(cfg, &mut sink)?, 0),
        Command::Region => (region(cfg, &mut sink)?, 0),
        Command::Trajectory => (trajectory(cfg, &mut sink)?, 0),
        Command::Bloch => (bloch(cfg, &mut sink)?, 0),
        Command::Trapping => (trapping(cfg, &mut sink)?, 0),
        Command::Weak => (weak(cfg, &mut sink)?, 0),
        Command::Sweep => sweep(cfg, &mut sink, workers)?,
        Command::Figure => unreachable!("figure configs are resolved before running"),
    };
    let mut summary = summary;
    summary["wall_time_s"] = json!(start.elapsed().as_secs_f64());
    if wants(cfg, Format::Json) && cfg.command != Command::Sweep {
        let doc = json!({ "config": cfg, "summary": summary });
        sink.json(".json", &doc)?;
    }
    Ok(RunReport { command: cfg.command, figure: cfg.figure.clone(), files: sink.written, masked_cells, summary })
}

fn spectrum(cfg: &RunConfig, sink: &mut Sink) -> Result<serde_json::Value, CliError> {
    let (p, t0, t1, n) = samples_of(cfg);
    let tgrid = lzsm_core::ode::uniform_times(t0, t1, n);
    let cs = if cfg.c_values.is_empty() { vec![p.c] } else { cfg.c_values.clone() };
    let mut rows = Vec::new();
    let mut min_abs = Vec::new();
    for &c in &cs {
        let pts = spectrum_vs_time(&p.with_c(c), &tgrid, TieBreak::FirstOptimal)?;
        let mut m = f64::INFINITY;
        for (t, pt) in tgrid.iter().zip(&pts) {
            for b in 0..4 {
                let i = pt.branch_ids.iter().position(|&x| x == b).expect("branch ids are a permutation");
                let z = pt.roots[i];
                if !pt.spurious[i] {
                    m = m.min(z.norm());
                }
                let class = pt.classification as u8 as f64;
                rows.push(vec![c, *t, pt.gamma, b as f64, z.re, z.im, f64::from(u8::from(pt.spurious[i])), class]);
            }
        }
        min_abs.push(json!({ "c": c, "min_abs_root": m }));
    }
    if wants(cfg, Format::Csv) {
        sink.file(".csv", |w| write_table(w, &["c", "t", "gamma", "branch", "re", "im", "spurious", "class"], rows))?;
    }
    Ok(json!({ "points": tgrid.len(), "class_codes": ["ALL_REAL", "TWO_REAL_ONE_CONJ_PAIR", "TWO_CONJ_PAIRS", "DEGENERATE"], "branches": min_abs }))
}

fn region(cfg: &RunConfig, sink: &mut Sink) -> Result<serde_json::Value, CliError> {
    let r = cfg.region.expect("validated");
    let xs = lzsm_core::ode::uniform_times(r.x_min, r.x_max, r.x_count);
    let ys = lzsm_core::ode::uniform_times(r.y_min, r.y_max, r.y_count);
    let labels: Vec<Vec<u8>> = ys.iter().map(|&y| xs.iter().map(|&x| region_classify(x, y).index()).collect()).collect();
    let mut counts = [0usize; 3];
    for v in labels.iter().flatten() {
        counts[usize::from(*v) - 1] += 1;
    }
    if wants(cfg, Format::Csv) {
        sink.file(".csv", |w| {
            write!(w, "gamma_over_delta\\c_over_delta")?;
            for x in &xs {
                write!(w, ",{x}")?;
            }
            writeln!(w)?;
            for (y, row) in ys.iter().zip(&labels) {
                write!(w, "{y}")?;
                for v in row {
                    write!(w, ",{v}")?;
                }
                writeln!(w)?;
            }
            Ok(())
        })?;
        let fvals = ys.iter().flat_map(|&y| xs.iter().map(move |&x| vec![x, y, region_function(x, y)]));
        sink.file("_f.csv", |w| write_table(w, &["c_over_delta", "gamma_over_delta", "f"], fvals))?;
    }
    if wants(cfg, Format::Ppm) {
        sink.file(".pgm", |w| write_label_pgm(w, &labels, 3))?;
    }
    Ok(json!({ "cells": { "I": counts[0], "II": counts[1], "III": counts[2] } }))
}

fn trajectory(cfg: &RunConfig, sink: &mut Sink) -> Result<serde_json::Value, CliError> {
    let (p, t0, t1, n) = samples_of(cfg);
    let opts = TrajectoryOptions { integrator: cfg.integrator, ..TrajectoryOptions::default() }.with_samples(n);
    let traj = integrate_biorthogonal(&p, &initial(cfg)?, t0, t1, &opts)?;
    if wants(cfg, Format::Csv) {
        let rows = traj.samples.iter().map(|s| {
            let st = &s.state;
            let w = s.feedback();
            vec![
                s.t(),
                st.alpha1.re,
                st.alpha1.im,
                st.beta1.re,
                st.beta1.im,
                st.alpha2.re,
                st.alpha2.im,
                st.beta2.re,
                st.beta2.im,
                st.logscale_r,
                st.logscale_l,
                s.right.theta,
                s.right.phi,
                s.right.mu,
                s.right.nu,
                s.left.theta,
                s.left.phi,
                s.right.z(),
                w.re,
                w.im,
            ]
        });
        let header = [
            "t", "re_alpha1", "im_alpha1", "re_beta1", "im_beta1", "re_alpha2", "im_alpha2", "re_beta2", "im_beta2", "logscale_r",
            "logscale_l", "theta_r", "phi_r", "mu_r", "nu_r", "theta_l", "phi_l", "z", "re_w", "im_w",
        ];
        sink.file(".csv", |w| write_table(w, &header, rows))?;
    }
    Ok(json!({
        "samples": traj.samples.len(),
        "steps": traj.stats.steps,
        "rejected": traj.stats.rejected,
        "rescales": traj.stats.rescales,
        "singular_at": traj.singular_at,
        "max_norm_error": traj.max_norm_error(),
        "final_raw_pop_alpha1": traj.final_state.raw_pop_alpha1(),
        "final_proj_pop_alpha": traj.final_state.proj_pop_alpha(),
    }))
}

fn bloch(cfg: &RunConfig, sink: &mut Sink) -> Result<serde_json::Value, CliError> {
    let (p, t0, t1, n) = samples_of(cfg);
    let init = initial(cfg)?;
    let (r0, l0) = (project(&init, Side::Right)?, project(&init, Side::Left)?);
    let opts = BlochOptions { integrator: cfg.integrator, ..BlochOptions::default() }.with_samples(n);
    let run = integrate_bloch_nonlinear(&p, &r0, &l0, t0, t1, &opts)?;
    if wants(cfg, Format::Csv) {
        let rows = run.samples.iter().map(|s| {
            let [x, y, z] = s.right.bloch_vector();
            let (r, l) = (s.right, s.left);
            vec![r.t, r.theta, r.phi, r.mu, r.nu, l.theta, l.phi, l.mu, l.nu, x, y, z]
        });
        let header = ["t", "theta_r", "phi_r", "mu_r", "nu_r", "theta_l", "phi_l", "mu_l", "nu_l", "x", "y", "z"];
        sink.file(".csv", |w| write_table(w, &header, rows))?;
    }
    let min_z = run.samples.iter().map(|s| s.right.z()).fold(f64::INFINITY, f64::min);
    Ok(json!({
        "samples": run.samples.len(),
        "steps": run.stats.accepted,
        "rejected": run.stats.rejected,
        "pole_steps": run.pole_steps,
        "min_z": min_z,
        "asymptotic_circle_z": lzsm_core::dynamics::asymptotic_circle_z(p.nonreciprocity()),
    }))
}

fn trapping(cfg: &RunConfig, sink: &mut Sink) -> Result<serde_json::Value, CliError> {
    let (p, t0, t1, n) = samples_of(cfg);
    let opts = TrajectoryOptions { integrator: cfg.integrator, ..TrajectoryOptions::default() }.with_samples(n);
    let traj = integrate_biorthogonal(&p, &initial(cfg)?, t0, t1, &opts)?;
    let states = traj.right_states();
    let report = trapping_metric(&states, p.nonreciprocity(), (t0, t1), p.period())?;
    if wants(cfg, Format::Csv) {
        let rows = states.iter().map(|s| vec![s.t, s.z(), s.pop_a()]);
        sink.file(".csv", |w| write_table(w, &["t", "z", "pop_a"], rows))?;
    }
    Ok(json!({ "report": report, "singular_at": traj.singular_at }))
}

fn weak(cfg: &RunConfig, sink: &mut Sink) -> Result<serde_json::Value, CliError> {
    let (p, t0, t1, n) = samples_of(cfg);
    let init = initial(cfg)?;
    let opts = TrajectoryOptions { integrator: cfg.integrator, ..TrajectoryOptions::default() }.with_samples(n);
    let exact = integrate_biorthogonal(&p, &init, t0, t1, &opts)?;
    let dirac = integrate_dirac(&DiracParams::new(p)?, &init, t0, t1, n, &cfg.integrator)?;
    let condition = interference_condition(&p);
    let mut sup: f64 = 0.0;
    let mut rows = Vec::with_capacity(n);
    for (e, d) in exact.samples.iter().zip(&dirac.samples) {
        let (pe, pd) = (e.right.pop_a(), d.proj_pop_a());
        sup = sup.max((pe - pd).abs());
        rows.push(vec![e.t(), pe, pd, (d.feedback() - dirac.w0).norm(), (e.feedback() - dirac.w0).norm()]);
    }
    let max_exact = rows.iter().map(|r| r[1]).fold(0.0, f64::max);
    if wants(cfg, Format::Csv) {
        sink.file(".csv", |w| write_table(w, &["t", "exact_pop_a", "dirac_pop_a", "dirac_w_drift", "exact_w_drift"], rows))?;
    }
    Ok(json!({
        "verdict": condition.verdict,
        "nearest_d": condition.nearest_d,
        "residue": condition.residue,
        "max_exact_pop_a": max_exact,
        "sup_difference": sup,
        "w0": [dirac.w0.re, dirac.w0.im],
        "max_w_drift": dirac.max_w_drift,
    }))
}

fn sweep(cfg: &RunConfig, sink: &mut Sink, workers: usize) -> Result<(serde_json::Value, usize), CliError> {
    let spec = cfg.sweep.as_ref().expect("validated");
    let grid = run_sweep(spec, workers)?;
    if wants(cfg, Format::Csv) {
        sink.file(".csv", |w| grid.write_csv(w))?;
    }
    if wants(cfg, Format::Ppm) {
        sink.file(".pgm", |w| grid.write_pgm(w))?;
    }
    let meta = grid.metadata();
    if wants(cfg, Format::Json) {
        sink.json(".json", &json!({ "config": cfg, "metadata": meta }))?;
    }
    let masked = grid.masked_count() + grid.error_count();
    Ok((json!({ "masked_cells": meta.masked_cells, "error_cells": meta.error_cells, "value_min": meta.value_min, "value_max": meta.value_max }), masked))
}
