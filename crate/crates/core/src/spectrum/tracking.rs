//! Branch-consistent spectra along a time grid.

use num_complex::Complex64;

use super::{classify_point, SpectrumPoint};
use crate::error::{Error, Result};
use crate::model::{drive_gamma, ModelParams};

/// What to do when two distinct pairings cost the same.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    /// Report `BranchAmbiguity`; the caller may refine the grid.
    #[default]
    Strict,
    /// Take the first optimal pairing in enumeration order. Crossing an
    /// exceptional point between two grid times always ties.
    FirstOptimal,
}

const TIE_TOL: f64 = 1e-12;

fn permutations() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    let mut seen = [false; 4];
                    if p.iter().all(|&i| !std::mem::replace(&mut seen[i], true)) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

fn cost(prev: &[Complex64; 4], next: &[Complex64; 4], perm: &[usize; 4]) -> f64 {
    (0..4).map(|b| (next[perm[b]] - prev[b]).norm_sqr()).sum()
}

/// Greedy nearest-neighbour pairing, branch by branch.
fn greedy(prev: &[Complex64; 4], next: &[Complex64; 4]) -> [usize; 4] {
    let mut used = [false; 4];
    let mut perm = [0; 4];
    for b in 0..4 {
        let mut best = usize::MAX;
        for (i, z) in next.iter().enumerate() {
            if !used[i] && (best == usize::MAX || (z - prev[b]).norm_sqr() < (next[best] - prev[b]).norm_sqr()) {
                best = i;
            }
        }
        used[best] = true;
        perm[b] = best;
    }
    perm
}

/// Returns `perm` with `perm[branch] = index into next`, or `None` when two
/// pairings that assign different values tie.
fn match_roots(prev: &[Complex64; 4], next: &[Complex64; 4], perms: &[[usize; 4]]) -> (Option<[usize; 4]>, [usize; 4]) {
    let g = greedy(prev, next);
    let g_cost = cost(prev, next, &g);
    let best_cost = perms.iter().map(|p| cost(prev, next, p)).fold(f64::INFINITY, f64::min);
    let chosen = if g_cost <= best_cost {
        g
    } else {
        *perms.iter().find(|p| cost(prev, next, p) <= best_cost).expect("minimum exists")
    };
    let distinct_tie = perms.iter().any(|p| {
        cost(prev, next, p) - best_cost <= TIE_TOL && (0..4).any(|b| (next[p[b]] - next[chosen[b]]).norm() > TIE_TOL)
    });
    (if distinct_tie { None } else { Some(chosen) }, chosen)
}

/// Spectrum at each time of `tgrid` with branch labels carried over by
/// minimum-cost matching to the previous time.
pub fn spectrum_vs_time(p: &ModelParams, tgrid: &[f64], tie: TieBreak) -> Result<Vec<SpectrumPoint>> {
    if tgrid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid("tgrid", "times must be strictly increasing"));
    }
    let perms = permutations();
    let mut out: Vec<SpectrumPoint> = Vec::with_capacity(tgrid.len());
    // roots of the previous time indexed by branch
    let mut by_branch = [Complex64::new(0.0, 0.0); 4];
    for (idx, &t) in tgrid.iter().enumerate() {
        let mut pt = classify_point(p, drive_gamma(t, p))?;
        if idx == 0 {
            pt.branch_ids = [0, 1, 2, 3];
        } else {
            let (strict, fallback) = match_roots(&by_branch, &pt.roots, &perms);
            let perm = match (strict, tie) {
                (Some(perm), _) => perm,
                (None, TieBreak::FirstOptimal) => fallback,
                (None, TieBreak::Strict) => return Err(Error::BranchAmbiguity { index: idx }),
            };
            for (branch, &i) in perm.iter().enumerate() {
                pt.branch_ids[i] = branch;
            }
        }
        for i in 0..4 {
            by_branch[pt.branch_ids[i]] = pt.roots[i];
        }
        out.push(pt);
    }
    Ok(out)
}
