//! Shared workloads for the criterion benchmarks.

use lzsm_core::sweep::{Axis, AxisParam, Horizon, Observable, SweepSpec};
use lzsm_core::{ModelParams, TunnelingClass};

/// Interference-grid parameters: `k = 2`, `A/Δ = 2.5`, `Δ = 1`.
pub fn interference_params(class: TunnelingClass, c: f64) -> ModelParams {
    ModelParams::from_mean(1.0, 2.0, class, c, 2.5, 1.0, 0.0).expect("valid parameters")
}

/// An `n × n` raw-population grid over `(ε₀/Δ, ω/Δ)` with horizon `50/Δ`.
pub fn interference_sweep(n: usize, class: TunnelingClass, c: f64) -> SweepSpec {
    SweepSpec::new(
        Axis::new(AxisParam::Eps0OverDelta, -6.0, 6.0, n),
        Axis::new(AxisParam::OmegaOverDelta, 0.2, 3.0, n),
        interference_params(class, c),
        Observable::RawPopA1,
        Horizon::InverseDelta(50.0),
    )
}
