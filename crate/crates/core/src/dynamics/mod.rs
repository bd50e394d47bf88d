//! Time evolution of the biorthogonal mean-field state, its projective
//! (Bloch-sphere) representation, trapping diagnostics and the geometric phase.

mod biorth;
mod bloch;
mod geometry;
mod projective;

pub use biorth::{
    integrate_biorthogonal, integrate_biorthogonal_at, integrate_biorthogonal_visit, Trajectory, TrajectoryOptions, TrajectorySample,
    TrajectoryStats,
};
pub use bloch::{asymptotic_circle_z, integrate_bloch_linear, integrate_bloch_nonlinear, BlochOptions, BlochPair, BlochRun};
pub use geometry::{classify_min_z, geometric_phase, trapping_metric, TrappingClass, TrappingReport, TIE_MARGIN};
pub use projective::{project, project_continued, wrap_angle, ProjectiveState, Side};
