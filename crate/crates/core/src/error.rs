use thiserror::Error;

use crate::grid::Point;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("theta is undefined at the origin")]
    ThetaAtOrigin,

    #[error("radial profile did not converge after {iterations} iterations (residual {residual:e})")]
    ProfileNotConverged { iterations: usize, residual: f64 },

    #[error("incompatible Neumann data: boundary integral {integral:e} exceeds tolerance {tolerance:e}")]
    IncompatibleFlux { integral: f64, tolerance: f64 },

    #[error("boundary trace is not single-valued (closing jump {jump:e})")]
    MultiValuedTrace { jump: f64 },

    #[error("linear solve failed: {0}")]
    SolverBreakdown(String),

    #[error("point ({}, {}) is closer than {min_distance:e} to the boundary", .point.x, .point.y)]
    TooCloseToBoundary { point: Point, min_distance: f64 },

    #[error("vortices {i} and {j} are coincident")]
    CoincidentVortices { i: usize, j: usize },

    #[error("non-finite value in field at step {step}")]
    NonFinite { step: u64 },

    #[error("cell ({i}, {j}) carries winding {winding}; merger in progress")]
    MultiCharge { i: usize, j: usize, winding: i32 },

    #[error("step size underflow at t = {t} (h = {h:e}); state {state:?}")]
    StepUnderflow { t: f64, h: f64, state: Vec<f64> },

    #[error("trajectories have no overlapping time window")]
    EmptyOverlap,
}
