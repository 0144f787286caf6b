//! Time-splitting solvers for the complex Ginzburg-Landau equation on
//! rectangles, reduced dynamical laws for vortex centers, and vortex
//! tracking.

pub mod error;
mod exec;
pub mod field;
pub mod grid;
pub mod harmonic;
pub mod initial;
pub mod ode;
pub mod quad;
pub mod rdl;
pub mod solver;
pub mod tracking;
pub mod transform;

pub use error::{Error, Result};
pub use field::{field_distance, gl_energy, ComplexField, Energies};
pub use grid::{BcKind, Grid2D, Point};
