//! Scenario catalog, configuration and batch runners for vortex experiments
//! built on `cgle-core`.

pub mod catalog;
pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use catalog::{find, list_scenarios};
pub use config::ScenarioConfig;
pub use error::{LabError, Result};
