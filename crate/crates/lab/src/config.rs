//! Scenario configuration and its TOML form.

use std::path::Path;

use cgle_core::initial::{PhaseMode, VortexSpec};
use cgle_core::solver::{SolverParams, SteadyState};
use cgle_core::{BcKind, Grid2D};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Desk-scale mesh: `h = epsilon / 8`.
pub const DESK_MESH_RATIO: f64 = 8.0;
pub const DESK_TAU: f64 = 1e-5;
pub const REFERENCE_MESH_RATIO: f64 = 10.0;
pub const REFERENCE_TAU: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Domain {
    /// `[-1, 1] x [-1, 1]`
    #[serde(rename = "I")]
    TypeI,
    /// `[-1, 1] x [-0.65, 0.65]`
    #[serde(rename = "II")]
    TypeII,
}

impl Domain {
    pub fn bounds(self) -> (f64, f64, f64, f64) {
        match self {
            Domain::TypeI => (-1.0, 1.0, -1.0, 1.0),
            Domain::TypeII => (-1.0, 1.0, -0.65, 0.65),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bc {
    Dirichlet,
    Neumann,
}

impl From<Bc> for BcKind {
    fn from(b: Bc) -> Self {
        match b {
            Bc::Dirichlet => BcKind::Dirichlet,
            Bc::Neumann => BcKind::Neumann,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Phase {
    Mode0,
    Mode1,
    Mode2,
    Mode3,
    Mode4,
    Mode5,
    NeumannCompatible,
}

impl From<Phase> for PhaseMode {
    fn from(p: Phase) -> Self {
        match p {
            Phase::Mode0 => PhaseMode::Mode0,
            Phase::Mode1 => PhaseMode::Mode1,
            Phase::Mode2 => PhaseMode::Mode2,
            Phase::Mode3 => PhaseMode::Mode3,
            Phase::Mode4 => PhaseMode::Mode4,
            Phase::Mode5 => PhaseMode::Mode5,
            Phase::NeumannCompatible => PhaseMode::NeumannCompatible,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Vortex {
    pub x: f64,
    pub y: f64,
    pub n: i8,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Steady {
    pub window: f64,
    pub threshold: f64,
}

impl Default for Steady {
    fn default() -> Self {
        let s = SteadyState::default();
        Self {
            window: s.window,
            threshold: s.threshold,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub domain: Domain,
    pub bc: Bc,
    pub phase: Phase,
    pub epsilon: f64,
    pub alpha: f64,
    pub beta: f64,
    pub tau: f64,
    pub t_end: f64,
    /// Mesh spacing is `epsilon / mesh_ratio`.
    pub mesh_ratio: f64,
    /// Steps between observations.
    pub cadence: u64,
    /// Observations between `|psi|` snapshots; 0 keeps only the first and last.
    #[serde(default)]
    pub snapshot_every: u64,
    /// Intervals per side of the auxiliary grid used by the reduced model.
    pub rdl_aux: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steady: Option<Steady>,
    #[serde(default, rename = "vortex")]
    pub vortices: Vec<Vortex>,
}

impl ScenarioConfig {
    /// Desk-scale config with `alpha = beta = 1` and no vortices.
    pub fn new(name: &str, domain: Domain, bc: Bc, phase: Phase) -> Self {
        Self {
            name: name.to_string(),
            domain,
            bc,
            phase,
            epsilon: 1.0 / 16.0,
            alpha: 1.0,
            beta: 1.0,
            tau: DESK_TAU,
            t_end: 1.0,
            mesh_ratio: DESK_MESH_RATIO,
            cadence: 200,
            snapshot_every: 0,
            rdl_aux: 256,
            out_dir: None,
            note: None,
            steady: Some(Steady::default()),
            vortices: Vec::new(),
        }
    }

    pub fn with_vortices(mut self, v: &[(f64, f64, i8)]) -> Self {
        self.vortices = v.iter().map(|&(x, y, n)| Vortex { x, y, n }).collect();
        self
    }

    pub fn with_note(mut self, note: &str) -> Self {
        self.note = Some(note.to_string());
        self
    }

    /// Production resolution: `h = epsilon / 10`, `tau = 1e-6`.
    pub fn reference_scale(mut self) -> Self {
        self.mesh_ratio = REFERENCE_MESH_RATIO;
        self.tau = REFERENCE_TAU;
        self
    }

    pub fn grid(&self) -> Result<Grid2D> {
        let (a, b, c, d) = self.domain.bounds();
        Ok(Grid2D::with_max_spacing(a, b, c, d, self.epsilon / self.mesh_ratio)?)
    }

    pub fn aux_grid(&self) -> Result<Grid2D> {
        let (a, b, c, d) = self.domain.bounds();
        Ok(Grid2D::new(a, b, c, d, self.rdl_aux, self.rdl_aux)?)
    }

    pub fn specs(&self) -> Vec<VortexSpec> {
        self.vortices.iter().map(|v| VortexSpec::new(v.x, v.y, v.n)).collect()
    }

    pub fn solver_params(&self) -> Result<SolverParams> {
        Ok(SolverParams::new(
            self.epsilon,
            self.alpha,
            self.beta,
            self.tau,
            self.t_end,
            self.bc.into(),
        )?)
    }

    pub fn steady_state(&self) -> Option<SteadyState> {
        self.steady.map(|s| SteadyState {
            window: s.window,
            threshold: s.threshold,
        })
    }

    /// Checks everything a run needs before any work starts.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(LabError::Config(format!("{}: {m}", self.name)));
        if self.name.trim().is_empty() {
            return Err(LabError::Config("scenario name is empty".into()));
        }
        if !(self.mesh_ratio.is_finite() && self.mesh_ratio > 0.0) {
            return bad(format!("mesh_ratio {} must be positive", self.mesh_ratio));
        }
        if self.cadence == 0 {
            return bad("cadence must be at least 1".into());
        }
        if self.rdl_aux < 8 || self.rdl_aux % 2 != 0 {
            return bad(format!("rdl_aux {} must be even and at least 8", self.rdl_aux));
        }
        let mode: PhaseMode = self.phase.into();
        if BcKind::from(self.bc) != mode.bc_kind() {
            return bad(format!("phase {:?} does not fit {:?} boundary data", self.phase, self.bc));
        }
        if let Some(s) = self.steady {
            if !(s.window > 0.0 && s.threshold > 0.0) {
                return bad("steady window and threshold must be positive".into());
            }
        }
        self.solver_params()
            .map_err(|e| LabError::Config(format!("{}: {e}", self.name)))?;
        let grid = self.grid()?;
        let specs = self.specs();
        for (k, s) in specs.iter().enumerate() {
            s.validate(&grid)
                .map_err(|e| LabError::Config(format!("{}: vortex {k}: {e}", self.name)))?;
            if let Some(j) = specs[..k].iter().position(|o| o.center == s.center) {
                return bad(format!("vortices {j} and {k} coincide"));
            }
        }
        Ok(())
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| LabError::Config(e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }
}
