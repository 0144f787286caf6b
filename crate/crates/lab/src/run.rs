//! Batch runners. Each run owns its output directory.

use std::path::{Path, PathBuf};

use cgle_core::initial::{
    compose_initial_data, dirichlet_boundary_values, BoundaryPhase, RadialProfile,
};
use cgle_core::rdl::{RdlBoundary, RdlModel, RdlOptions, RdlState, RdlTrajectory, StopKind};
use cgle_core::solver::{evolve, EvolveOptions, Frame, Sample, StopReason};
use cgle_core::tracking::{
    center_discrepancy, detect_vortices, track, DetectedVortex, Lifecycle, TrackerConfig,
    TrajectorySet,
};
use cgle_core::BcKind;
use serde::{Deserialize, Serialize};

use crate::config::{Bc, ScenarioConfig};
use crate::error::{LabError, Result};
use crate::output::{self, TrajectoryRow};

pub const CONFIG_FILE: &str = "run.toml";
pub const TRAJECTORY_FILE: &str = "trajectories.csv";
pub const ENERGY_FILE: &str = "energies.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const STOP_FILE: &str = "stop.json";
pub const DISCREPANCY_FILE: &str = "discrepancy.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Event {
    Annihilation { id: usize, partner: usize, t: f64 },
    Exit { id: usize, t: f64 },
    Lost { id: usize, t: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Survivor {
    pub id: usize,
    pub winding: i8,
    pub x: f64,
    pub y: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CgleSummary {
    pub scenario: String,
    pub stop: String,
    pub steps: u64,
    pub t_final: f64,
    pub events: Vec<Event>,
    pub survivors: Vec<Survivor>,
}

pub struct CgleRun {
    pub dir: PathBuf,
    pub tracks: TrajectorySet,
    pub samples: Vec<Sample>,
    pub stop: StopReason,
    pub summary: CgleSummary,
}

fn prepare_dir(cfg: &ScenarioConfig, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(LabError::io(dir, None))?;
    let path = dir.join(CONFIG_FILE);
    std::fs::write(&path, cfg.to_toml()?).map_err(LabError::io(&path, None))
}

/// Evolves the scenario, tracks its vortices and writes every artifact.
pub fn run_cgle(cfg: &ScenarioConfig, dir: &Path) -> Result<CgleRun> {
    cfg.validate()?;
    prepare_dir(cfg, dir)?;
    let grid = cfg.grid()?;
    let specs = cfg.specs();
    let params = cfg.solver_params()?;
    let psi0 = compose_initial_data(&grid, &specs, cfg.phase.into(), cfg.epsilon)?;
    let boundary = match cfg.bc {
        Bc::Dirichlet => Some(dirichlet_boundary_values(&grid, &specs, cfg.phase.into())?),
        Bc::Neumann => None,
    };
    let opts = EvolveOptions {
        cadence: cfg.cadence,
        steady: cfg.steady_state(),
    };
    log::info!(
        "{}: {}x{} grid, tau {}, t_end {}",
        cfg.name,
        grid.nx(),
        grid.ny(),
        cfg.tau,
        cfg.t_end
    );

    let mut frames: Vec<(f64, Vec<DetectedVortex>)> = Vec::new();
    let mut written: Option<u64> = None;
    let mut failure: Option<LabError> = None;
    let mut count = 0u64;
    let mut observer = |f: &Frame| -> cgle_core::Result<()> {
        frames.push((f.t, detect_vortices(f.field)?));
        let due = count == 0 || (cfg.snapshot_every > 0 && count % cfg.snapshot_every == 0);
        count += 1;
        if due {
            match output::write_snapshot(dir, f.field, f.step) {
                Ok(_) => written = Some(f.step),
                Err(e) => {
                    failure = Some(e);
                    return Err(cgle_core::Error::SolverBreakdown("snapshot write failed".into()));
                }
            }
        }
        Ok(())
    };
    let result = evolve(&psi0, &params, boundary.as_ref(), &opts, &mut observer);
    if let Some(e) = failure {
        return Err(e);
    }
    let record = result?;
    let last = record.samples.last().expect("evolve always samples t = 0");
    if written != Some(last.step) {
        output::write_snapshot(dir, &record.final_field, last.step)?;
    }

    let tracks = track(&frames, &grid, &TrackerConfig::for_grid(&grid))?;
    let rows: Vec<TrajectoryRow> = tracks
        .trajectories
        .iter()
        .flat_map(|tr| {
            tr.samples.iter().map(move |&(t, p)| TrajectoryRow {
                t,
                id: tr.id,
                p,
                winding: tr.winding,
            })
        })
        .collect();
    output::write_trajectories(&dir.join(TRAJECTORY_FILE), &rows)?;
    let energies: Vec<(f64, [f64; 3])> = record
        .samples
        .iter()
        .map(|s| (s.t, [s.energies.total, s.energies.kinetic, s.energies.interaction]))
        .collect();
    output::write_energies(&dir.join(ENERGY_FILE), &energies)?;

    let mut events: Vec<Event> = tracks
        .trajectories
        .iter()
        .filter_map(|tr| {
            tr.end.map(|end| match end {
                Lifecycle::Annihilated { t, partner } => Event::Annihilation { id: tr.id, partner, t },
                Lifecycle::Exited { t } => Event::Exit { id: tr.id, t },
                Lifecycle::Lost { t } => Event::Lost { id: tr.id, t },
            })
        })
        .collect();
    events.sort_by(|a, b| event_time(a).total_cmp(&event_time(b)));
    let survivors = tracks
        .alive()
        .map(|tr| {
            let (_, p) = tr.last();
            Survivor {
                id: tr.id,
                winding: tr.winding,
                x: p.x,
                y: p.y,
            }
        })
        .collect();
    let summary = CgleSummary {
        scenario: cfg.name.clone(),
        stop: match record.stop {
            StopReason::TimeEnd => "time-end".into(),
            StopReason::Steady => "steady".into(),
        },
        steps: last.step,
        t_final: last.t,
        events,
        survivors,
    };
    output::write_json(&dir.join(SUMMARY_FILE), &summary)?;
    Ok(CgleRun {
        dir: dir.to_path_buf(),
        tracks,
        samples: record.samples,
        stop: record.stop,
        summary,
    })
}

fn event_time(e: &Event) -> f64 {
    match e {
        Event::Annihilation { t, .. } | Event::Exit { t, .. } | Event::Lost { t, .. } => *t,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum StopRecord {
    Collision { i: usize, j: usize, t_stop: f64 },
    Exit { j: usize, t_stop: f64 },
    TimeEnd { t_stop: f64 },
}

pub struct RdlRun {
    pub dir: PathBuf,
    pub trajectory: RdlTrajectory,
    pub stop: StopRecord,
}

pub fn rdl_model(cfg: &ScenarioConfig) -> Result<RdlModel> {
    let boundary = match BcKind::from(cfg.bc) {
        BcKind::Dirichlet => RdlBoundary::Dirichlet(BoundaryPhase::new(cfg.phase.into(), cfg.specs())?),
        BcKind::Neumann => RdlBoundary::Neumann,
    };
    Ok(RdlModel::new(cfg.aux_grid()?, cfg.alpha, cfg.beta, boundary)?)
}

pub fn rdl_state(cfg: &ScenarioConfig) -> RdlState {
    RdlState::new(
        cfg.vortices.iter().map(|v| cgle_core::Point::new(v.x, v.y)).collect(),
        cfg.vortices.iter().map(|v| v.n).collect(),
    )
}

/// Integrates the reduced model and writes trajectories at the observation
/// times of the matching PDE run.
pub fn run_rdl(cfg: &ScenarioConfig, dir: &Path) -> Result<RdlRun> {
    cfg.validate()?;
    if cfg.vortices.is_empty() {
        return Err(LabError::Config(format!("{}: reduced model needs vortices", cfg.name)));
    }
    prepare_dir(cfg, dir)?;
    let model = rdl_model(cfg)?;
    let trajectory = model.integrate(&rdl_state(cfg), cfg.t_end, &RdlOptions::default())?;
    let dt = cfg.cadence as f64 * cfg.tau;
    let mut rows = Vec::new();
    for (t, centers) in trajectory.sample(dt) {
        for (id, (p, &n)) in centers.iter().zip(&trajectory.windings).enumerate() {
            rows.push(TrajectoryRow {
                t,
                id,
                p: *p,
                winding: n,
            });
        }
    }
    output::write_trajectories(&dir.join(TRAJECTORY_FILE), &rows)?;
    let t_stop = trajectory.stop.t_stop;
    let stop = match trajectory.stop.kind {
        StopKind::Collision { i, j } => StopRecord::Collision { i, j, t_stop },
        StopKind::Exit { j } => StopRecord::Exit { j, t_stop },
        StopKind::TimeEnd => StopRecord::TimeEnd { t_stop },
    };
    output::write_json(&dir.join(STOP_FILE), &stop)?;
    Ok(RdlRun {
        dir: dir.to_path_buf(),
        trajectory,
        stop,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VortexDiscrepancy {
    pub rdl_id: usize,
    pub cgle_id: usize,
    pub winding: i8,
    pub max: f64,
    pub terminal: f64,
    pub t_terminal: f64,
    pub series: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub scenario: String,
    pub vortices: Vec<VortexDiscrepancy>,
    /// Reduced-model vortices with no PDE counterpart at the first frame.
    pub unmatched: Vec<usize>,
}

/// Per-vortex distance between a PDE run and a reduced run of the same
/// scenario. Either directory may hold either kind of run.
pub fn compare(cgle_dir: &Path, rdl_dir: &Path) -> Result<Discrepancy> {
    let a = ScenarioConfig::load(&cgle_dir.join(CONFIG_FILE))?;
    let b = ScenarioConfig::load(&rdl_dir.join(CONFIG_FILE))?;
    if a.name != b.name {
        return Err(LabError::ScenarioMismatch(a.name, b.name));
    }
    let cgle = output::group_by_vortex(&output::read_trajectories(&cgle_dir.join(TRAJECTORY_FILE))?);
    let rdl = output::group_by_vortex(&output::read_trajectories(&rdl_dir.join(TRAJECTORY_FILE))?);
    let t0 = cgle
        .values()
        .filter_map(|(_, s)| s.first().map(|p| p.0))
        .fold(f64::INFINITY, f64::min);
    let mut taken = Vec::new();
    let mut vortices = Vec::new();
    let mut unmatched = Vec::new();
    for (&rid, (n, rs)) in &rdl {
        let start = rs[0].1;
        let best = cgle
            .iter()
            .filter(|(id, (m, s))| m == n && s[0].0 == t0 && !taken.contains(*id))
            .min_by(|x, y| x.1 .1[0].1.dist(start).total_cmp(&y.1 .1[0].1.dist(start)));
        let Some((&cid, (_, cs))) = best else {
            unmatched.push(rid);
            continue;
        };
        taken.push(cid);
        let series = center_discrepancy(cs, rs)?;
        let max = series.iter().map(|s| s.1).fold(0.0, f64::max);
        let &(t_terminal, terminal) = series.last().expect("non-empty overlap");
        vortices.push(VortexDiscrepancy {
            rdl_id: rid,
            cgle_id: cid,
            winding: *n,
            max,
            terminal,
            t_terminal,
            series,
        });
    }
    Ok(Discrepancy {
        scenario: a.name,
        vortices,
        unmatched,
    })
}

pub fn write_discrepancy(path: &Path, d: &Discrepancy) -> Result<()> {
    output::write_json(path, d)
}

/// Writes the radial vortex profile as `r,f` rows.
pub fn dump_profile(epsilon: f64, r_max: f64, path: &Path) -> Result<RadialProfile> {
    let profile = RadialProfile::compute(epsilon, r_max, 1e-10)?;
    let mut w = csv::Writer::from_path(path).map_err(|e| LabError::Malformed {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    let io = |e: csv::Error| LabError::Malformed {
        path: path.to_path_buf(),
        reason: e.to_string(),
    };
    w.write_record(["r", "f"]).map_err(io)?;
    for (r, f) in profile.radii().iter().zip(profile.values()) {
        w.write_record([output::fmt(*r), output::fmt(*f)]).map_err(io)?;
    }
    w.flush().map_err(LabError::io(path, None))?;
    Ok(profile)
}

/// `$CGLE_LAB_OUT`, or `runs` in the working directory.
pub fn default_out_root() -> PathBuf {
    std::env::var_os("CGLE_LAB_OUT")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("runs"))
}
