use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cgle_lab::run::{self, default_out_root};
use cgle_lab::{find, list_scenarios, LabError, Result, ScenarioConfig};

#[derive(Parser)]
#[command(name = "cgle-lab", version, about = "Vortex experiments for the complex Ginzburg-Landau equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the names of all cataloged scenarios.
    ListScenarios,
    /// Evolve the PDE and track its vortices.
    RunCgle(RunArgs),
    /// Integrate the reduced dynamical laws.
    RunRdl(RunArgs),
    /// Compare a PDE run with a reduced run of the same scenario.
    Compare {
        #[arg(long)]
        cgle: PathBuf,
        #[arg(long)]
        rdl: PathBuf,
        /// Output file; defaults to discrepancy.json next to the PDE run.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dump the radial profile of a single vortex.
    Profile {
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 2.0)]
        r_max: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Cataloged scenario name.
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    scenario: Option<String>,
    /// Scenario file in TOML.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    cadence: Option<u64>,
    /// Use h = epsilon/10 and tau = 1e-6.
    #[arg(long = "paper-scale")]
    reference_scale: bool,
}

impl RunArgs {
    fn resolve(&self, kind: &str) -> Result<(ScenarioConfig, PathBuf)> {
        let mut cfg = match (&self.scenario, &self.config) {
            (Some(name), _) => find(name).ok_or_else(|| LabError::Config(format!("unknown scenario {name}")))?,
            (None, Some(path)) => ScenarioConfig::load(path)?,
            (None, None) => unreachable!("clap requires one of them"),
        };
        if self.reference_scale {
            cfg = cfg.reference_scale();
        }
        if let Some(e) = self.epsilon {
            cfg.epsilon = e;
        }
        if let Some(t) = self.tau {
            cfg.tau = t;
        }
        if let Some(t) = self.t_end {
            cfg.t_end = t;
        }
        if let Some(c) = self.cadence {
            cfg.cadence = c;
        }
        cfg.validate()?;
        let dir = match (&self.out, &cfg.out_dir) {
            (Some(d), _) => d.clone(),
            (None, Some(d)) => PathBuf::from(d),
            (None, None) => default_out_root().join(&cfg.name).join(kind),
        };
        Ok((cfg, dir))
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::ListScenarios => {
            for c in list_scenarios() {
                match &c.note {
                    Some(note) => println!("{}  ({note})", c.name),
                    None => println!("{}", c.name),
                }
            }
        }
        Command::RunCgle(args) => {
            let (cfg, dir) = args.resolve("cgle")?;
            let r = run::run_cgle(&cfg, &dir)?;
            println!(
                "{}: {} after {} steps (t = {}), {} events, {} vortices left; output in {}",
                cfg.name,
                r.summary.stop,
                r.summary.steps,
                r.summary.t_final,
                r.summary.events.len(),
                r.summary.survivors.len(),
                dir.display()
            );
        }
        Command::RunRdl(args) => {
            let (cfg, dir) = args.resolve("rdl")?;
            let r = run::run_rdl(&cfg, &dir)?;
            println!("{}: {:?}; output in {}", cfg.name, r.stop, dir.display());
        }
        Command::Compare { cgle, rdl, out } => {
            let d = run::compare(&cgle, &rdl)?;
            let path = out.unwrap_or_else(|| cgle.join(run::DISCREPANCY_FILE));
            run::write_discrepancy(&path, &d)?;
            for v in &d.vortices {
                println!("vortex {}: max {:.6e}, terminal {:.6e}", v.rdl_id, v.max, v.terminal);
            }
        }
        Command::Profile { epsilon, r_max, out } => {
            let dir = out.unwrap_or_else(default_out_root);
            std::fs::create_dir_all(&dir).map_err(|source| LabError::Io {
                path: dir.clone(),
                step: None,
                source,
            })?;
            let path = dir.join("profile.csv");
            let p = run::dump_profile(epsilon, r_max, &path)?;
            println!("profile with {} nodes written to {}", p.radii().len(), path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
