//! Run orchestration: configuration, presets, monitors, file output and the
//! verification suites behind the `vpmcf` binary.

pub mod config;
pub mod monitors;
pub mod output;
pub mod verify;

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::flow::{self, Trajectory};
use crate::singularity::{self, BlowupFit};

pub use config::{InitialShape, MonitorKind, SimConfig};
pub use monitors::{MonitorReport, TimeSeriesRow, Verdict};

/// Environment variable overriding `out_dir`.
pub const OUT_ENV: &str = "VPMCF_OUT";

/// Rescale window half-width (in rescaled units) for template fits.
pub const TEMPLATE_HALF_WIDTH: f64 = 1.0;

/// Number of final snapshots used for template fits.
pub const TEMPLATE_SNAPSHOTS: usize = 10;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("config: {0}")]
    ConfigValue(String),

    #[error("{path}: missing column {column:?}")]
    MissingColumn { path: String, column: String },

    #[error("{0}")]
    Data(String),

    #[error(transparent)]
    Core(#[from] crate::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Everything a finished run produced.
#[derive(Debug)]
pub struct RunOutcome {
    pub trajectory: Trajectory,
    pub rows: Vec<TimeSeriesRow>,
    pub monitors: Vec<MonitorReport>,
    pub fit: Option<Result<BlowupFit, crate::Error>>,
    pub out_dir: PathBuf,
}

impl RunOutcome {
    pub fn monitors_failed(&self) -> bool {
        self.monitors.iter().any(|m| m.verdict == Verdict::Fail)
    }
}

/// `out_dir` after applying the environment override.
pub fn resolve_out_dir(config: &SimConfig) -> PathBuf {
    std::env::var_os(OUT_ENV).map(PathBuf::from).unwrap_or_else(|| config.out_dir.clone())
}

/// Integrate and analyse without touching the filesystem.
pub fn simulate(config: &SimConfig) -> Result<(Trajectory, Vec<TimeSeriesRow>, Vec<MonitorReport>), HarnessError> {
    let initial = config.initial.build(config.grid)?;
    let traj = flow::run(initial, &config.flow)?;
    let rows = monitors::time_series(&traj, config.census_tol, config.c00)?;
    let reports = monitors::evaluate(&traj, &rows, config);
    Ok((traj, rows, reports))
}

/// Run a configuration and write every artifact into its output directory.
pub fn run_to_dir(config: &SimConfig) -> Result<RunOutcome, HarnessError> {
    let out_dir = resolve_out_dir(config);
    let (trajectory, rows, reports) = simulate(config)?;
    write_outputs(&out_dir, config, &trajectory, &rows, &reports)?;
    let fit = trajectory.is_singular().then(|| singularity::fit_type1(&trajectory));
    if let Some(fit) = &fit {
        std::fs::write(out_dir.join("fit.txt"), output::fit_report(fit))?;
        std::fs::write(out_dir.join("templates.csv"), output::templates_csv(&trajectory)?)?;
    }
    Ok(RunOutcome { trajectory, rows, monitors: reports, fit, out_dir })
}

fn write_outputs(
    out_dir: &Path,
    config: &SimConfig,
    traj: &Trajectory,
    rows: &[TimeSeriesRow],
    reports: &[MonitorReport],
) -> Result<(), HarnessError> {
    let snaps = out_dir.join("snapshots");
    std::fs::create_dir_all(&snaps)?;
    std::fs::write(out_dir.join("timeseries.csv"), output::timeseries_csv(rows)?)?;
    std::fs::write(out_dir.join("census.csv"), output::census_csv(rows)?)?;
    std::fs::write(out_dir.join("monitors.txt"), output::monitors_report(reports))?;
    let frame = output::SvgFrame::for_trajectory(traj);
    for (i, state) in traj.states.iter().enumerate() {
        std::fs::write(snaps.join(format!("{i:04}.csv")), output::snapshot_csv(&state.profile, &state.field)?)?;
        if config.svg {
            std::fs::write(snaps.join(format!("{i:04}.svg")), frame.render(&state.profile))?;
        }
    }
    Ok(())
}
