//! Line-oriented `key = value` run configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Every key may appear
//! at most once; unknown keys are rejected.

use std::collections::HashSet;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::HarnessError;
use crate::flow::{FlowConfig, FlowMode};
use crate::profile::{GridSpec, RadialProfile};
use crate::sturm::DEFAULT_CENSUS_TOL;

/// Initial profile presets.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialShape {
    Cylinder {
        r: f64,
    },
    /// `r + amp cos(2 pi modes (x - a)/(b - a))`.
    Perturbed {
        r: f64,
        amp: f64,
        modes: u32,
    },
    /// `r + amp cos(2 pi (x - a)/(b - a))`: bulges at both planes, neck at the midpoint.
    Dumbbell {
        r: f64,
        amp: f64,
    },
    /// Snapshot CSV with at least the columns `x` and `rho`.
    FromFile(PathBuf),
}

impl InitialShape {
    pub fn validate(&self) -> Result<(), String> {
        match *self {
            InitialShape::Cylinder { r } if !(r > 0.0) => Err(format!("radius must be positive, got {r}")),
            InitialShape::Perturbed { r, amp, .. } | InitialShape::Dumbbell { r, amp } if !(amp.abs() < r) => {
                Err(format!("amplitude {amp} must be smaller than radius {r}"))
            }
            InitialShape::Perturbed { modes: 0, .. } => Err("modes must be at least 1".into()),
            _ => Ok(()),
        }
    }

    pub fn build(&self, grid: GridSpec) -> Result<RadialProfile, HarnessError> {
        let (a, len) = (grid.a(), grid.length());
        let profile = match *self {
            InitialShape::Cylinder { r } => RadialProfile::from_fn(grid, |_| r)?,
            InitialShape::Perturbed { r, amp, modes } => {
                RadialProfile::from_fn(grid, |x| r + amp * (2.0 * PI * modes as f64 * (x - a) / len).cos())?
            }
            InitialShape::Dumbbell { r, amp } => {
                RadialProfile::from_fn(grid, |x| r + amp * (2.0 * PI * (x - a) / len).cos())?
            }
            InitialShape::FromFile(ref path) => super::output::read_snapshot(path, grid.dim())?,
        };
        Ok(profile)
    }
}

/// Names of the invariant monitors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MonitorKind {
    VolumeDrift,
    AreaMonotone,
    HPositive,
    VyBound,
    KOverPBound,
    MinHBound,
    BreveHeightFloor,
    SturmMonotone,
    SharpGradientBound,
}

impl MonitorKind {
    pub const ALL: [MonitorKind; 9] = [
        MonitorKind::VolumeDrift,
        MonitorKind::AreaMonotone,
        MonitorKind::HPositive,
        MonitorKind::VyBound,
        MonitorKind::KOverPBound,
        MonitorKind::MinHBound,
        MonitorKind::BreveHeightFloor,
        MonitorKind::SturmMonotone,
        MonitorKind::SharpGradientBound,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MonitorKind::VolumeDrift => "volume_drift",
            MonitorKind::AreaMonotone => "area_monotone",
            MonitorKind::HPositive => "h_positive",
            MonitorKind::VyBound => "vy_bound",
            MonitorKind::KOverPBound => "k_over_p_bound",
            MonitorKind::MinHBound => "min_h_bound",
            MonitorKind::BreveHeightFloor => "breve_height_floor",
            MonitorKind::SturmMonotone => "sturm_monotone",
            MonitorKind::SharpGradientBound => "sharp_gradient_bound",
        }
    }
}

impl FromStr for MonitorKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        MonitorKind::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| format!("unknown monitor {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub grid: GridSpec,
    pub flow: FlowConfig,
    pub initial: InitialShape,
    pub monitors: Vec<MonitorKind>,
    pub census_tol: f64,
    pub c00: f64,
    pub out_dir: PathBuf,
    pub svg: bool,
}

impl SimConfig {
    pub fn new(grid: GridSpec, flow: FlowConfig, initial: InitialShape) -> Self {
        Self {
            grid,
            flow,
            initial,
            monitors: MonitorKind::ALL.to_vec(),
            census_tol: DEFAULT_CENSUS_TOL,
            c00: 4.0,
            out_dir: PathBuf::from("out"),
            svg: false,
        }
    }

    pub fn from_file(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let mut b = Builder::default();
        let mut seen = HashSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let err = |msg: String| HarnessError::Config { line, msg };
            let content = raw.trim();
            if content.is_empty() || content.starts_with('#') {
                continue;
            }
            let (key, value) =
                content.split_once('=').ok_or_else(|| err(format!("expected `key = value`, got {content:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || value.is_empty() {
                return Err(err(format!("expected `key = value`, got {content:?}")));
            }
            if !seen.insert(key.to_string()) {
                return Err(err(format!("duplicate key {key:?}")));
            }
            b.set(key, value).map_err(err)?;
        }
        b.finish()
    }
}

#[derive(Default)]
struct Builder {
    a: Option<f64>,
    b: Option<f64>,
    intervals: Option<usize>,
    dim: Option<usize>,
    flow: FlowConfig,
    initial: Option<String>,
    radius: Option<f64>,
    amplitude: Option<f64>,
    modes: Option<u32>,
    initial_file: Option<PathBuf>,
    monitors: Option<Vec<MonitorKind>>,
    census_tol: Option<f64>,
    c00: Option<f64>,
    out_dir: Option<PathBuf>,
    svg: bool,
}

fn num<T: FromStr>(value: &str) -> Result<T, String> {
    value.parse().map_err(|_| format!("cannot parse {value:?}"))
}

fn boolean(value: &str) -> Result<bool, String> {
    match value {
        "true" | "yes" | "on" => Ok(true),
        "false" | "no" | "off" => Ok(false),
        _ => Err(format!("expected true/false, got {value:?}")),
    }
}

impl Builder {
    fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "a" => self.a = Some(num(value)?),
            "b" => self.b = Some(num(value)?),
            "intervals" => self.intervals = Some(num(value)?),
            "dim" => self.dim = Some(num(value)?),
            "mode" => self.flow.mode = value.parse::<FlowMode>().map_err(|e| e.to_string())?,
            "dt_safety" => self.flow.dt_safety = num(value)?,
            "t_end" => self.flow.t_end = num(value)?,
            "stop_rho_min" => self.flow.stop_rho_min = Some(num(value)?),
            "stop_a2_max" => self.flow.stop_a2_max = Some(num(value)?),
            "volume_projection" => self.flow.volume_projection = boolean(value)?,
            "output_every" => self.flow.output_every = num(value)?,
            "record_a2_growth" => self.flow.record_a2_growth = Some(num(value)?),
            "rho_floor" => self.flow.rho_floor = num(value)?,
            "vol_tol" => self.flow.vol_tol = num(value)?,
            "initial" => match value {
                "cylinder" | "perturbed" | "dumbbell" | "from_file" => self.initial = Some(value.to_string()),
                _ => return Err(format!("unknown initial shape {value:?}")),
            },
            "radius" => self.radius = Some(num(value)?),
            "amplitude" => self.amplitude = Some(num(value)?),
            "modes" => self.modes = Some(num(value)?),
            "initial_file" => self.initial_file = Some(PathBuf::from(value)),
            "monitors" => {
                self.monitors = Some(if value == "all" {
                    MonitorKind::ALL.to_vec()
                } else if value == "none" {
                    vec![]
                } else {
                    value.split(',').map(|m| m.trim().parse()).collect::<Result<_, _>>()?
                })
            }
            "census_tol" => self.census_tol = Some(num(value)?),
            "c00" => self.c00 = Some(num(value)?),
            "out_dir" => self.out_dir = Some(PathBuf::from(value)),
            "svg" => self.svg = boolean(value)?,
            _ => return Err(format!("unknown key {key:?}")),
        }
        Ok(())
    }

    fn finish(self) -> Result<SimConfig, HarnessError> {
        let invalid = |msg: String| HarnessError::ConfigValue(msg);
        let grid = GridSpec::new(
            self.a.unwrap_or(0.0),
            self.b.unwrap_or(1.0),
            self.intervals.unwrap_or(200),
            self.dim.unwrap_or(2),
        )
        .map_err(|e| invalid(e.to_string()))?;
        self.flow.validate().map_err(|e| invalid(e.to_string()))?;
        let r = self.radius.unwrap_or(1.0);
        let initial = match self.initial.as_deref().unwrap_or("cylinder") {
            "cylinder" => InitialShape::Cylinder { r },
            "perturbed" => {
                InitialShape::Perturbed { r, amp: self.amplitude.unwrap_or(0.1), modes: self.modes.unwrap_or(1) }
            }
            "dumbbell" => InitialShape::Dumbbell { r, amp: self.amplitude.unwrap_or(0.5 * r) },
            _ => InitialShape::FromFile(
                self.initial_file.ok_or_else(|| invalid("initial = from_file needs initial_file".into()))?,
            ),
        };
        initial.validate().map_err(invalid)?;
        let c00 = self.c00.unwrap_or(4.0);
        if !(c00 > 2.0) {
            return Err(invalid(format!("c00 must exceed 2, got {c00}")));
        }
        let census_tol = self.census_tol.unwrap_or(DEFAULT_CENSUS_TOL);
        if !(census_tol >= 0.0) {
            return Err(invalid(format!("census_tol must be >= 0, got {census_tol}")));
        }
        Ok(SimConfig {
            grid,
            flow: self.flow,
            initial,
            monitors: self.monitors.unwrap_or_else(|| MonitorKind::ALL.to_vec()),
            census_tol,
            c00,
            out_dir: self.out_dir.unwrap_or_else(|| PathBuf::from("out")),
            svg: self.svg,
        })
    }
}
