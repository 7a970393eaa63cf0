//! Method-of-lines time integration of the profile equation
//!
//! `rho_t = rho''/(1 + rho'^2) - (n-1)/rho + h sqrt(1 + rho'^2)`
//!
//! with `h` the area-averaged mean curvature (volume-preserving flow) or
//! `h = 0` (plain mean curvature flow). Stepping is classical RK4 under a
//! diffusion/reaction step limit.

use crate::error::{Error, Result};
use crate::profile::{
    check_floor, curvature_fields_with_floor, enclosed_volume, int_pow, simpson_weighted_sum, CurvatureField,
    RadialProfile, DEFAULT_RHO_FLOOR,
};

/// Which normal speed drives the surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowMode {
    /// Speed `H - h`, enclosed volume constant.
    VolumePreserving,
    /// Speed `H`.
    PlainMcf,
}

impl FlowMode {
    pub fn name(self) -> &'static str {
        match self {
            FlowMode::VolumePreserving => "volume_preserving",
            FlowMode::PlainMcf => "plain_mcf",
        }
    }
}

impl std::str::FromStr for FlowMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "volume_preserving" => Ok(FlowMode::VolumePreserving),
            "plain_mcf" => Ok(FlowMode::PlainMcf),
            _ => Err(Error::InvalidArgument(format!("unknown flow mode {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowConfig {
    pub mode: FlowMode,
    pub dt_safety: f64,
    pub t_end: f64,
    /// Stop when `min rho` drops below this. `None` means `1e-3 * min rho(0)`.
    pub stop_rho_min: Option<f64>,
    /// Stop when `max |A|^2` exceeds this. `None` means `1e8 * max |A|^2(0)`.
    pub stop_a2_max: Option<f64>,
    pub volume_projection: bool,
    /// Record every this many steps (the initial and final states are always kept).
    pub output_every: usize,
    /// Also record whenever `max |A|^2` has grown by this factor since the
    /// last recorded state.
    pub record_a2_growth: Option<f64>,
    pub rho_floor: f64,
    /// Relative volume drift tolerated before a state counts as drifted.
    pub vol_tol: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            mode: FlowMode::VolumePreserving,
            dt_safety: 0.2,
            t_end: 1.0,
            stop_rho_min: None,
            stop_a2_max: None,
            volume_projection: true,
            output_every: 100,
            record_a2_growth: None,
            rho_floor: DEFAULT_RHO_FLOOR,
            vol_tol: 1e-6,
        }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.to_string()));
        if !(self.dt_safety > 0.0 && self.dt_safety <= 1.0) {
            return bad("dt_safety must lie in (0, 1]");
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return bad("t_end must be positive");
        }
        if self.stop_rho_min.is_some_and(|v| !(v > 0.0)) || self.stop_a2_max.is_some_and(|v| !(v > 0.0)) {
            return bad("stop thresholds must be positive");
        }
        if self.record_a2_growth.is_some_and(|g| !(g > 1.0)) {
            return bad("record_a2_growth must exceed 1");
        }
        if self.output_every == 0 {
            return bad("output_every must be at least 1");
        }
        if !(self.rho_floor > 0.0 && self.vol_tol > 0.0) {
            return bad("rho_floor and vol_tol must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Running,
    ReachedTEnd,
    AxisContact,
    CurvatureBlowup,
    StepUnderflow,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Running => "running",
            Status::ReachedTEnd => "reached_t_end",
            Status::AxisContact => "axis_contact",
            Status::CurvatureBlowup => "curvature_blowup",
            Status::StepUnderflow => "step_underflow",
        }
    }

    /// Terminal statuses that signal the first singularity.
    pub fn is_singular(self) -> bool {
        matches!(self, Status::AxisContact | Status::CurvatureBlowup | Status::StepUnderflow)
    }
}

/// One instant of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub profile: RadialProfile,
    pub field: CurvatureField,
    /// Averaged mean curvature (0 in plain mode).
    pub h: f64,
    pub t: f64,
    pub target_volume: f64,
    pub status: Status,
}

impl FlowState {
    pub fn new(profile: RadialProfile, mode: FlowMode, rho_floor: f64) -> Result<Self> {
        let field = curvature_fields_with_floor(&profile, rho_floor)?;
        let target_volume = enclosed_volume(&profile)?;
        let h = match mode {
            FlowMode::VolumePreserving => mean_curvature_average(&profile, &field),
            FlowMode::PlainMcf => 0.0,
        };
        let t = profile.time();
        Ok(Self { profile, field, h, t, target_volume, status: Status::Running })
    }

    pub fn volume(&self) -> f64 {
        enclosed_volume(&self.profile).unwrap_or(f64::NAN)
    }

    pub fn relative_volume_drift(&self) -> f64 {
        (self.volume() - self.target_volume).abs() / self.target_volume
    }
}

fn mean_curvature_average(profile: &RadialProfile, field: &CurvatureField) -> f64 {
    crate::profile::weighted_mean_h(profile.rho(), &field.v, &field.h, profile.grid().dim() as i32 - 1)
}

/// Right-hand side of the profile ODE at one stage; `h` is recomputed from
/// the stage profile.
struct Rhs {
    dx: f64,
    n1: f64,
    mode: FlowMode,
    rho_floor: f64,
    // per-node scratch: 1 + rho'^2, rho'', sqrt(1 + rho'^2)
    w: Vec<f64>,
    d2: Vec<f64>,
    v: Vec<f64>,
}

impl Rhs {
    fn eval(&mut self, rho: &[f64], out: &mut [f64]) -> Result<()> {
        check_floor(rho, self.rho_floor)?;
        let m = rho.len();
        let last = m - 1;
        let inv2dx = 0.5 / self.dx;
        let invdx2 = 1.0 / (self.dx * self.dx);
        // ghost mirror at both planes: rho' = 0 there
        self.w[0] = 1.0;
        self.d2[0] = 2.0 * (rho[1] - rho[0]) * invdx2;
        self.w[last] = 1.0;
        self.d2[last] = 2.0 * (rho[last - 1] - rho[last]) * invdx2;
        for i in 1..last {
            let d1 = (rho[i + 1] - rho[i - 1]) * inv2dx;
            self.w[i] = 1.0 + d1 * d1;
            self.d2[i] = (rho[i + 1] - 2.0 * rho[i] + rho[i - 1]) * invdx2;
        }
        for (v, w) in self.v.iter_mut().zip(&self.w) {
            *v = w.sqrt();
        }
        let h = match self.mode {
            FlowMode::PlainMcf => 0.0,
            FlowMode::VolumePreserving => {
                let n1 = self.n1 as i32;
                let (w, d2, v) = (&self.w, &self.d2, &self.v);
                // H * rho^(n-1) * v = -rho'' rho^(n-1) / w + (n-1) rho^(n-2)
                let weight = |i: usize| int_pow(rho[i], n1) * v[i];
                let weighted_h = |i: usize| self.n1 * int_pow(rho[i], n1 - 1) - d2[i] * int_pow(rho[i], n1) / w[i];
                let num = simpson_weighted_sum(m, weighted_h);
                let den = simpson_weighted_sum(m, weight);
                num / den
            }
        };
        for i in 0..m {
            out[i] = self.d2[i] / self.w[i] - self.n1 / rho[i] + h * self.v[i];
        }
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(())
    }
}

fn rhs_for(state: &FlowState, config: &FlowConfig) -> Rhs {
    let grid = state.profile.grid();
    let m = grid.nodes();
    Rhs {
        dx: grid.dx(),
        n1: (grid.dim() - 1) as f64,
        mode: config.mode,
        rho_floor: config.rho_floor,
        w: vec![0.0; m],
        d2: vec![0.0; m],
        v: vec![0.0; m],
    }
}

/// Stage-1 derivative `rho_t` of an RK step from `state`.
pub fn stage_derivative(state: &FlowState, config: &FlowConfig) -> Result<Vec<f64>> {
    let mut out = vec![0.0; state.profile.rho().len()];
    rhs_for(state, config).eval(state.profile.rho(), &mut out)?;
    Ok(out)
}

/// Advance by one RK4 step of size `dt`.
///
/// On failure the input geometry is kept and the status records why:
/// axis contact or non-finite values (reported as curvature blow-up).
pub fn step(state: &FlowState, dt: f64, config: &FlowConfig) -> FlowState {
    match try_step(state, dt, config) {
        Ok(next) => next,
        Err(e) => {
            let mut stuck = state.clone();
            stuck.status = match e {
                Error::AxisContact { .. } => Status::AxisContact,
                Error::StepUnderflow(_) => Status::StepUnderflow,
                _ => Status::CurvatureBlowup,
            };
            stuck
        }
    }
}

/// Fallible form of [`step`].
pub fn try_step(state: &FlowState, dt: f64, config: &FlowConfig) -> Result<FlowState> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    let mut rhs = rhs_for(state, config);
    let rho = state.profile.rho();
    let m = rho.len();
    let mut k1 = vec![0.0; m];
    let mut k2 = vec![0.0; m];
    let mut k3 = vec![0.0; m];
    let mut k4 = vec![0.0; m];
    let mut stage = vec![0.0; m];

    rhs.eval(rho, &mut k1)?;
    for i in 0..m {
        stage[i] = rho[i] + 0.5 * dt * k1[i];
    }
    rhs.eval(&stage, &mut k2)?;
    for i in 0..m {
        stage[i] = rho[i] + 0.5 * dt * k2[i];
    }
    rhs.eval(&stage, &mut k3)?;
    for i in 0..m {
        stage[i] = rho[i] + dt * k3[i];
    }
    rhs.eval(&stage, &mut k4)?;
    let mut next: Vec<f64> = (0..m).map(|i| rho[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])).collect();
    check_floor(&next, config.rho_floor)?;

    let t = state.t + dt;
    let grid = *state.profile.grid();
    if config.mode == FlowMode::VolumePreserving && config.volume_projection {
        let trial = RadialProfile::from_parts_unchecked(grid, next, t);
        let volume = enclosed_volume(&trial)?;
        let scale = (state.target_volume / volume).powf(1.0 / grid.dim() as f64);
        next = trial.into_parts().1;
        for r in &mut next {
            *r *= scale;
        }
        check_floor(&next, config.rho_floor)?;
    }
    let profile = RadialProfile::from_parts_unchecked(grid, next, t);
    let field = curvature_fields_with_floor(&profile, config.rho_floor)?;
    if field.a2.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let h = match config.mode {
        FlowMode::VolumePreserving => mean_curvature_average(&profile, &field),
        FlowMode::PlainMcf => 0.0,
    };
    Ok(FlowState { profile, field, h, t, target_volume: state.target_volume, status: Status::Running })
}

/// Smallest time step underflow threshold.
pub const MIN_DT: f64 = 1e-16;

/// Stable step size for the next RK4 step.
pub fn adaptive_dt(state: &FlowState, config: &FlowConfig) -> Result<f64> {
    let grid = state.profile.grid();
    let dx = grid.dx();
    let min_w = state.field.d1.iter().map(|d| 1.0 + d * d).fold(f64::INFINITY, f64::min);
    let min_rho = state.profile.min_rho();
    let diffusion = dx * dx * min_w / 2.0;
    let reaction = min_rho * min_rho / (4.0 * (grid.dim() - 1) as f64);
    let remaining = config.t_end - state.t;
    let dt = config.dt_safety * diffusion.min(reaction).min(remaining);
    if !(dt >= MIN_DT) {
        return Err(Error::StepUnderflow(dt));
    }
    Ok(dt)
}

/// Recorded states of a run plus how it ended.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub mode: FlowMode,
    pub states: Vec<FlowState>,
    pub status: Status,
    pub steps: u64,
}

impl Trajectory {
    pub fn last(&self) -> &FlowState {
        self.states.last().expect("trajectory always holds the initial state")
    }

    pub fn first(&self) -> &FlowState {
        &self.states[0]
    }

    pub fn times(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.t).collect()
    }

    pub fn is_singular(&self) -> bool {
        self.status.is_singular()
    }
}

/// Integrate from `initial` until `t_end` or the first singularity.
pub fn run(initial: RadialProfile, config: &FlowConfig) -> Result<Trajectory> {
    config.validate()?;
    let initial = initial.with_time(0.0);
    let mut state = FlowState::new(initial, config.mode, config.rho_floor)?;
    let stop_rho = config.stop_rho_min.unwrap_or(1e-3 * state.profile.min_rho());
    let stop_a2 = config.stop_a2_max.unwrap_or(1e8 * state.field.max_a2());
    let mut states = vec![state.clone()];
    let mut last_recorded_a2 = state.field.max_a2();
    let mut steps: u64 = 0;
    // guards against t + dt rounding short of t_end
    let t_slack = 1e-14 * config.t_end.max(1.0);

    while state.status == Status::Running {
        if config.t_end - state.t <= t_slack {
            state.status = Status::ReachedTEnd;
            break;
        }
        let dt = match adaptive_dt(&state, config) {
            Ok(dt) => dt,
            Err(_) => {
                state.status = Status::StepUnderflow;
                break;
            }
        };
        let mut next = step(&state, dt, config);
        if next.status != Status::Running {
            state.status = next.status;
            break;
        }
        steps += 1;
        if config.t_end - next.t <= t_slack {
            next.t = config.t_end;
            next.profile = next.profile.with_time(config.t_end);
            next.status = Status::ReachedTEnd;
        } else if next.profile.min_rho() < stop_rho {
            next.status = Status::AxisContact;
        } else if next.field.max_a2() > stop_a2 {
            next.status = Status::CurvatureBlowup;
        }
        state = next;
        let a2 = state.field.max_a2();
        let grown = config.record_a2_growth.is_some_and(|g| a2 >= g * last_recorded_a2);
        if state.status == Status::Running && (steps.is_multiple_of(config.output_every as u64) || grown) {
            last_recorded_a2 = a2;
            states.push(state.clone());
        }
    }
    let status = state.status;
    if states.last().map(|s| s.t) != Some(state.t) || states.len() == 1 {
        states.push(state);
    } else if let Some(last) = states.last_mut() {
        last.status = status;
    }
    Ok(Trajectory { mode: config.mode, states, status, steps })
}

/// Step with a fixed `dt`, recording every `record_every` steps; used for
/// residual studies that need equally spaced snapshots.
pub fn run_fixed(
    initial: RadialProfile,
    config: &FlowConfig,
    dt: f64,
    steps: usize,
    record_every: usize,
) -> Result<Trajectory> {
    config.validate()?;
    let mut state = FlowState::new(initial, config.mode, config.rho_floor)?;
    let mut states = vec![state.clone()];
    for s in 1..=steps {
        state = try_step(&state, dt, config)?;
        if s % record_every == 0 {
            states.push(state.clone());
        }
    }
    Ok(Trajectory { mode: config.mode, states, status: Status::Running, steps: steps as u64 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::GridSpec;

    fn cylinder(r: f64, n: usize) -> RadialProfile {
        RadialProfile::from_fn(GridSpec::new(0.0, 1.0, n, 2).unwrap(), |_| r).unwrap()
    }

    #[test]
    fn stationary_cylinder_step() {
        let cfg = FlowConfig::default();
        let s0 = FlowState::new(cylinder(0.7, 32), cfg.mode, cfg.rho_floor).unwrap();
        let s1 = step(&s0, 1e-4, &cfg);
        assert_eq!(s1.status, Status::Running);
        for (a, b) in s0.profile.rho().iter().zip(s1.profile.rho()) {
            assert!((a - b).abs() <= 1e-14);
        }
    }

    #[test]
    fn plain_cylinder_stage_derivative() {
        let cfg = FlowConfig { mode: FlowMode::PlainMcf, ..FlowConfig::default() };
        let s0 = FlowState::new(cylinder(1.0, 32), cfg.mode, cfg.rho_floor).unwrap();
        assert!(stage_derivative(&s0, &cfg).unwrap().iter().all(|&d| d == -1.0));
    }

    #[test]
    fn dt_formula_on_cylinder() {
        let cfg = FlowConfig::default();
        let s0 = FlowState::new(cylinder(1.0, 100), cfg.mode, cfg.rho_floor).unwrap();
        let dt = adaptive_dt(&s0, &cfg).unwrap();
        assert!((dt - 1e-5).abs() < 1e-18);
    }

    #[test]
    fn dt_respects_remaining_time_and_underflow() {
        let cfg = FlowConfig { t_end: 1.0, ..FlowConfig::default() };
        let mut s0 = FlowState::new(cylinder(1.0, 100), cfg.mode, cfg.rho_floor).unwrap();
        s0.t = 1.0 - 1e-6;
        assert!((adaptive_dt(&s0, &cfg).unwrap() - 2e-7).abs() < 1e-15);
        s0.t = 1.0 - 1e-17;
        assert!(matches!(adaptive_dt(&s0, &cfg), Err(Error::StepUnderflow(_))));
    }

    #[test]
    fn axis_contact_mid_step_is_a_status() {
        let cfg = FlowConfig { mode: FlowMode::PlainMcf, ..FlowConfig::default() };
        let s0 = FlowState::new(cylinder(0.01, 16), cfg.mode, cfg.rho_floor).unwrap();
        // rho_t = -100: a step of 1e-3 would cross the axis
        let s1 = step(&s0, 1e-3, &cfg);
        assert_eq!(s1.status, Status::AxisContact);
        assert_eq!(s1.profile, s0.profile);
    }

    #[test]
    fn config_validation() {
        assert!(FlowConfig { dt_safety: 0.0, ..FlowConfig::default() }.validate().is_err());
        assert!(FlowConfig { t_end: -1.0, ..FlowConfig::default() }.validate().is_err());
        assert!(FlowConfig { output_every: 0, ..FlowConfig::default() }.validate().is_err());
        assert!(FlowConfig::default().validate().is_ok());
    }
}
