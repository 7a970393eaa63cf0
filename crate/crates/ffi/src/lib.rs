//! C interface to the `vpmcf` flow simulator.
//!
//! Profiles and trajectories are opaque heap handles released with their
//! `_free` function. Every fallible call returns a [`VpmcfStatus`]; the text of
//! the most recent failure on the calling thread is available from
//! [`vpmcf_last_error`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use vpmcf::flow::{self, FlowConfig, FlowMode, Status, Trajectory};
use vpmcf::profile::{averaged_mean_curvature, curvature_fields, enclosed_volume, surface_area};
use vpmcf::singularity::{self, BlowupFit, Classification};
use vpmcf::{Error, GridSpec, RadialProfile};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VpmcfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    AxisContact = 3,
    NumericalFailure = 4,
    InsufficientData = 5,
    OutOfRange = 6,
    Panic = 7,
}

/// Nodal fields selectable through [`vpmcf_profile_field`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VpmcfField {
    Rho = 0,
    D1 = 1,
    D2 = 2,
    V = 3,
    P = 4,
    Q = 5,
    K = 6,
    H = 7,
    A2 = 8,
    C3 = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VpmcfMode {
    VolumePreserving = 0,
    PlainMcf = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VpmcfRunStatus {
    Running = 0,
    ReachedTEnd = 1,
    AxisContact = 2,
    CurvatureBlowup = 3,
    StepUnderflow = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VpmcfClassification {
    TypeI = 0,
    Inconclusive = 1,
    TypeIiSuspect = 2,
}

/// Flow parameters. Optional thresholds are disabled (or defaulted) with NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VpmcfFlowConfig {
    pub mode: VpmcfMode,
    pub dt_safety: f64,
    pub t_end: f64,
    pub stop_rho_min: f64,
    pub stop_a2_max: f64,
    pub volume_projection: bool,
    pub output_every: usize,
    pub record_a2_growth: f64,
    pub rho_floor: f64,
    pub vol_tol: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VpmcfFit {
    pub t_est: f64,
    pub c_est: f64,
    pub r2: f64,
    pub window_start: f64,
    pub window_end: f64,
    pub convexity: f64,
    pub samples: usize,
    pub classification: VpmcfClassification,
}

/// Opaque profile handle.
pub struct VpmcfProfile(RadialProfile);

/// Opaque trajectory handle.
pub struct VpmcfTrajectory(Trajectory);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> VpmcfStatus {
    match e {
        Error::AxisContact { .. } => VpmcfStatus::AxisContact,
        Error::NonFinite | Error::StepUnderflow(_) | Error::DegenerateFit(_) => VpmcfStatus::NumericalFailure,
        Error::InsufficientHistory(_) | Error::InsufficientBlowupData { .. } => VpmcfStatus::InsufficientData,
        _ => VpmcfStatus::InvalidArgument,
    }
}

/// Run `f`, recording failures and containing panics.
fn guard(f: impl FnOnce() -> Result<(), (VpmcfStatus, String)>) -> VpmcfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => VpmcfStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            VpmcfStatus::Panic
        }
    }
}

fn core(e: Error) -> (VpmcfStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (VpmcfStatus, String) {
    (VpmcfStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (VpmcfStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

/// Copy the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length, 0 when none.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn vpmcf_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Build a profile from `intervals + 1` radii on `[a, b]`.
///
/// # Safety
/// `rho` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vpmcf_profile_new(
    a: f64,
    b: f64,
    dim: usize,
    rho: *const f64,
    len: usize,
    out: *mut *mut VpmcfProfile,
) -> VpmcfStatus {
    guard(|| {
        if rho.is_null() {
            return Err(null("rho"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        if len < 2 {
            return Err((VpmcfStatus::InvalidArgument, format!("need at least 2 radii, got {len}")));
        }
        let values = std::slice::from_raw_parts(rho, len).to_vec();
        let grid = GridSpec::new(a, b, len - 1, dim).map_err(core)?;
        let profile = RadialProfile::new(grid, values, 0.0).map_err(core)?;
        *out = Box::into_raw(Box::new(VpmcfProfile(profile)));
        Ok(())
    })
}

/// # Safety
/// `profile` must be null or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn vpmcf_profile_free(profile: *mut VpmcfProfile) {
    if !profile.is_null() {
        drop(Box::from_raw(profile));
    }
}

/// Number of nodes (`intervals + 1`); 0 for a null handle.
///
/// # Safety
/// `profile` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn vpmcf_profile_len(profile: *const VpmcfProfile) -> usize {
    profile.as_ref().map_or(0, |p| p.0.rho().len())
}

/// Time stamp of the profile.
///
/// # Safety
/// `profile` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn vpmcf_profile_time(profile: *const VpmcfProfile, out: *mut f64) -> VpmcfStatus {
    scalar(profile, out, |p| Ok(p.time()))
}

unsafe fn scalar(
    profile: *const VpmcfProfile,
    out: *mut f64,
    f: impl FnOnce(&RadialProfile) -> Result<f64, Error>,
) -> VpmcfStatus {
    guard(|| {
        let p = deref(profile, "profile")?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = f(&p.0).map_err(core)?;
        Ok(())
    })
}

/// Enclosed volume.
///
/// # Safety
/// `profile` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn vpmcf_profile_volume(profile: *const VpmcfProfile, out: *mut f64) -> VpmcfStatus {
    scalar(profile, out, enclosed_volume)
}

/// Lateral surface area.
///
/// # Safety
/// `profile` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn vpmcf_profile_area(profile: *const VpmcfProfile, out: *mut f64) -> VpmcfStatus {
    scalar(profile, out, surface_area)
}

/// Area-weighted average of the mean curvature.
///
/// # Safety
/// `profile` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn vpmcf_profile_mean_curvature_average(
    profile: *const VpmcfProfile,
    out: *mut f64,
) -> VpmcfStatus {
    scalar(profile, out, |p| averaged_mean_curvature(&curvature_fields(p)?, p))
}

/// Write one nodal field into `out[0..len]`; `len` must equal the node count.
///
/// # Safety
/// `profile` must be a live handle and `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn vpmcf_profile_field(
    profile: *const VpmcfProfile,
    field: VpmcfField,
    out: *mut f64,
    len: usize,
) -> VpmcfStatus {
    guard(|| {
        let p = &deref(profile, "profile")?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        if len != p.rho().len() {
            return Err((VpmcfStatus::OutOfRange, format!("buffer holds {len} values, profile has {}", p.rho().len())));
        }
        let f = curvature_fields(p).map_err(core)?;
        let src: &[f64] = match field {
            VpmcfField::Rho => p.rho(),
            VpmcfField::D1 => &f.d1,
            VpmcfField::D2 => &f.d2,
            VpmcfField::V => &f.v,
            VpmcfField::P => &f.p,
            VpmcfField::Q => &f.q,
            VpmcfField::K => &f.k,
            VpmcfField::H => &f.h,
            VpmcfField::A2 => &f.a2,
            VpmcfField::C3 => &f.c3,
        };
        std::slice::from_raw_parts_mut(out, len).copy_from_slice(src);
        Ok(())
    })
}

fn optional(v: f64) -> Option<f64> {
    (!v.is_nan()).then_some(v)
}

impl From<FlowConfig> for VpmcfFlowConfig {
    fn from(c: FlowConfig) -> Self {
        Self {
            mode: match c.mode {
                FlowMode::VolumePreserving => VpmcfMode::VolumePreserving,
                FlowMode::PlainMcf => VpmcfMode::PlainMcf,
            },
            dt_safety: c.dt_safety,
            t_end: c.t_end,
            stop_rho_min: c.stop_rho_min.unwrap_or(f64::NAN),
            stop_a2_max: c.stop_a2_max.unwrap_or(f64::NAN),
            volume_projection: c.volume_projection,
            output_every: c.output_every,
            record_a2_growth: c.record_a2_growth.unwrap_or(f64::NAN),
            rho_floor: c.rho_floor,
            vol_tol: c.vol_tol,
        }
    }
}

impl From<VpmcfFlowConfig> for FlowConfig {
    fn from(c: VpmcfFlowConfig) -> Self {
        Self {
            mode: match c.mode {
                VpmcfMode::VolumePreserving => FlowMode::VolumePreserving,
                VpmcfMode::PlainMcf => FlowMode::PlainMcf,
            },
            dt_safety: c.dt_safety,
            t_end: c.t_end,
            stop_rho_min: optional(c.stop_rho_min),
            stop_a2_max: optional(c.stop_a2_max),
            volume_projection: c.volume_projection,
            output_every: c.output_every,
            record_a2_growth: optional(c.record_a2_growth),
            rho_floor: c.rho_floor,
            vol_tol: c.vol_tol,
        }
    }
}

/// Fill `out` with the default flow parameters.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vpmcf_flow_config_default(out: *mut VpmcfFlowConfig) -> VpmcfStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = FlowConfig::default().into();
        Ok(())
    })
}

/// Integrate from `initial` until `t_end` or the first singularity.
///
/// # Safety
/// `initial` and `config` must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn vpmcf_run(
    initial: *const VpmcfProfile,
    config: *const VpmcfFlowConfig,
    out: *mut *mut VpmcfTrajectory,
) -> VpmcfStatus {
    guard(|| {
        let p = deref(initial, "initial")?;
        let c = deref(config, "config")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let traj = flow::run(p.0.clone(), &FlowConfig::from(*c)).map_err(core)?;
        *out = Box::into_raw(Box::new(VpmcfTrajectory(traj)));
        Ok(())
    })
}

/// # Safety
/// `traj` must be null or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn vpmcf_trajectory_free(traj: *mut VpmcfTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Number of recorded states; 0 for a null handle.
///
/// # Safety
/// `traj` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn vpmcf_trajectory_len(traj: *const VpmcfTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.0.states.len())
}

/// How the run ended.
///
/// # Safety
/// `traj` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn vpmcf_trajectory_status(
    traj: *const VpmcfTrajectory,
    out: *mut VpmcfRunStatus,
) -> VpmcfStatus {
    guard(|| {
        let t = deref(traj, "traj")?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = match t.0.status {
            Status::Running => VpmcfRunStatus::Running,
            Status::ReachedTEnd => VpmcfRunStatus::ReachedTEnd,
            Status::AxisContact => VpmcfRunStatus::AxisContact,
            Status::CurvatureBlowup => VpmcfRunStatus::CurvatureBlowup,
            Status::StepUnderflow => VpmcfRunStatus::StepUnderflow,
        };
        Ok(())
    })
}

/// Time, averaged mean curvature and a fresh profile handle of state `index`.
/// Any of the output pointers may be null.
///
/// # Safety
/// `traj` must be a live handle; non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn vpmcf_trajectory_state(
    traj: *const VpmcfTrajectory,
    index: usize,
    t: *mut f64,
    h: *mut f64,
    profile: *mut *mut VpmcfProfile,
) -> VpmcfStatus {
    guard(|| {
        let traj = &deref(traj, "traj")?.0;
        let state = traj.states.get(index).ok_or_else(|| {
            (VpmcfStatus::OutOfRange, format!("state {index} out of range (have {})", traj.states.len()))
        })?;
        if !t.is_null() {
            *t = state.t;
        }
        if !h.is_null() {
            *h = state.h;
        }
        if !profile.is_null() {
            *profile = Box::into_raw(Box::new(VpmcfProfile(state.profile.clone())));
        }
        Ok(())
    })
}

fn fit_out(fit: BlowupFit) -> VpmcfFit {
    VpmcfFit {
        t_est: fit.t_est,
        c_est: fit.c_est,
        r2: fit.r2,
        window_start: fit.window.0,
        window_end: fit.window.1,
        convexity: fit.convexity,
        samples: fit.samples,
        classification: match fit.classification {
            Classification::TypeI => VpmcfClassification::TypeI,
            Classification::Inconclusive => VpmcfClassification::Inconclusive,
            Classification::TypeIISuspect => VpmcfClassification::TypeIiSuspect,
        },
    }
}

/// Blow-up rate fit of a singular trajectory.
///
/// # Safety
/// `traj` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn vpmcf_trajectory_fit(traj: *const VpmcfTrajectory, out: *mut VpmcfFit) -> VpmcfStatus {
    guard(|| {
        let t = deref(traj, "traj")?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = fit_out(singularity::fit_type1(&t.0).map_err(core)?);
        Ok(())
    })
}

/// Blow-up rate fit of a recorded `(t, max |A|^2)` series; samples at or
/// below `growth` times the first value are dropped.
///
/// # Safety
/// `t` and `max_a2` must hold `len` doubles each; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vpmcf_fit_series(
    t: *const f64,
    max_a2: *const f64,
    len: usize,
    growth: f64,
    out: *mut VpmcfFit,
) -> VpmcfStatus {
    guard(|| {
        if t.is_null() || max_a2.is_null() {
            return Err(null("series"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let (t, a) = (std::slice::from_raw_parts(t, len), std::slice::from_raw_parts(max_a2, len));
        *out = fit_out(singularity::fit_series(t, a, growth).map_err(core)?);
        Ok(())
    })
}
