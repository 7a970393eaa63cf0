//! Blow-up rate fitting, region classification, parabolic rescaling at the
//! neck and comparison with cylinder/catenoid templates.

use crate::error::{Error, Result};
use crate::flow::{FlowState, Trajectory};
use crate::profile::{GridSpec, RadialProfile};

/// Minimum number of samples in a rate-fit window.
pub const MIN_WINDOW: usize = 10;
/// Samples qualify for the window once `max |A|^2` exceeds this multiple of
/// its initial value.
pub const DEFAULT_GROWTH: f64 = 10.0;
/// `r^2` needed for a type-I verdict.
pub const TYPE_I_R2: f64 = 0.99;
/// Below this `r^2`, convex data is flagged as faster than type I.
pub const TYPE_II_R2: f64 = 0.95;
/// Normalized quadratic coefficient above which the residuals count as
/// systematically convex.
pub const CONVEXITY_LIMIT: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    TypeI,
    Inconclusive,
    TypeIISuspect,
}

impl Classification {
    pub fn name(self) -> &'static str {
        match self {
            Classification::TypeI => "type_I",
            Classification::Inconclusive => "inconclusive",
            Classification::TypeIISuspect => "type_II_suspect",
        }
    }
}

/// Affine fit of `1/max|A|^2` against `t`: `u(t) = (T - t)/C`.
///
/// `t_est > window.1` and `c_est > 0` are guaranteed for a type-I verdict;
/// other verdicts report the raw extrapolation.
#[derive(Debug, Clone, PartialEq)]
pub struct BlowupFit {
    pub t_est: f64,
    pub c_est: f64,
    pub r2: f64,
    pub window: (f64, f64),
    pub classification: Classification,
    /// Quadratic coefficient of `u` over the window in normalized time,
    /// divided by the range of `u`. Positive means `u` bends upward.
    pub convexity: f64,
    pub samples: usize,
}

/// Fit `u = 1/max|A|^2` over every given sample.
pub fn fit_rate(times: &[f64], max_a2: &[f64]) -> Result<BlowupFit> {
    if times.len() != max_a2.len() {
        return Err(Error::InvalidArgument("times and max_a2 differ in length".into()));
    }
    let m = times.len();
    if m < MIN_WINDOW {
        return Err(Error::InsufficientBlowupData { found: m, required: MIN_WINDOW });
    }
    if max_a2.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
        return Err(Error::DegenerateFit("max |A|^2 must be positive".into()));
    }
    let u: Vec<f64> = max_a2.iter().map(|a| 1.0 / a).collect();
    let (t_lo, t_hi) = (times[0], times[m - 1]);
    if !(t_hi > t_lo) {
        return Err(Error::DegenerateFit("window has zero duration".into()));
    }

    let nf = m as f64;
    let t_mean = times.iter().sum::<f64>() / nf;
    let u_mean = u.iter().sum::<f64>() / nf;
    let (mut stt, mut stu, mut suu) = (0.0, 0.0, 0.0);
    for (t, v) in times.iter().zip(&u) {
        let (dt, du) = (t - t_mean, v - u_mean);
        stt += dt * dt;
        stu += dt * du;
        suu += du * du;
    }
    let slope = stu / stt;
    let intercept = u_mean - slope * t_mean;
    if !(slope < 0.0) {
        return Err(Error::DegenerateFit(format!("1/max|A|^2 is not decreasing (slope {slope:e})")));
    }
    let ss_res: f64 = times.iter().zip(&u).map(|(t, v)| (v - intercept - slope * t).powi(2)).sum();
    let r2 = if suu > 0.0 { (1.0 - ss_res / suu).clamp(0.0, 1.0) } else { 1.0 };
    let c_est = -1.0 / slope;
    let t_est = intercept * c_est;

    let span = t_hi - t_lo;
    let s: Vec<f64> = times.iter().map(|t| (t - t_lo) / span).collect();
    let u_range = u.iter().copied().fold(f64::NEG_INFINITY, f64::max) - u.iter().copied().fold(f64::INFINITY, f64::min);
    let convexity = if u_range > 0.0 { quadratic_coefficient(&s, &u) / u_range } else { 0.0 };

    // an affine extrapolation that lands inside the window cannot be type I
    let classification = if t_est > t_hi && r2 >= TYPE_I_R2 && convexity <= CONVEXITY_LIMIT {
        Classification::TypeI
    } else if r2 < TYPE_II_R2 && convexity > CONVEXITY_LIMIT {
        Classification::TypeIISuspect
    } else {
        Classification::Inconclusive
    };
    Ok(BlowupFit { t_est, c_est, r2, window: (t_lo, t_hi), classification, convexity, samples: m })
}

/// Leading coefficient of the least-squares quadratic through `(s, u)`.
fn quadratic_coefficient(s: &[f64], u: &[f64]) -> f64 {
    let mut m = [[0.0; 3]; 3];
    let mut rhs = [0.0; 3];
    for (&x, &y) in s.iter().zip(u) {
        let pow = [1.0, x, x * x];
        for r in 0..3 {
            for c in 0..3 {
                m[r][c] += pow[r] * pow[c];
            }
            rhs[r] += pow[r] * y;
        }
    }
    let det = |a: &[[f64; 3]; 3]| {
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    };
    let d = det(&m);
    if d.abs() < f64::MIN_POSITIVE {
        return 0.0;
    }
    let mut m2 = m;
    for r in 0..3 {
        m2[r][2] = rhs[r];
    }
    det(&m2) / d
}

/// Samples whose `max |A|^2` exceeds `growth` times the first sample.
pub fn blowup_window(times: &[f64], max_a2: &[f64], growth: f64) -> (Vec<f64>, Vec<f64>) {
    let Some(&first) = max_a2.first() else {
        return (vec![], vec![]);
    };
    times.iter().zip(max_a2).filter(|(_, a)| **a > growth * first).map(|(t, a)| (*t, *a)).unzip()
}

/// Fit the blow-up rate over the qualifying tail of a singular trajectory.
pub fn fit_type1(traj: &Trajectory) -> Result<BlowupFit> {
    fit_type1_with_growth(traj, DEFAULT_GROWTH)
}

pub fn fit_type1_with_growth(traj: &Trajectory, growth: f64) -> Result<BlowupFit> {
    if !traj.is_singular() {
        return Err(Error::InvalidArgument(format!(
            "trajectory ended with status {}, not a singularity",
            traj.status.name()
        )));
    }
    let a2: Vec<f64> = traj.states.iter().map(|s| s.field.max_a2()).collect();
    fit_series(&traj.times(), &a2, growth)
}

/// Window a recorded `(t, max |A|^2)` series and fit it.
pub fn fit_series(times: &[f64], max_a2: &[f64], growth: f64) -> Result<BlowupFit> {
    let (t, a) = blowup_window(times, max_a2, growth);
    if t.len() < MIN_WINDOW {
        return Err(Error::InsufficientBlowupData { found: t.len(), required: MIN_WINDOW });
    }
    fit_rate(&t, &a)
}

/// How the zoom factor is chosen when rescaling at the neck.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZoomNorm {
    /// `alpha = 1/min rho`.
    MinRadius,
    /// `alpha = max |A|`.
    MaxCurvature,
}

/// Rescale `(x, rho) -> (alpha (x - center), alpha rho)`.
///
/// The window keeps the nodes with `|x - center| <= half_width / alpha`
/// (the whole profile when `half_width` is `None`), so output samples are
/// the original samples and the scaling relations hold node by node.
pub fn rescale(profile: &RadialProfile, center_x: f64, alpha: f64, half_width: Option<f64>) -> Result<RadialProfile> {
    let grid = profile.grid();
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument(format!("alpha must be positive, got {alpha}")));
    }
    if !(center_x >= grid.a() && center_x <= grid.b()) {
        return Err(Error::InvalidArgument(format!("center {center_x} outside [{}, {}]", grid.a(), grid.b())));
    }
    let dx = grid.dx();
    let last = grid.intervals();
    let (lo, hi) = match half_width {
        None => (0, last),
        Some(w) => {
            let reach = w / alpha;
            let lo = ((center_x - reach - grid.a()) / dx - 1e-9).ceil().max(0.0) as usize;
            let hi = (((center_x + reach - grid.a()) / dx + 1e-9).floor().max(0.0) as usize).min(last);
            (lo, hi)
        }
    };
    let intervals = hi.saturating_sub(lo);
    if intervals < 8 {
        return Err(Error::EmptyWindow { intervals });
    }
    let new_grid =
        GridSpec::new(alpha * (grid.x(lo) - center_x), alpha * (grid.x(hi) - center_x), intervals, grid.dim())?;
    let rho = profile.rho()[lo..=hi].iter().map(|r| alpha * r).collect();
    RadialProfile::new(new_grid, rho, profile.time())
}

/// Neck-centered rescale: center at `argmin rho`, zoom from `norm`.
pub fn rescale_at_neck(
    state: &FlowState,
    norm: ZoomNorm,
    half_width: Option<f64>,
) -> Result<(RadialProfile, f64, f64)> {
    let i = state.profile.argmin();
    let center = state.profile.grid().x(i);
    let alpha = match norm {
        ZoomNorm::MinRadius => 1.0 / state.profile.rho()[i],
        ZoomNorm::MaxCurvature => state.field.max_a2().sqrt(),
    };
    Ok((rescale(&state.profile, center, alpha, half_width)?, center, alpha))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylinderFit {
    pub radius: f64,
    /// RMS deviation divided by `min rho`.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatenoidFit {
    pub c5: f64,
    pub center: f64,
    /// RMS deviation divided by `min rho`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TemplateFit {
    pub cylinder: CylinderFit,
    pub catenoid: Result<CatenoidFit>,
}

impl TemplateFit {
    /// Smaller of the two normalized residuals.
    pub fn best_residual(&self) -> f64 {
        match &self.catenoid {
            Ok(c) => c.residual.min(self.cylinder.residual),
            Err(_) => self.cylinder.residual,
        }
    }
}

pub fn fit_templates(profile: &RadialProfile) -> TemplateFit {
    TemplateFit { cylinder: fit_cylinder(profile), catenoid: fit_catenoid(profile) }
}

pub fn fit_cylinder(profile: &RadialProfile) -> CylinderFit {
    let rho = profile.rho();
    let m = rho.len() as f64;
    let radius = rho.iter().sum::<f64>() / m;
    let rms = (rho.iter().map(|r| (r - radius).powi(2)).sum::<f64>() / m).sqrt();
    CylinderFit { radius, residual: rms / profile.min_rho() }
}

/// One-parameter fit of `c cosh((x - x0)/c)` with `x0` at the profile's
/// minimum and `c` in `[min rho / 2, 2 min rho]`.
pub fn fit_catenoid(profile: &RadialProfile) -> Result<CatenoidFit> {
    let rho = profile.rho();
    let grid = profile.grid();
    let i = profile.argmin();
    if i == 0 || i == rho.len() - 1 || !(rho[i - 1] > rho[i] && rho[i + 1] > rho[i]) {
        return Err(Error::NoInteriorMinimum);
    }
    // vertex of the parabola through the three samples around the minimum
    let (l, c, r) = (rho[i - 1], rho[i], rho[i + 1]);
    let center = grid.x(i) + 0.5 * grid.dx() * (l - r) / (l - 2.0 * c + r);
    let xs = grid.xs();
    let min_rho = profile.min_rho();
    let rms = |c5: f64| {
        let sum: f64 = xs.iter().zip(rho).map(|(x, r)| (r - c5 * ((x - center) / c5).cosh()).powi(2)).sum();
        (sum / rho.len() as f64).sqrt()
    };
    let c5 = golden_section(rms, 0.5 * min_rho, 2.0 * min_rho, 1e-13);
    Ok(CatenoidFit { c5, center, residual: rms(c5) / min_rho })
}

/// Minimizer of a unimodal function on `[lo, hi]`, to relative bracket width `rel_tol`.
fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, rel_tol: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if hi - lo <= rel_tol * hi.abs().max(lo.abs()) {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        x1
    } else {
        x2
    }
}

/// Per-node region labels of one state plus the statistics monitored on them.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionMask {
    /// `H <= c2/2`; the complement is the `H > c2/2` region.
    pub in_breve: Vec<bool>,
    /// `|k|/p <= sqrt(c00 / (2 (c00 - 1)))`; the complement is the steep region.
    pub in_flat: Vec<bool>,
    pub c2_obs: f64,
    pub c00: f64,
    pub flat_threshold: f64,
    /// Smallest `y` on nodes adjacent to a flat/steep interface.
    pub boundary_height_flat: Option<f64>,
    /// Largest `|k|/p` over nodes with `H >= 0`.
    pub max_k_over_p: Option<f64>,
    /// Largest `v` over steep nodes.
    pub max_v_sharp: Option<f64>,
    /// Smallest `y` over `H <= c2/2` nodes.
    pub min_y_breve: Option<f64>,
}

impl RegionMask {
    pub fn in_hat(&self, i: usize) -> bool {
        !self.in_breve[i]
    }

    pub fn in_sharp(&self, i: usize) -> bool {
        !self.in_flat[i]
    }

    pub fn frac_breve(&self) -> f64 {
        fraction(&self.in_breve, true)
    }

    pub fn frac_sharp(&self) -> f64 {
        fraction(&self.in_flat, false)
    }
}

fn fraction(labels: &[bool], value: bool) -> f64 {
    labels.iter().filter(|l| **l == value).count() as f64 / labels.len() as f64
}

pub fn flat_threshold(c00: f64) -> f64 {
    (c00 / (2.0 * (c00 - 1.0))).sqrt()
}

/// Label nodes by the mean-curvature and steepness regions.
pub fn classify_regions(state: &FlowState, c2_obs: f64, c00: f64) -> Result<RegionMask> {
    if !(c2_obs > 0.0) {
        return Err(Error::InvalidArgument(format!("c2_obs must be positive, got {c2_obs}")));
    }
    if !(c00 > 2.0) {
        return Err(Error::InvalidArgument(format!("c00 must exceed 2, got {c00}")));
    }
    let f = &state.field;
    let threshold = flat_threshold(c00);
    let in_breve: Vec<bool> = f.h.iter().map(|&h| h <= 0.5 * c2_obs).collect();
    let ratio: Vec<f64> = f.k.iter().zip(&f.p).map(|(k, p)| k.abs() / p).collect();
    let in_flat: Vec<bool> = ratio.iter().map(|&r| r <= threshold).collect();

    let mut boundary: Option<f64> = None;
    for i in 0..in_flat.len().saturating_sub(1) {
        if in_flat[i] != in_flat[i + 1] {
            let y = f.y[i].min(f.y[i + 1]);
            boundary = Some(boundary.map_or(y, |b| b.min(y)));
        }
    }
    let max_over = |mask: &dyn Fn(usize) -> bool, vals: &[f64]| {
        (0..vals.len()).filter(|&i| mask(i)).map(|i| vals[i]).reduce(f64::max)
    };
    let max_k_over_p = max_over(&|i| f.h[i] >= 0.0, &ratio);
    let max_v_sharp = max_over(&|i| !in_flat[i], &f.v);
    let min_y_breve = (0..f.y.len()).filter(|&i| in_breve[i]).map(|i| f.y[i]).reduce(f64::min);
    Ok(RegionMask {
        in_breve,
        in_flat,
        c2_obs,
        c00,
        flat_threshold: threshold,
        boundary_height_flat: boundary,
        max_k_over_p,
        max_v_sharp,
        min_y_breve,
    })
}
