//! Discrete zero counting for `rho'`, `rho''` and `H` along a trajectory,
//! and tracking of necks (strict local minima of `rho`).
//!
//! `H` is censused in place of `H/p`: `p > 0` on every valid profile, so the
//! two share their sign changes.

use crate::flow::{FlowState, Trajectory};
use crate::profile::mirrored_derivatives;

/// Relative clamping tolerance applied to each field's maximum magnitude.
pub const DEFAULT_CENSUS_TOL: f64 = 1e-8;

/// Clamp floors below which a sample is treated as zero regardless of the
/// field's maximum. Fields that decay to roundoff would otherwise count
/// noise as zeros. `d1` is dimensionless; `d2` and `H` are scaled by the
/// mean radius.
pub const ABSOLUTE_FLOOR: f64 = 1e-10;

/// Number of sign changes after clamping `|value| < tol` to zero.
///
/// A run of clamped samples between opposite signs counts once, between
/// equal signs not at all.
pub fn sign_change_count(values: &[f64], tol: f64) -> usize {
    let mut last_sign = 0i8;
    let mut count = 0;
    for &v in values {
        let s = if v.abs() < tol || v == 0.0 {
            0
        } else if v > 0.0 {
            1
        } else {
            -1
        };
        if s != 0 {
            if last_sign != 0 && s != last_sign {
                count += 1;
            }
            last_sign = s;
        }
    }
    count
}

/// Interpolated positions of the sign changes counted by [`sign_change_count`],
/// with the bracketing sample indices.
fn sign_change_brackets(xs: &[f64], values: &[f64], tol: f64) -> Vec<(f64, usize, usize)> {
    let mut out = Vec::new();
    let mut last: Option<usize> = None;
    for (j, &v) in values.iter().enumerate() {
        if v.abs() < tol || v == 0.0 {
            continue;
        }
        if let Some(i) = last {
            if values[i].signum() != v.signum() {
                let (fi, fj) = (clamp(values[i], tol), v);
                let x = xs[i] + (xs[j] - xs[i]) * fi / (fi - fj);
                out.push((x, i, j));
            }
        }
        last = Some(j);
    }
    out
}

fn clamp(v: f64, tol: f64) -> f64 {
    if v.abs() < tol {
        0.0
    } else {
        v
    }
}

fn field_tol(values: &[f64], rel: f64, floor: f64) -> f64 {
    let max = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    (rel * max).max(floor)
}

/// Zero counts and neck locations at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroCensus {
    pub t: f64,
    pub zeros_d1: usize,
    pub zeros_d2: usize,
    pub zeros_h: usize,
    pub zero_locations_d2: Vec<f64>,
    pub necks: Vec<f64>,
    /// One flag per entry of `zero_locations_d2`: the zero looks multiple
    /// (both `rho''` and its slope are below tolerance there).
    pub multiplicity_flags: Vec<bool>,
}

impl ZeroCensus {
    pub fn multiplicity_count(&self) -> usize {
        self.multiplicity_flags.iter().filter(|f| **f).count()
    }

    pub fn count(&self, q: CensusQuantity) -> usize {
        match q {
            CensusQuantity::D1 => self.zeros_d1,
            CensusQuantity::D2 => self.zeros_d2,
            CensusQuantity::H => self.zeros_h,
        }
    }
}

/// Census over interior nodes. `tol` is relative to each field's maximum.
pub fn zero_census(state: &FlowState, tol: f64) -> ZeroCensus {
    let grid = state.profile.grid();
    let xs = grid.xs();
    let f = &state.field;
    let m = xs.len();
    let inner = 1..m - 1;
    let mean_rho = state.profile.rho().iter().sum::<f64>() / m as f64;
    let curvature_floor = ABSOLUTE_FLOOR / mean_rho;

    let d1 = &f.d1[inner.clone()];
    let d2 = &f.d2[inner.clone()];
    let hh = &f.h[inner.clone()];
    let tol_d1 = field_tol(d1, tol, ABSOLUTE_FLOOR);
    let tol_d2 = field_tol(d2, tol, curvature_floor);
    let tol_h = field_tol(hh, tol, curvature_floor);

    let brackets = sign_change_brackets(&xs[inner.clone()], d2, tol_d2);
    let (slope, _) = mirrored_derivatives(&f.d2, grid.dx());
    let slope_tol = tol * slope.iter().fold(0.0f64, |a, s| a.max(s.abs()));
    let multiplicity_flags = brackets
        .iter()
        .map(|&(_, i, j)| {
            let (i, j) = (i + 1, j + 1);
            let near_zero = f.d2[i].abs().min(f.d2[j].abs()) < tol_d2 * 1e3;
            let secant = (f.d2[j] - f.d2[i]).abs() / (xs[j] - xs[i]);
            near_zero && secant.min(slope[i].abs()).min(slope[j].abs()) < slope_tol
        })
        .collect();

    ZeroCensus {
        t: state.t,
        zeros_d1: sign_change_count(d1, tol_d1),
        zeros_d2: sign_change_count(d2, tol_d2),
        zeros_h: sign_change_count(hh, tol_h),
        zero_locations_d2: brackets.iter().map(|b| b.0).collect(),
        necks: necks(state),
        multiplicity_flags,
    }
}

/// Strict local minima of `rho`, endpoints judged against their mirror ghost.
pub fn necks(state: &FlowState) -> Vec<f64> {
    let rho = state.profile.rho();
    let grid = state.profile.grid();
    let last = rho.len() - 1;
    (0..=last)
        .filter(|&i| {
            let left = if i == 0 { rho[1] } else { rho[i - 1] };
            let right = if i == last { rho[last - 1] } else { rho[i + 1] };
            rho[i] < left && rho[i] < right
        })
        .map(|i| grid.x(i))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CensusQuantity {
    D1,
    D2,
    H,
}

impl CensusQuantity {
    pub const ALL: [CensusQuantity; 3] = [CensusQuantity::D1, CensusQuantity::D2, CensusQuantity::H];

    pub fn name(self) -> &'static str {
        match self {
            CensusQuantity::D1 => "zeros_d1",
            CensusQuantity::D2 => "zeros_d2",
            CensusQuantity::H => "zeros_H",
        }
    }
}

/// A recorded increase in a zero count.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub quantity: CensusQuantity,
    pub t: f64,
    pub before: usize,
    pub after: usize,
}

pub fn censuses(traj: &Trajectory, tol: f64) -> Vec<ZeroCensus> {
    traj.states.iter().map(|s| zero_census(s, tol)).collect()
}

/// Times at which a zero count strictly increases.
///
/// An increase only counts if it persists into the next recorded state;
/// an increase at the final state cannot be confirmed and is ignored.
pub fn monotonicity_report(censuses: &[ZeroCensus]) -> Vec<Violation> {
    let mut out = Vec::new();
    for q in CensusQuantity::ALL {
        let counts: Vec<usize> = censuses.iter().map(|c| c.count(q)).collect();
        for i in 1..counts.len().saturating_sub(1) {
            let base = counts[i - 1];
            if counts[i] > base && counts[i + 1] > base {
                out.push(Violation { quantity: q, t: censuses[i].t, before: base, after: counts[i] });
            }
        }
    }
    out
}

/// Position history of one neck.
#[derive(Debug, Clone, PartialEq)]
pub struct NeckSeries {
    pub times: Vec<f64>,
    pub positions: Vec<f64>,
    pub converged: bool,
    /// The neck vanished before the final census.
    pub lost: bool,
}

/// Link necks across consecutive censuses by nearest position (cutoff
/// `5 dx`). A series is converged when its last quarter of positions spans
/// less than `3 dx`.
pub fn neck_convergence(censuses: &[ZeroCensus], dx: f64) -> Vec<NeckSeries> {
    let cutoff = 5.0 * dx;
    let mut series: Vec<NeckSeries> = Vec::new();
    let mut active: Vec<usize> = Vec::new();
    for c in censuses {
        let mut taken = vec![false; c.necks.len()];
        let mut still_active = Vec::new();
        for &s in &active {
            let prev = *series[s].positions.last().unwrap();
            let best = c
                .necks
                .iter()
                .enumerate()
                .filter(|(j, x)| !taken[*j] && (**x - prev).abs() <= cutoff)
                .min_by(|a, b| (a.1 - prev).abs().total_cmp(&(b.1 - prev).abs()));
            match best {
                Some((j, &x)) => {
                    taken[j] = true;
                    series[s].times.push(c.t);
                    series[s].positions.push(x);
                    still_active.push(s);
                }
                None => series[s].lost = true,
            }
        }
        for (j, &x) in c.necks.iter().enumerate() {
            if !taken[j] {
                series.push(NeckSeries { times: vec![c.t], positions: vec![x], converged: false, lost: false });
                still_active.push(series.len() - 1);
            }
        }
        active = still_active;
    }
    for s in &mut series {
        let m = s.positions.len();
        let tail = &s.positions[m - (m / 4).max(1)..];
        let lo = tail.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        s.converged = hi - lo < 3.0 * dx;
    }
    series
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{FlowMode, FlowState};
    use crate::profile::{GridSpec, RadialProfile};
    use std::f64::consts::PI;

    #[test]
    fn counts_from_examples() {
        assert_eq!(sign_change_count(&[1.0, 0.5, -0.2, -0.1, 0.3], 0.0), 2);
        assert_eq!(sign_change_count(&[1.0, 1e-12, -1.0], 1e-9), 1);
        let alt: Vec<f64> = (0..9).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        assert_eq!(sign_change_count(&alt, 0.0), 8);
        assert_eq!(sign_change_count(&[1.0, 0.0, 0.0, 1.0], 0.0), 0);
        assert_eq!(sign_change_count(&[], 0.0), 0);
    }

    fn state(f: impl Fn(f64) -> f64, n: usize) -> FlowState {
        let p = RadialProfile::from_fn(GridSpec::new(0.0, 1.0, n, 2).unwrap(), f).unwrap();
        FlowState::new(p, FlowMode::VolumePreserving, 1e-12).unwrap()
    }

    #[test]
    fn cylinder_census_is_empty() {
        let c = zero_census(&state(|_| 1.0, 64), DEFAULT_CENSUS_TOL);
        assert_eq!((c.zeros_d1, c.zeros_d2, c.zeros_h), (0, 0, 0));
        assert!(c.necks.is_empty());
    }

    #[test]
    fn dumbbell_census_matches_symbolic_zeros() {
        // rho = 1 + 0.5 cos(2 pi x): rho' = -pi sin(2 pi x) vanishes inside
        // only at 1/2; rho'' = -2 pi^2 cos(2 pi x) at 1/4 and 3/4; the only
        // strict minimum is the midpoint.
        // H = k + p changes sign where 2 pi^2 cos(2 pi x) / v^3 = -1/(rho v);
        // solved by bisection as the oracle below.
        let n = 200;
        let c = zero_census(&state(|x| 1.0 + 0.5 * (2.0 * PI * x).cos(), n), DEFAULT_CENSUS_TOL);
        assert_eq!(c.zeros_d1, 1);
        assert_eq!(c.zeros_d2, 2);
        assert_eq!(c.necks, vec![0.5]);
        assert!((c.zero_locations_d2[0] - 0.25).abs() < 1e-3);
        assert!((c.zero_locations_d2[1] - 0.75).abs() < 1e-3);
        let h = |x: f64| {
            let s = 2.0 * PI * x;
            let (r, r1, r2) = (1.0 + 0.5 * s.cos(), -PI * s.sin(), -2.0 * PI * PI * s.cos());
            let v = (1.0 + r1 * r1).sqrt();
            -r2 / (v * v * v) + 1.0 / (r * v)
        };
        let mut roots = 0;
        let m = 20000;
        for i in 1..m - 1 {
            let (a, b) = (i as f64 / m as f64, (i + 1) as f64 / m as f64);
            if h(a) * h(b) < 0.0 {
                roots += 1;
            }
        }
        assert_eq!(c.zeros_h, roots);
        assert!(c.multiplicity_flags.iter().all(|f| !f));
    }

    #[test]
    fn d2_zeros_match_k_zeros() {
        let s = state(|x| 1.0 + 0.3 * (6.0 * PI * x).cos() + 0.1 * (2.0 * PI * x).sin().powi(2), 256);
        let inner = 1..256;
        assert_eq!(sign_change_count(&s.field.d2[inner.clone()], 0.0), sign_change_count(&s.field.k[inner], 0.0));
    }

    fn census(t: f64, d2: usize, necks: Vec<f64>) -> ZeroCensus {
        ZeroCensus {
            t,
            zeros_d1: 0,
            zeros_d2: d2,
            zeros_h: 0,
            zero_locations_d2: vec![],
            necks,
            multiplicity_flags: vec![],
        }
    }

    #[test]
    fn report_uses_hysteresis() {
        let flicker = [census(0.0, 2, vec![]), census(1.0, 3, vec![]), census(2.0, 2, vec![]), census(3.0, 3, vec![])];
        assert!(monotonicity_report(&flicker).is_empty());
        let real = [census(0.0, 2, vec![]), census(1.0, 4, vec![]), census(2.0, 3, vec![]), census(3.0, 3, vec![])];
        let v = monotonicity_report(&real);
        assert_eq!(v.len(), 1);
        assert_eq!((v[0].t, v[0].before, v[0].after), (1.0, 2, 4));
    }

    #[test]
    fn neck_tracking() {
        let dx = 0.01;
        let cs: Vec<ZeroCensus> = (0..8).map(|i| census(i as f64, 0, vec![0.25 + 0.001 * i as f64, 0.75])).collect();
        let series = neck_convergence(&cs, dx);
        assert_eq!(series.len(), 2);
        assert!(series.iter().all(|s| s.converged && !s.lost && s.positions.len() == 8));

        let jump = [census(0.0, 0, vec![0.5]), census(1.0, 0, vec![0.8])];
        let series = neck_convergence(&jump, dx);
        assert_eq!(series.len(), 2);
        assert!(series[0].lost);
    }
}
