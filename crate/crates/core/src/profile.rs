//! Discretized generating curve of an axially symmetric hypersurface.
//!
//! A profile `rho(x)` on `[a, b]` is rotated about the `x`-axis to give an
//! `n`-dimensional hypersurface in `R^{n+1}`. The grid is uniform and the
//! Neumann condition `rho'(a) = rho'(b) = 0` is realized with mirror ghost
//! nodes, `rho[-1] = rho[1]` and `rho[N+1] = rho[N-1]`.

use crate::error::{Error, Result};

/// Default guard below which a radius counts as contact with the axis.
pub const DEFAULT_RHO_FLOOR: f64 = 1e-12;

/// Uniform grid over `[a, b]` plus the dimension of the evolving surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    a: f64,
    b: f64,
    intervals: usize,
    dim: usize,
}

impl GridSpec {
    pub fn new(a: f64, b: f64, intervals: usize, dim: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || b <= a {
            return Err(Error::InvalidGrid(format!("need a < b, got [{a}, {b}]")));
        }
        if intervals < 8 {
            return Err(Error::InvalidGrid(format!("need at least 8 intervals, got {intervals}")));
        }
        if dim < 2 {
            return Err(Error::InvalidGrid(format!("surface dimension must be >= 2, got {dim}")));
        }
        Ok(Self { a, b, intervals, dim })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Number of intervals `N`; the grid has `N + 1` nodes.
    pub fn intervals(&self) -> usize {
        self.intervals
    }

    /// Surface dimension `n`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nodes(&self) -> usize {
        self.intervals + 1
    }

    pub fn dx(&self) -> f64 {
        (self.b - self.a) / self.intervals as f64
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    pub fn x(&self, i: usize) -> f64 {
        if i == self.intervals {
            self.b
        } else {
            self.a + i as f64 * self.dx()
        }
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.nodes()).map(|i| self.x(i)).collect()
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.a + self.b)
    }
}

/// Sampled profile `rho` on a [`GridSpec`], with the time it belongs to.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    grid: GridSpec,
    rho: Vec<f64>,
    time: f64,
}

impl RadialProfile {
    pub fn new(grid: GridSpec, rho: Vec<f64>, time: f64) -> Result<Self> {
        if rho.len() != grid.nodes() {
            return Err(Error::InvalidProfile(format!("expected {} samples, got {}", grid.nodes(), rho.len())));
        }
        if let Some((i, r)) = rho.iter().enumerate().find(|(_, r)| !(r.is_finite() && **r > 0.0)) {
            return Err(Error::InvalidProfile(format!("rho[{i}] = {r} is not positive")));
        }
        if !(time.is_finite() && time >= 0.0) {
            return Err(Error::InvalidProfile(format!("time {time} must be >= 0")));
        }
        Ok(Self { grid, rho, time })
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64) -> f64) -> Result<Self> {
        let rho = (0..grid.nodes()).map(|i| f(grid.x(i))).collect();
        Self::new(grid, rho, 0.0)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    pub fn min_rho(&self) -> f64 {
        self.rho.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn argmin(&self) -> usize {
        let mut best = 0;
        for (i, &r) in self.rho.iter().enumerate() {
            if r < self.rho[best] {
                best = i;
            }
        }
        best
    }

    pub(crate) fn into_parts(self) -> (GridSpec, Vec<f64>, f64) {
        (self.grid, self.rho, self.time)
    }

    /// Construct without validation; callers guarantee the invariants.
    pub(crate) fn from_parts_unchecked(grid: GridSpec, rho: Vec<f64>, time: f64) -> Self {
        debug_assert_eq!(rho.len(), grid.nodes());
        Self { grid, rho, time }
    }
}

/// Centered first and second differences of samples on a uniform grid with
/// mirror ghosts at both ends. Works for any Neumann field, not just `rho`.
pub fn mirrored_derivatives(values: &[f64], dx: f64) -> (Vec<f64>, Vec<f64>) {
    let m = values.len();
    assert!(m >= 3, "need at least 3 samples");
    let last = m - 1;
    let mut d1 = vec![0.0; m];
    let mut d2 = vec![0.0; m];
    let inv2dx = 0.5 / dx;
    let invdx2 = 1.0 / (dx * dx);
    for i in 1..last {
        d1[i] = (values[i + 1] - values[i - 1]) * inv2dx;
        d2[i] = (values[i + 1] - 2.0 * values[i] + values[i - 1]) * invdx2;
    }
    d2[0] = 2.0 * (values[1] - values[0]) * invdx2;
    d2[last] = 2.0 * (values[last - 1] - values[last]) * invdx2;
    (d1, d2)
}

/// `(rho', rho'')` at every node; `rho'` vanishes exactly at both ends.
pub fn derivatives(profile: &RadialProfile) -> (Vec<f64>, Vec<f64>) {
    mirrored_derivatives(&profile.rho, profile.grid.dx())
}

/// Pointwise geometric quantities of a profile.
///
/// `p` is the principal curvature of the `n - 1` rotational directions, `k`
/// the one along the profile, `q = -rho'/(rho v)` uses the outward normal.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureField {
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
    pub y: Vec<f64>,
    pub v: Vec<f64>,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub k: Vec<f64>,
    pub h: Vec<f64>,
    pub a2: Vec<f64>,
    pub c3: Vec<f64>,
}

impl CurvatureField {
    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn max_a2(&self) -> f64 {
        max_of(&self.a2)
    }

    pub fn max_v(&self) -> f64 {
        max_of(&self.v)
    }

    pub fn max_vy(&self) -> f64 {
        self.v.iter().zip(&self.y).map(|(v, y)| v * y).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_h(&self) -> f64 {
        max_of(&self.h)
    }

    pub fn min_h(&self) -> f64 {
        self.h.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

#[inline]
pub(crate) fn int_pow(x: f64, e: i32) -> f64 {
    match e {
        0 => 1.0,
        1 => x,
        2 => x * x,
        _ => x.powi(e),
    }
}

pub(crate) fn max_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Curvature fields with the default axis guard.
pub fn curvature_fields(profile: &RadialProfile) -> Result<CurvatureField> {
    curvature_fields_with_floor(profile, DEFAULT_RHO_FLOOR)
}

pub fn curvature_fields_with_floor(profile: &RadialProfile, rho_floor: f64) -> Result<CurvatureField> {
    check_floor(&profile.rho, rho_floor)?;
    let n1 = (profile.grid.dim - 1) as f64;
    let (d1, d2) = derivatives(profile);
    let m = profile.rho.len();
    let mut field = CurvatureField {
        y: profile.rho.clone(),
        v: Vec::with_capacity(m),
        p: Vec::with_capacity(m),
        q: Vec::with_capacity(m),
        k: Vec::with_capacity(m),
        h: Vec::with_capacity(m),
        a2: Vec::with_capacity(m),
        c3: Vec::with_capacity(m),
        d1: Vec::new(),
        d2: Vec::new(),
    };
    for i in 0..m {
        let w = 1.0 + d1[i] * d1[i];
        let v = w.sqrt();
        let rv = profile.rho[i] * v;
        let p = 1.0 / rv;
        let q = -d1[i] / rv;
        let k = -d2[i] / (w * v);
        field.v.push(v);
        field.p.push(p);
        field.q.push(q);
        field.k.push(k);
        field.h.push(k + n1 * p);
        field.a2.push(k * k + n1 * p * p);
        field.c3.push(k * k * k + n1 * p * p * p);
    }
    field.d1 = d1;
    field.d2 = d2;
    Ok(field)
}

pub(crate) fn check_floor(rho: &[f64], rho_floor: f64) -> Result<()> {
    for (index, &r) in rho.iter().enumerate() {
        if !r.is_finite() {
            return Err(Error::NonFinite);
        }
        if r <= rho_floor {
            return Err(Error::AxisContact { index, rho: r });
        }
    }
    Ok(())
}

/// Area of the unit `k`-sphere in `R^{k+1}`.
pub fn unit_sphere_area(k: usize) -> f64 {
    use std::f64::consts::PI;
    match k {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (k - 1) as f64 * unit_sphere_area(k - 2),
    }
}

/// Composite Simpson rule over uniformly spaced samples.
pub fn simpson(values: &[f64], dx: f64) -> Result<f64> {
    let intervals = values.len().saturating_sub(1);
    if intervals == 0 || intervals % 2 == 1 {
        return Err(Error::OddIntervalCount(intervals));
    }
    Ok(simpson_weighted_sum(values.len(), |i| values[i]) * dx / 3.0)
}

/// `sum_i w_i f(i)` with Simpson weights `1, 4, 2, ..., 4, 1` (unscaled).
pub(crate) fn simpson_weighted_sum(nodes: usize, f: impl Fn(usize) -> f64) -> f64 {
    let last = nodes - 1;
    let mut sum = f(0) + f(last);
    for i in 1..last {
        sum += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i);
    }
    sum
}

/// Volume enclosed by the rotated profile between the two planes.
pub fn enclosed_volume(profile: &RadialProfile) -> Result<f64> {
    let n = profile.grid.dim;
    let integrand: Vec<f64> = profile.rho.iter().map(|r| int_pow(*r, n as i32)).collect();
    Ok(unit_sphere_area(n - 1) / n as f64 * simpson(&integrand, profile.grid.dx())?)
}

/// Lateral area of the rotated profile.
pub fn surface_area(profile: &RadialProfile) -> Result<f64> {
    let n = profile.grid.dim;
    let (d1, _) = derivatives(profile);
    let integrand: Vec<f64> =
        profile.rho.iter().zip(&d1).map(|(r, d)| int_pow(*r, n as i32 - 1) * (1.0 + d * d).sqrt()).collect();
    Ok(unit_sphere_area(n - 1) * simpson(&integrand, profile.grid.dx())?)
}

/// Area-weighted mean of `H`, i.e. the `h(t)` that drives the constrained flow.
pub fn averaged_mean_curvature(field: &CurvatureField, profile: &RadialProfile) -> Result<f64> {
    if field.len() != profile.rho.len() {
        return Err(Error::GridMismatch);
    }
    let intervals = profile.grid.intervals;
    if intervals % 2 == 1 {
        return Err(Error::OddIntervalCount(intervals));
    }
    let n1 = profile.grid.dim as i32 - 1;
    Ok(weighted_mean_h(&profile.rho, &field.v, &field.h, n1))
}

pub(crate) fn weighted_mean_h(rho: &[f64], v: &[f64], h: &[f64], n1: i32) -> f64 {
    let weight = |i: usize| int_pow(rho[i], n1) * v[i];
    let num = simpson_weighted_sum(rho.len(), |i| h[i] * weight(i));
    let den = simpson_weighted_sum(rho.len(), weight);
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid(a: f64, b: f64, n: usize, dim: usize) -> GridSpec {
        GridSpec::new(a, b, n, dim).unwrap()
    }

    #[test]
    fn grid_rejects_bad_input() {
        assert!(GridSpec::new(1.0, 0.0, 16, 2).is_err());
        assert!(GridSpec::new(0.0, 1.0, 7, 2).is_err());
        assert!(GridSpec::new(0.0, 1.0, 16, 1).is_err());
        let g = grid(0.0, 1.0, 16, 2);
        assert_eq!(g.x(16), 1.0);
        assert_eq!(g.nodes(), 17);
    }

    #[test]
    fn profile_rejects_nonpositive() {
        let g = grid(0.0, 1.0, 8, 2);
        let mut rho = vec![1.0; 9];
        rho[3] = 0.0;
        assert!(RadialProfile::new(g, rho, 0.0).is_err());
        assert!(RadialProfile::new(g, vec![1.0; 8], 0.0).is_err());
    }

    #[test]
    fn constant_profile_has_zero_derivatives() {
        let p = RadialProfile::from_fn(grid(0.0, 3.0, 30, 2), |_| 1.7).unwrap();
        let (d1, d2) = derivatives(&p);
        assert!(d1.iter().chain(&d2).all(|&d| d == 0.0));
    }

    #[test]
    fn cosine_derivatives_match_symbolic() {
        // rho = 2 + cos(2 pi x): rho' = -2 pi sin, rho'' = -4 pi^2 cos
        let err = |n: usize| {
            let g = grid(0.0, 1.0, n, 2);
            let p = RadialProfile::from_fn(g, |x| 2.0 + (2.0 * PI * x).cos()).unwrap();
            let (d1, d2) = derivatives(&p);
            assert_eq!(d1[0], 0.0);
            assert_eq!(d1[n], 0.0);
            let mut e1: f64 = 0.0;
            let mut e2: f64 = 0.0;
            for i in 0..=n {
                let x = g.x(i);
                e1 = e1.max((d1[i] + 2.0 * PI * (2.0 * PI * x).sin()).abs());
                e2 = e2.max((d2[i] + 4.0 * PI * PI * (2.0 * PI * x).cos()).abs());
            }
            (e1, e2, d2[0])
        };
        let (e1, e2, d2_0) = err(512);
        assert!(e1 <= 1e-3 && e2 <= 1e-3, "{e1} {e2}");
        assert!((d2_0 + 4.0 * PI * PI).abs() < 1e-3);
        let (_, e2_fine, _) = err(1024);
        let ratio = e2 / e2_fine;
        assert!((ratio - 4.0).abs() <= 0.4, "ratio {ratio}");
    }

    #[test]
    fn cylinder_fields() {
        for dim in 2..6 {
            let r = 0.8;
            let p = RadialProfile::from_fn(grid(0.0, 1.0, 16, dim), |_| r).unwrap();
            let f = curvature_fields(&p).unwrap();
            let n1 = (dim - 1) as f64;
            for i in 0..f.len() {
                assert_eq!(f.v[i], 1.0);
                assert_eq!(f.q[i], 0.0);
                assert_eq!(f.k[i], 0.0);
                assert!((f.h[i] - n1 / r).abs() < 1e-14);
                assert!((f.a2[i] - n1 / (r * r)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn cosine_fields_at_left_plane() {
        let p = RadialProfile::from_fn(grid(0.0, 1.0, 512, 2), |x| 2.0 + (2.0 * PI * x).cos()).unwrap();
        let f = curvature_fields(&p).unwrap();
        assert_eq!(f.v[0], 1.0);
        assert!((f.p[0] - 1.0 / 3.0).abs() < 1e-3);
        assert!((f.k[0] - 4.0 * PI * PI).abs() < 1e-3);
        assert!((f.h[0] - (4.0 * PI * PI + 1.0 / 3.0)).abs() < 1e-3);
    }

    #[test]
    fn axis_contact_is_reported() {
        let p = RadialProfile::from_fn(grid(0.0, 1.0, 16, 2), |x| 1e-13 + x).unwrap();
        assert!(matches!(curvature_fields(&p), Err(Error::AxisContact { index: 0, .. })));
    }

    #[test]
    fn sphere_areas() {
        assert!((unit_sphere_area(2) - 4.0 * PI).abs() < 1e-14);
        assert!((unit_sphere_area(3) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((unit_sphere_area(4) - 8.0 * PI * PI / 3.0).abs() < 1e-13);
    }

    #[test]
    fn volume_and_area_of_cylinders() {
        let p = RadialProfile::from_fn(grid(0.0, 1.0, 16, 2), |_| 1.0).unwrap();
        assert!((enclosed_volume(&p).unwrap() - PI).abs() < 1e-14);
        assert!((surface_area(&p).unwrap() - 2.0 * PI).abs() < 1e-14);
        let p = RadialProfile::from_fn(grid(0.0, 2.5, 20, 2), |_| 0.3).unwrap();
        assert!((surface_area(&p).unwrap() - 2.0 * PI * 0.3 * 2.5).abs() < 1e-13);
    }

    #[test]
    fn linear_profile_volume_is_exact() {
        // pi * int_0^1 (x+1)^2 dx = 7 pi / 3, cubic-exact for Simpson
        let p = RadialProfile::from_fn(grid(0.0, 1.0, 8, 2), |x| x + 1.0).unwrap();
        assert!((enclosed_volume(&p).unwrap() - 7.0 * PI / 3.0).abs() < 1e-13);
    }

    #[test]
    fn odd_interval_count_is_rejected() {
        let p = RadialProfile::from_fn(grid(0.0, 1.0, 9, 2), |_| 1.0).unwrap();
        assert_eq!(enclosed_volume(&p), Err(Error::OddIntervalCount(9)));
        assert_eq!(surface_area(&p), Err(Error::OddIntervalCount(9)));
    }

    #[test]
    fn volume_quadrature_is_fourth_order() {
        // pi * int_0^1 (2 + cos 2 pi x + x/10)^2 dx = pi * (4.5 + 0.2 + 1/300)
        let exact = PI * (4.5 + 0.2 + 0.01 / 3.0);
        let err = |n| {
            let p = RadialProfile::from_fn(grid(0.0, 1.0, n, 2), |x| 2.0 + (2.0 * PI * x).cos() + 0.1 * x).unwrap();
            (enclosed_volume(&p).unwrap() - exact).abs()
        };
        let ratio = err(16) / err(32);
        assert!(ratio > 12.0, "ratio {ratio}");
    }

    #[test]
    fn cylinder_h_bar() {
        let p = RadialProfile::from_fn(grid(0.0, 1.0, 16, 2), |_| 0.7).unwrap();
        let f = curvature_fields(&p).unwrap();
        assert!((averaged_mean_curvature(&f, &p).unwrap() - 1.0 / 0.7).abs() < 1e-14);
    }

    #[test]
    fn h_bar_matches_fine_trapezoid() {
        // independent oracle: analytic H, trapezoid rule on 2^16 intervals
        let n = 1usize << 16;
        let dx = 1.0 / n as f64;
        let (mut num, mut den) = (0.0, 0.0);
        for i in 0..=n {
            let x = i as f64 * dx;
            let s = 2.0 * PI * x;
            let r = 2.0 + s.cos();
            let r1 = -2.0 * PI * s.sin();
            let r2 = -4.0 * PI * PI * s.cos();
            let v = (1.0 + r1 * r1).sqrt();
            let h = -r2 / (v * v * v) + 1.0 / (r * v);
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            num += w * h * r * v;
            den += w * r * v;
        }
        let oracle = num / den;
        let p = RadialProfile::from_fn(grid(0.0, 1.0, 4096, 2), |x| 2.0 + (2.0 * PI * x).cos()).unwrap();
        let f = curvature_fields(&p).unwrap();
        let h = averaged_mean_curvature(&f, &p).unwrap();
        assert!((h - oracle).abs() < 1e-6, "{h} vs {oracle}");
        assert!(h >= f.min_h() && h <= f.max_h());
    }
}
