//! Surface operators for rotationally symmetric scalar fields and residuals
//! of the intrinsic evolution equations along a computed trajectory.

use crate::error::{Error, Result};
use crate::flow::FlowState;
use crate::profile::{check_floor, derivatives, mirrored_derivatives, RadialProfile, DEFAULT_RHO_FLOOR};

/// Nodal values of a rotationally symmetric function on the surface.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub values: Vec<f64>,
    pub units: String,
}

impl ScalarField {
    pub fn new(values: Vec<f64>, units: impl Into<String>) -> Self {
        Self { values, units: units.into() }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Maximum magnitude over nodes `1..N`, skipping both planes.
    pub fn max_abs_interior(&self) -> f64 {
        let m = self.values.len();
        self.values[1..m - 1].iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }
}

/// Laplace-Beltrami operator of `f` on the surface of revolution.
///
/// In the profile coordinate:
/// `f''/v^2 + f' * ((n-1) rho'/(rho v^2) - rho' rho''/v^4)`, with `f`
/// mirrored across both planes like `rho`.
pub fn surface_laplacian(profile: &RadialProfile, f: &ScalarField) -> Result<ScalarField> {
    if f.values.len() != profile.rho().len() {
        return Err(Error::GridMismatch);
    }
    check_floor(profile.rho(), DEFAULT_RHO_FLOOR)?;
    let (r1, r2) = derivatives(profile);
    let (f1, f2) = mirrored_derivatives(&f.values, profile.grid().dx());
    Ok(ScalarField::new(laplacian_from_parts(profile, &r1, &r2, &f1, &f2), format!("{}/length^2", f.units)))
}

fn laplacian_from_parts(profile: &RadialProfile, r1: &[f64], r2: &[f64], f1: &[f64], f2: &[f64]) -> Vec<f64> {
    let n1 = (profile.grid().dim() - 1) as f64;
    profile
        .rho()
        .iter()
        .enumerate()
        .map(|(i, &rho)| {
            let w = 1.0 + r1[i] * r1[i];
            let drift = n1 * r1[i] / (rho * w) - r1[i] * r2[i] / (w * w);
            f2[i] / w + f1[i] * drift
        })
        .collect()
}

/// Quantities with a checkable evolution equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantity {
    Y,
    H,
    V,
    P,
    Q,
    K,
}

impl Quantity {
    pub const ALL: [Quantity; 6] = [Quantity::Y, Quantity::H, Quantity::V, Quantity::P, Quantity::Q, Quantity::K];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::Y => "y",
            Quantity::H => "H",
            Quantity::V => "v",
            Quantity::P => "p",
            Quantity::Q => "q",
            Quantity::K => "k",
        }
    }

    fn values(self, state: &FlowState) -> &[f64] {
        let f = &state.field;
        match self {
            Quantity::Y => &f.y,
            Quantity::H => &f.h,
            Quantity::V => &f.v,
            Quantity::P => &f.p,
            Quantity::Q => &f.q,
            Quantity::K => &f.k,
        }
    }
}

impl std::str::FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Quantity::ALL
            .into_iter()
            .find(|q| q.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown quantity {s:?}")))
    }
}

/// Pointwise `|LHS - RHS|` of the evolution equation for `quantity`, taken
/// at the middle of the last three states.
///
/// The equations follow points moving along the normal; the solver moves
/// nodes vertically at fixed `x`. A normally moving point drifts in `x` at
/// speed `(H - h) rho'/v`, so the normal-time derivative is
/// `f_t + (H - h) (rho'/v) f'`. Endpoints are reported as 0.
pub fn evolution_residual(states: &[FlowState], quantity: Quantity) -> Result<ScalarField> {
    if states.len() < 3 {
        return Err(Error::InsufficientHistory(states.len()));
    }
    let [prev, mid, next] = &states[states.len() - 3..] else { unreachable!() };
    if prev.profile.grid() != mid.profile.grid() || mid.profile.grid() != next.profile.grid() {
        return Err(Error::GridMismatch);
    }
    let dt_back = mid.t - prev.t;
    let dt_fwd = next.t - mid.t;
    if !(dt_back > 0.0) || (dt_fwd - dt_back).abs() > 1e-9 * dt_back.max(dt_fwd) {
        return Err(Error::UnequalSpacing);
    }
    let dt = 0.5 * (dt_back + dt_fwd);

    let profile = &mid.profile;
    let grid = profile.grid();
    let n1 = (grid.dim() - 1) as f64;
    let field = &mid.field;
    let h = mid.h;
    let f = quantity.values(mid);
    let (f1, f2) = mirrored_derivatives(f, grid.dx());
    let lap = laplacian_from_parts(profile, &field.d1, &field.d2, &f1, &f2);
    let before = quantity.values(prev);
    let after = quantity.values(next);

    let m = f.len();
    let mut out = vec![0.0; m];
    for i in 1..m - 1 {
        let (y, v, p, q, k, hh, a2) =
            (field.y[i], field.v[i], field.p[i], field.q[i], field.k[i], field.h[i], field.a2[i]);
        let normal_dt = (after[i] - before[i]) / (2.0 * dt) + (hh - h) * field.d1[i] / v * f1[i];
        let rhs = match quantity {
            Quantity::Y => lap[i] - n1 / y + h * p * y,
            Quantity::H => lap[i] + (hh - h) * a2,
            Quantity::V => {
                let grad_v2 = f1[i] * f1[i] / (v * v);
                lap[i] - a2 * v + n1 * v / (y * y) - 2.0 / v * grad_v2
            }
            Quantity::P => lap[i] + a2 * p + 2.0 * q * q * (k - p) - h * p * p,
            Quantity::Q => lap[i] + a2 * q + q * (n1 * p * p + (n1 - 2.0) * q * q - 2.0 * k * p) - h * p * q,
            Quantity::K => lap[i] + a2 * k - 2.0 * n1 * q * q * (k - p) - h * k * k,
        };
        out[i] = (normal_dt - rhs).abs();
    }
    Ok(ScalarField::new(out, format!("d{}/dt", quantity.name())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::GridSpec;
    use std::f64::consts::PI;

    fn profile(n: usize, f: impl Fn(f64) -> f64) -> RadialProfile {
        RadialProfile::from_fn(GridSpec::new(0.0, 1.0, n, 2).unwrap(), f).unwrap()
    }

    #[test]
    fn laplacian_of_constant_vanishes() {
        let p = profile(64, |x| 2.0 + (2.0 * PI * x).cos());
        let f = ScalarField::new(vec![3.5; 65], "1");
        let lap = surface_laplacian(&p, &f).unwrap();
        assert!(lap.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn laplacian_on_cylinder_is_second_derivative() {
        let n = 512;
        let p = profile(n, |_| 1.0);
        let g = *p.grid();
        let f = ScalarField::new(g.xs().iter().map(|x| (2.0 * PI * x).cos()).collect(), "1");
        let lap = surface_laplacian(&p, &f).unwrap();
        let err = g
            .xs()
            .iter()
            .zip(&lap.values)
            .map(|(x, l)| (l + 4.0 * PI * PI * (2.0 * PI * x).cos()).abs())
            .fold(0.0, f64::max);
        assert!(err <= 1e-3, "{err}");
    }

    #[test]
    fn laplacian_converges_at_second_order() {
        // refinement oracle: compare against the N = 4096 result at shared nodes
        let compute = |n: usize| {
            let p = profile(n, |x| 2.0 + (2.0 * PI * x).cos());
            let f: Vec<f64> = p.grid().xs().iter().map(|x| (PI * x).sin().powi(2)).collect();
            surface_laplacian(&p, &ScalarField::new(f, "1")).unwrap().values
        };
        let fine = compute(4096);
        let err = |n: usize| {
            let coarse = compute(n);
            let stride = 4096 / n;
            coarse.iter().enumerate().map(|(i, c)| (c - fine[i * stride]).abs()).fold(0.0, f64::max)
        };
        let (e1, e2, e3) = (err(64), err(128), err(256));
        for r in [e1 / e2, e2 / e3] {
            assert!((3.4..=4.6).contains(&r), "ratios {} {}", e1 / e2, e2 / e3);
        }
    }

    #[test]
    fn quantity_parse() {
        assert_eq!("h".parse::<Quantity>().unwrap(), Quantity::H);
        assert!("w".parse::<Quantity>().is_err());
    }
}
