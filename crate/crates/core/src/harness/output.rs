//! CSV, text and SVG artifacts.
//!
//! Floats are written with Rust's shortest round-trip formatting, so equal
//! runs produce byte-identical files.

use std::fmt::Write as _;
use std::path::Path;

use super::monitors::{MonitorReport, TimeSeriesRow};
use super::{HarnessError, TEMPLATE_HALF_WIDTH, TEMPLATE_SNAPSHOTS};
use crate::flow::Trajectory;
use crate::profile::{CurvatureField, GridSpec, RadialProfile};
use crate::singularity::{fit_templates, rescale_at_neck, BlowupFit, ZoomNorm};

pub const TIMESERIES_HEADER: [&str; 20] = [
    "t",
    "h",
    "volume",
    "area",
    "min_rho",
    "max_A2",
    "max_v",
    "max_vy",
    "max_H",
    "min_H",
    "zeros_d1",
    "zeros_d2",
    "zeros_H",
    "neck_positions",
    "status",
    "frac_breve",
    "frac_sharp",
    "min_y_breve",
    "max_v_sharp",
    "boundary_height_flat",
];

fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn joined(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(";")
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String, HarnessError> {
    let bytes = w.into_inner().map_err(|e| HarnessError::Data(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| HarnessError::Data(e.to_string()))
}

pub fn timeseries_csv(rows: &[TimeSeriesRow]) -> Result<String, HarnessError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(TIMESERIES_HEADER)?;
    for r in rows {
        let c = &r.census;
        w.write_record([
            r.t.to_string(),
            r.h.to_string(),
            r.volume.to_string(),
            r.area.to_string(),
            r.min_rho.to_string(),
            r.max_a2.to_string(),
            r.max_v.to_string(),
            r.max_vy.to_string(),
            r.max_h.to_string(),
            r.min_h.to_string(),
            c.zeros_d1.to_string(),
            c.zeros_d2.to_string(),
            c.zeros_h.to_string(),
            joined(&c.necks),
            r.status.to_string(),
            opt(r.frac_breve),
            opt(r.frac_sharp),
            opt(r.min_y_breve),
            opt(r.max_v_sharp),
            opt(r.boundary_height_flat),
        ])?;
    }
    finish(w)
}

pub fn census_csv(rows: &[TimeSeriesRow]) -> Result<String, HarnessError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t", "zeros_d1", "zeros_d2", "zeros_H", "neck_positions", "multiplicity_flag_count"])?;
    for r in rows {
        let c = &r.census;
        w.write_record([
            c.t.to_string(),
            c.zeros_d1.to_string(),
            c.zeros_d2.to_string(),
            c.zeros_h.to_string(),
            joined(&c.necks),
            c.multiplicity_count().to_string(),
        ])?;
    }
    finish(w)
}

pub fn snapshot_csv(profile: &RadialProfile, field: &CurvatureField) -> Result<String, HarnessError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["x", "rho", "d1", "d2", "y", "v", "p", "q", "k", "H", "A2"])?;
    let grid = profile.grid();
    for (i, rho) in profile.rho().iter().enumerate() {
        let row = [
            grid.x(i),
            *rho,
            field.d1[i],
            field.d2[i],
            field.y[i],
            field.v[i],
            field.p[i],
            field.q[i],
            field.k[i],
            field.h[i],
            field.a2[i],
        ];
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    finish(w)
}

/// Named numeric columns of a CSV file. Empty cells read as NaN.
pub fn read_columns(path: &Path, names: &[&str]) -> Result<Vec<Vec<f64>>, HarnessError> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    let idx: Vec<usize> = names
        .iter()
        .map(|n| {
            headers
                .iter()
                .position(|h| h.trim() == *n)
                .ok_or_else(|| HarnessError::MissingColumn { path: path.display().to_string(), column: n.to_string() })
        })
        .collect::<Result<_, _>>()?;
    let mut cols = vec![Vec::new(); names.len()];
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        for (c, &i) in idx.iter().enumerate() {
            let cell = record.get(i).unwrap_or("").trim();
            let value = if cell.is_empty() {
                f64::NAN
            } else {
                cell.parse().map_err(|_| {
                    HarnessError::Data(format!(
                        "{}: row {}: cannot parse {cell:?} in column {}",
                        path.display(),
                        line + 2,
                        names[c]
                    ))
                })?
            };
            cols[c].push(value);
        }
    }
    Ok(cols)
}

/// Read a profile from a snapshot CSV (`x` and `rho` columns, equally spaced `x`).
pub fn read_snapshot(path: &Path, dim: usize) -> Result<RadialProfile, HarnessError> {
    let cols = read_columns(path, &["x", "rho"])?;
    let (xs, rho) = (&cols[0], &cols[1]);
    if xs.len() < 9 {
        return Err(HarnessError::Data(format!("{}: need at least 9 nodes, got {}", path.display(), xs.len())));
    }
    let intervals = xs.len() - 1;
    let grid = GridSpec::new(xs[0], xs[intervals], intervals, dim)?;
    let dx = grid.dx();
    if xs.iter().enumerate().any(|(i, x)| (x - grid.x(i)).abs() > 1e-6 * dx) {
        return Err(HarnessError::Data(format!("{}: x is not equally spaced", path.display())));
    }
    Ok(RadialProfile::new(grid, rho.clone(), 0.0)?)
}

pub fn fit_report(fit: &Result<BlowupFit, crate::Error>) -> String {
    match fit {
        Ok(f) => format!(
            "T_est = {}\nC_est = {}\nr2 = {}\nclassification = {}\nwindow = {} {}\nconvexity = {}\nsamples = {}\n",
            f.t_est,
            f.c_est,
            f.r2,
            f.classification.name(),
            f.window.0,
            f.window.1,
            f.convexity,
            f.samples
        ),
        Err(e) => format!("error = {e}\n"),
    }
}

pub fn monitors_report(reports: &[MonitorReport]) -> String {
    let mut out = String::from("# name verdict worst_value worst_time tolerance\n");
    for r in reports {
        let tol = r.tolerance.map_or_else(|| "-".to_string(), |t| t.to_string());
        let _ = writeln!(out, "{} {} {} {} {}", r.name, r.verdict.name(), r.worst_value, r.worst_time, tol);
    }
    out
}

/// Neck-centered template fits over the last recorded states.
pub fn templates_csv(traj: &Trajectory) -> Result<String, HarnessError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t", "alpha", "cyl_r", "cyl_resid", "cat_c5", "cat_resid"])?;
    let start = traj.states.len().saturating_sub(TEMPLATE_SNAPSHOTS);
    for state in &traj.states[start..] {
        let Ok((scaled, _, alpha)) = rescale_at_neck(state, ZoomNorm::MinRadius, Some(TEMPLATE_HALF_WIDTH)) else {
            continue;
        };
        let fit = fit_templates(&scaled);
        let (c5, cr) = fit.catenoid.as_ref().map_or((None, None), |c| (Some(c.c5), Some(c.residual)));
        w.write_record([
            state.t.to_string(),
            alpha.to_string(),
            fit.cylinder.radius.to_string(),
            fit.cylinder.residual.to_string(),
            opt(c5),
            opt(cr),
        ])?;
    }
    finish(w)
}

/// Fixed mapping from profile coordinates onto an 800 x 400 viewBox,
/// shared by every snapshot of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvgFrame {
    pub a: f64,
    pub b: f64,
    pub rho_max: f64,
}

impl SvgFrame {
    const WIDTH: f64 = 800.0;
    const HEIGHT: f64 = 400.0;

    pub fn for_trajectory(traj: &Trajectory) -> Self {
        let grid = traj.first().profile.grid();
        let rho_max = traj.states.iter().flat_map(|s| s.profile.rho().iter().copied()).fold(0.0, f64::max);
        Self { a: grid.a(), b: grid.b(), rho_max: 1.1 * rho_max }
    }

    /// Silhouette of the surface: `rho` above the axis and its mirror below.
    pub fn render(&self, profile: &RadialProfile) -> String {
        let grid = profile.grid();
        let sx = Self::WIDTH / (self.b - self.a);
        let sy = 0.5 * Self::HEIGHT / self.rho_max;
        let mid = 0.5 * Self::HEIGHT;
        let line = |sign: f64| {
            let mut pts = String::new();
            for (i, r) in profile.rho().iter().enumerate() {
                let _ = write!(pts, "{:.3},{:.3} ", (grid.x(i) - self.a) * sx, mid - sign * r * sy);
            }
            pts.trim_end().to_string()
        };
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {w} {h}\">\n\
             <line x1=\"0\" y1=\"{mid}\" x2=\"{w}\" y2=\"{mid}\" stroke=\"#999\" stroke-dasharray=\"4 4\"/>\n\
             <polyline fill=\"none\" stroke=\"black\" points=\"{top}\"/>\n\
             <polyline fill=\"none\" stroke=\"black\" points=\"{bottom}\"/>\n\
             <text x=\"8\" y=\"16\" font-size=\"12\">t = {t}</text>\n</svg>\n",
            w = Self::WIDTH,
            h = Self::HEIGHT,
            top = line(1.0),
            bottom = line(-1.0),
            t = profile.time(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::curvature_fields;

    #[test]
    fn snapshot_round_trip() {
        let grid = GridSpec::new(-1.0, 2.0, 30, 3).unwrap();
        let p = RadialProfile::from_fn(grid, |x| 1.0 + 0.2 * x * x).unwrap();
        let text = snapshot_csv(&p, &curvature_fields(&p).unwrap()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        std::fs::write(&path, &text).unwrap();
        let back = read_snapshot(&path, 3).unwrap();
        assert_eq!(back.rho(), p.rho());
        assert_eq!(back.grid().intervals(), 30);
        assert!((back.grid().dx() - grid.dx()).abs() < 1e-15);
    }

    #[test]
    fn missing_column_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ts.csv");
        std::fs::write(&path, "t,h\n0,1\n").unwrap();
        let err = read_columns(&path, &["t", "max_A2"]).unwrap_err();
        assert!(matches!(err, HarnessError::MissingColumn { ref column, .. } if column == "max_A2"));
    }

    #[test]
    fn svg_uses_fixed_viewbox() {
        let grid = GridSpec::new(0.0, 1.0, 8, 2).unwrap();
        let p = RadialProfile::from_fn(grid, |_| 1.0).unwrap();
        let frame = SvgFrame { a: 0.0, b: 1.0, rho_max: 2.0 };
        let svg = frame.render(&p);
        assert!(svg.contains("viewBox=\"0 0 800 400\""));
        assert!(svg.contains("0.000,100.000"));
        assert!(svg.contains("800.000,300.000"));
    }
}
