//! Field evaluation on a solved state: sampling along section lines, total
//! energy, and text/CSV output.
//!
//! Fields live natively on the skeleton lines (one horizontal line per
//! element row, one vertical line per column). Sampling at an arbitrary
//! coordinate along a line is exact; a request off every line is answered
//! from the nearest one with the unresolved transverse offset reported.

use std::io::Write as IoWrite;

use crate::assembly::Solution;
use crate::element::{cached_coupling, element_energy, evaluate_section, Axis, SectionValues};
use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::surfaces::Surface;

/// One sampled point. (x, y) is where the values hold — on the line —
/// and `offset` is the transverse distance from the requested point.
#[derive(Debug, Clone, Copy)]
pub struct FieldSample {
    pub x: f64,
    pub y: f64,
    pub axis: Axis,
    pub offset: f64,
    pub values: SectionValues,
}

fn column_of(mesh: &Mesh, x: f64) -> Result<usize> {
    mesh.locate(x, mesh.spec.rect.y0).map(|(ix, _)| ix)
}

fn row_of(mesh: &Mesh, y: f64) -> Result<usize> {
    mesh.locate(mesh.spec.rect.x0, y).map(|(_, iy)| iy)
}

/// Sample the horizontal section line of row `iy` at global coordinate x.
pub fn sample_on_x_line(mesh: &Mesh, sol: &Solution, iy: usize, x: f64) -> Result<FieldSample> {
    if iy >= mesh.ny() {
        return Err(Error::OutOfRange {
            what: "row index",
            value: iy as f64,
            lo: 0.0,
            hi: (mesh.ny() - 1) as f64,
        });
    }
    let ix = column_of(mesh, x)?;
    let e = mesh.id(ix, iy);
    let g = mesh.geometry(ix, iy);
    let cc = cached_coupling(&g)?;
    let t = (x - mesh.x_edges[ix]).clamp(0.0, g.a);
    let values = evaluate_section(&g, &cc, &sol.inlet(e), sol.loads[e], Axis::X, t)?;
    Ok(FieldSample { x, y: mesh.y_centers[iy], axis: Axis::X, offset: 0.0, values })
}

/// Sample the vertical section line of column `ix` at global coordinate y.
pub fn sample_on_y_line(mesh: &Mesh, sol: &Solution, ix: usize, y: f64) -> Result<FieldSample> {
    if ix >= mesh.nx() {
        return Err(Error::OutOfRange {
            what: "column index",
            value: ix as f64,
            lo: 0.0,
            hi: (mesh.nx() - 1) as f64,
        });
    }
    let iy = row_of(mesh, y)?;
    let e = mesh.id(ix, iy);
    let g = mesh.geometry(ix, iy);
    let cc = cached_coupling(&g)?;
    let t = (y - mesh.y_edges[iy]).clamp(0.0, g.b);
    let values = evaluate_section(&g, &cc, &sol.inlet(e), sol.loads[e], Axis::Y, t)?;
    Ok(FieldSample { x: mesh.x_centers[ix], y, axis: Axis::Y, offset: 0.0, values })
}

/// Sample at (x, y) from the nearest section line of either orientation.
/// Horizontal lines win ties.
pub fn sample_near(mesh: &Mesh, sol: &Solution, x: f64, y: f64) -> Result<FieldSample> {
    mesh.locate(x, y)?;
    let (iy, off_x_line) = mesh.nearest_x_line(y);
    let (ix, off_y_line) = mesh.nearest_y_line(x);
    if off_x_line.abs() <= off_y_line.abs() {
        let mut s = sample_on_x_line(mesh, sol, iy, x)?;
        s.offset = off_x_line;
        Ok(s)
    } else {
        let mut s = sample_on_y_line(mesh, sol, ix, y)?;
        s.offset = off_y_line;
        Ok(s)
    }
}

/// Sample one whole section line with `resolution` points per element,
/// endpoints included (so consecutive elements share one point, emitted
/// once). `resolution` must be at least 2; 3 adds the element centers.
pub fn sample_line(
    mesh: &Mesh,
    sol: &Solution,
    axis: Axis,
    index: usize,
    resolution: usize,
) -> Result<Vec<FieldSample>> {
    if resolution < 2 {
        return Err(Error::Cli(format!("resolution {resolution} < 2")));
    }
    let count = match axis {
        Axis::X => mesh.nx(),
        Axis::Y => mesh.ny(),
    };
    let limit = match axis {
        Axis::X => mesh.ny(),
        Axis::Y => mesh.nx(),
    };
    if index >= limit {
        return Err(Error::OutOfRange {
            what: "line index",
            value: index as f64,
            lo: 0.0,
            hi: (limit - 1) as f64,
        });
    }
    let mut out = Vec::with_capacity(count * (resolution - 1) + 1);
    for i in 0..count {
        let (ix, iy) = match axis {
            Axis::X => (i, index),
            Axis::Y => (index, i),
        };
        let e = mesh.id(ix, iy);
        let g = mesh.geometry(ix, iy);
        let cc = cached_coupling(&g)?;
        let (span, base) = match axis {
            Axis::X => (g.a, mesh.x_edges[ix]),
            Axis::Y => (g.b, mesh.y_edges[iy]),
        };
        let first = if i == 0 { 0 } else { 1 };
        for j in first..resolution {
            let t = span * j as f64 / (resolution - 1) as f64;
            let values = evaluate_section(&g, &cc, &sol.inlet(e), sol.loads[e], axis, t)?;
            let (x, y) = match axis {
                Axis::X => (base + t, mesh.y_centers[iy]),
                Axis::Y => (mesh.x_centers[ix], base + t),
            };
            out.push(FieldSample { x, y, axis, offset: 0.0, values });
        }
    }
    Ok(out)
}

/// Discrete bending energy: the total and every element's contribution
/// (center curvatures squared times element area).
#[derive(Debug, Clone)]
pub struct EnergyReport {
    pub total: f64,
    pub per_element: Vec<f64>,
}

impl EnergyReport {
    pub fn min(&self) -> f64 {
        self.per_element.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.per_element.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Sum element energies over the whole mesh.
pub fn total_energy(mesh: &Mesh, sol: &Solution) -> Result<EnergyReport> {
    let mut per_element = Vec::with_capacity(mesh.element_count());
    for iy in 0..mesh.ny() {
        for ix in 0..mesh.nx() {
            let e = mesh.id(ix, iy);
            let g = mesh.geometry(ix, iy);
            let cc = cached_coupling(&g)?;
            per_element.push(element_energy(&g, &cc, &sol.inlet(e), sol.loads[e]));
        }
    }
    Ok(EnergyReport { total: per_element.iter().sum(), per_element })
}

/// Max and RMS deviations from an analytic reference over every skeleton
/// line, sampled at `resolution` points per element. The solver parameters
/// map onto surface derivatives for unit stiffness and zero Poisson ratio
/// (the blending experiments' material): theta_n is the first normal
/// derivative and m_n the second.
#[derive(Debug, Clone, Copy, Default)]
pub struct ErrorNorms {
    pub max_w: f64,
    pub rms_w: f64,
    pub max_theta: f64,
    pub rms_theta: f64,
    pub max_m: f64,
    pub rms_m: f64,
}

pub fn compare_to_reference(
    mesh: &Mesh,
    sol: &Solution,
    surface: Surface,
    resolution: usize,
) -> Result<ErrorNorms> {
    let mut n = 0usize;
    let mut norms = ErrorNorms::default();
    let mut account = |dw: f64, dth: f64, dm: f64| {
        norms.max_w = norms.max_w.max(dw.abs());
        norms.max_theta = norms.max_theta.max(dth.abs());
        norms.max_m = norms.max_m.max(dm.abs());
        norms.rms_w += dw * dw;
        norms.rms_theta += dth * dth;
        norms.rms_m += dm * dm;
        n += 1;
    };
    for iy in 0..mesh.ny() {
        for s in sample_line(mesh, sol, Axis::X, iy, resolution)? {
            let v = s.values;
            account(
                v.w - surface.w(s.x, s.y),
                v.theta_n - surface.wx(s.x, s.y),
                v.m_n - surface.wxx(s.x, s.y),
            );
        }
    }
    for ix in 0..mesh.nx() {
        for s in sample_line(mesh, sol, Axis::Y, ix, resolution)? {
            let v = s.values;
            account(
                v.w - surface.w(s.x, s.y),
                v.theta_n - surface.wy(s.x, s.y),
                v.m_n - surface.wyy(s.x, s.y),
            );
        }
    }
    let scale = 1.0 / n.max(1) as f64;
    norms.rms_w = (norms.rms_w * scale).sqrt();
    norms.rms_theta = (norms.rms_theta * scale).sqrt();
    norms.rms_m = (norms.rms_m * scale).sqrt();
    Ok(norms)
}

/// Reconstructed elevation against the reference surface at chosen points:
/// (x, y, reconstructed, reference) rows.
pub fn compare_elevation(
    mesh: &Mesh,
    sol: &Solution,
    surface: Surface,
    points: &[(f64, f64)],
) -> Result<Vec<(f64, f64, f64, f64)>> {
    points
        .iter()
        .map(|&(x, y)| {
            let s = sample_near(mesh, sol, x, y)?;
            Ok((x, y, s.values.w, surface.w(s.x, s.y)))
        })
        .collect()
}

/// Fixed-format float for reproducible text output.
fn num(v: f64) -> String {
    format!("{v:.12e}")
}

/// CSV of samples: `x,y,w,theta_n,theta_tau,m_n,m_tau,q`.
pub fn write_samples_csv(out: &mut dyn IoWrite, samples: &[FieldSample]) -> Result<()> {
    writeln!(out, "x,y,w,theta_n,theta_tau,m_n,m_tau,q")?;
    for s in samples {
        let v = s.values;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            num(s.x),
            num(s.y),
            num(v.w),
            num(v.theta_n),
            num(v.theta_tau),
            num(v.m_n),
            num(v.m_tau),
            num(v.q)
        )?;
    }
    Ok(())
}

/// CSV of element-center elevations: `x,y,w`.
pub fn write_grid_csv(out: &mut dyn IoWrite, mesh: &Mesh, sol: &Solution) -> Result<()> {
    writeln!(out, "x,y,w")?;
    for iy in 0..mesh.ny() {
        for ix in 0..mesh.nx() {
            let e = mesh.id(ix, iy);
            let g = mesh.geometry(ix, iy);
            let cc = cached_coupling(&g)?;
            let v = evaluate_section(&g, &cc, &sol.inlet(e), sol.loads[e], Axis::X, g.a / 2.0)?;
            writeln!(out, "{},{},{}", num(mesh.x_centers[ix]), num(mesh.y_centers[iy]), num(v.w))?;
        }
    }
    Ok(())
}

/// Energy summary: the total plus per-element statistics.
pub fn write_energy(out: &mut dyn IoWrite, report: &EnergyReport) -> Result<()> {
    writeln!(out, "total = {}", num(report.total))?;
    writeln!(out, "elements = {}", report.per_element.len())?;
    writeln!(out, "per_element_min = {}", num(report.min()))?;
    writeln!(out, "per_element_max = {}", num(report.max()))?;
    writeln!(
        out,
        "per_element_mean = {}",
        num(report.total / report.per_element.len().max(1) as f64)
    )?;
    Ok(())
}
