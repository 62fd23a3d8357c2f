//! Rectangular domain tiled into elements.
//!
//! Element (ix, iy) has id `iy * nx + ix`. Each element carries its own
//! width/height; widths are either uniform or follow the boundary-scaling
//! ramp, and are computed directly (not as edge differences) so equal-sized
//! elements share bit-identical geometry and hit the coupling cache.

use crate::element::ElementGeometry;
use crate::error::{Error, Result};

/// Axis-aligned domain rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        let r = Self { x0, y0, x1, y1 };
        if !(x1 > x0 && y1 > y0)
            || ![x0, y0, x1, y1].iter().all(|v| v.is_finite())
        {
            return Err(Error::MeshSpec(format!("degenerate rectangle {r:?}")));
        }
        Ok(r)
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }
}

/// Plate material: stiffness and cross-bending ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material {
    pub d: f64,
    pub nu: f64,
}

impl Default for Material {
    fn default() -> Self {
        Self { d: 1.0, nu: 0.0 }
    }
}

/// Grading of element widths toward the domain boundary.
///
/// The outermost `rows` elements on every side shrink linearly: counting
/// inward from the boundary, row k of the ramp has width
/// `w_u * (factor + (1 - factor) * k / rows)`, so the outermost row is the
/// narrowest at `factor * w_u`. The interior keeps the uniform width `w_u`,
/// chosen so the widths tile the extent exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryScaling {
    pub rows: usize,
    pub factor: f64,
}

impl BoundaryScaling {
    pub fn new(rows: usize, factor: f64) -> Result<Self> {
        if rows == 0 {
            return Err(Error::MeshSpec("scaling rows must be >= 1".into()));
        }
        if !(factor > 0.0 && factor <= 1.0) {
            return Err(Error::MeshSpec(format!(
                "scaling factor {factor} outside (0, 1]"
            )));
        }
        Ok(Self { rows, factor })
    }
}

/// Everything needed to build a [`Mesh`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshSpec {
    pub rect: Rect,
    pub nx: usize,
    pub ny: usize,
    pub material: Material,
    pub scaling: Option<BoundaryScaling>,
}

impl MeshSpec {
    pub fn uniform(rect: Rect, nx: usize, ny: usize, material: Material) -> Self {
        Self { rect, nx, ny, material, scaling: None }
    }

    pub fn build(&self) -> Result<Mesh> {
        if self.nx == 0 || self.ny == 0 {
            return Err(Error::MeshSpec("mesh must have at least one element".into()));
        }
        ElementGeometry::new(1.0, 1.0, self.material.d, self.material.nu)
            .map_err(|e| Error::MeshSpec(e.to_string()))?;
        let x_widths = spacings(self.nx, self.rect.width(), self.scaling)?;
        let y_widths = spacings(self.ny, self.rect.height(), self.scaling)?;
        let x_edges = edges_from(self.rect.x0, &x_widths);
        let y_edges = edges_from(self.rect.y0, &y_widths);
        let x_centers = centers_from(&x_edges);
        let y_centers = centers_from(&y_edges);
        Ok(Mesh {
            spec: *self,
            x_widths,
            y_widths,
            x_edges,
            y_edges,
            x_centers,
            y_centers,
        })
    }
}

fn spacings(n: usize, extent: f64, scaling: Option<BoundaryScaling>) -> Result<Vec<f64>> {
    match scaling {
        None => Ok(vec![extent / n as f64; n]),
        Some(BoundaryScaling { rows: r, factor: f }) => {
            if n < 2 * r + 1 {
                return Err(Error::MeshSpec(format!(
                    "{n} elements cannot carry two scaling ramps of {r} rows"
                )));
            }
            let ramp: Vec<f64> = (0..r)
                .map(|k| f + (1.0 - f) * k as f64 / r as f64)
                .collect();
            let s: f64 = ramp.iter().sum();
            let wu = extent / ((n - 2 * r) as f64 + 2.0 * s);
            let mut w = Vec::with_capacity(n);
            w.extend(ramp.iter().map(|&c| c * wu));
            w.extend(std::iter::repeat(wu).take(n - 2 * r));
            w.extend(ramp.iter().rev().map(|&c| c * wu));
            Ok(w)
        }
    }
}

fn edges_from(start: f64, widths: &[f64]) -> Vec<f64> {
    let mut e = Vec::with_capacity(widths.len() + 1);
    let mut acc = start;
    e.push(acc);
    for w in widths {
        acc += w;
        e.push(acc);
    }
    e
}

fn centers_from(edges: &[f64]) -> Vec<f64> {
    edges.windows(2).map(|p| 0.5 * (p[0] + p[1])).collect()
}

/// One side of the domain (or of a single element).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Bottom,
    Right,
    Top,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Left, Side::Bottom, Side::Right, Side::Top];

    /// Offset of this side's 6-block within the 24-entry element state.
    pub fn block(self) -> usize {
        match self {
            Side::Left => 0,
            Side::Bottom => 6,
            Side::Right => 12,
            Side::Top => 18,
        }
    }

    pub fn is_vertical(self) -> bool {
        matches!(self, Side::Left | Side::Right)
    }

    pub fn name(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Bottom => "bottom",
            Side::Right => "right",
            Side::Top => "top",
        }
    }
}

impl std::str::FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "left" | "l" => Ok(Side::Left),
            "bottom" | "b" => Ok(Side::Bottom),
            "right" | "r" => Ok(Side::Right),
            "top" | "t" => Ok(Side::Top),
            other => Err(Error::MeshSpec(format!("unknown side {other:?}"))),
        }
    }
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Built mesh: element sizes, edge coordinates, section-line coordinates.
#[derive(Debug, Clone)]
pub struct Mesh {
    pub spec: MeshSpec,
    /// Element width per column (len nx).
    pub x_widths: Vec<f64>,
    /// Element height per row (len ny).
    pub y_widths: Vec<f64>,
    /// Column edges (len nx + 1).
    pub x_edges: Vec<f64>,
    /// Row edges (len ny + 1).
    pub y_edges: Vec<f64>,
    /// x of each column's vertical section line (len nx).
    pub x_centers: Vec<f64>,
    /// y of each row's horizontal section line (len ny).
    pub y_centers: Vec<f64>,
}

impl Mesh {
    pub fn nx(&self) -> usize {
        self.spec.nx
    }

    pub fn ny(&self) -> usize {
        self.spec.ny
    }

    pub fn element_count(&self) -> usize {
        self.spec.nx * self.spec.ny
    }

    pub fn id(&self, ix: usize, iy: usize) -> usize {
        debug_assert!(ix < self.nx() && iy < self.ny());
        iy * self.spec.nx + ix
    }

    pub fn pos(&self, e: usize) -> (usize, usize) {
        (e % self.spec.nx, e / self.spec.nx)
    }

    pub fn geometry(&self, ix: usize, iy: usize) -> ElementGeometry {
        ElementGeometry {
            a: self.x_widths[ix],
            b: self.y_widths[iy],
            d: self.spec.material.d,
            nu: self.spec.material.nu,
        }
    }

    /// Element center.
    pub fn center(&self, ix: usize, iy: usize) -> (f64, f64) {
        (self.x_centers[ix], self.y_centers[iy])
    }

    /// Element containing (x, y). A point on an interior edge belongs to the
    /// lower-index element; boundary points (within a relative slack) are
    /// accepted.
    pub fn locate(&self, x: f64, y: f64) -> Result<(usize, usize)> {
        let ix = locate_1d(&self.x_edges, x).ok_or(Error::OutsideDomain { x, y })?;
        let iy = locate_1d(&self.y_edges, y).ok_or(Error::OutsideDomain { x, y })?;
        Ok((ix, iy))
    }

    /// Index of the horizontal section line nearest to y, and the offset
    /// `y - line_y` left unresolved by answering from that line.
    pub fn nearest_x_line(&self, y: f64) -> (usize, f64) {
        nearest_1d(&self.y_centers, y)
    }

    /// Index of the vertical section line nearest to x, and `x - line_x`.
    pub fn nearest_y_line(&self, x: f64) -> (usize, f64) {
        nearest_1d(&self.x_centers, x)
    }

    /// Interior edge count: vertical (nx-1)*ny plus horizontal nx*(ny-1).
    pub fn interior_edge_count(&self) -> usize {
        let (nx, ny) = (self.spec.nx, self.spec.ny);
        (nx - 1) * ny + nx * (ny - 1)
    }

    /// Number of element sides lying on the domain boundary.
    pub fn boundary_side_count(&self) -> usize {
        2 * self.spec.nx + 2 * self.spec.ny
    }

    /// Unknowns carried by the element states alone (24 per element).
    pub fn state_unknowns(&self) -> usize {
        24 * self.element_count()
    }

    pub fn summary(&self) -> String {
        let s = &self.spec;
        let scaling = match s.scaling {
            None => "uniform".to_string(),
            Some(bs) => format!("scaled (rows = {}, factor = {})", bs.rows, bs.factor),
        };
        format!(
            "mesh {} x {} over [{}, {}] x [{}, {}], {scaling}\n\
             material d = {}, nu = {}\n\
             {} elements, {} state unknowns",
            s.nx,
            s.ny,
            s.rect.x0,
            s.rect.x1,
            s.rect.y0,
            s.rect.y1,
            s.material.d,
            s.material.nu,
            self.element_count(),
            self.state_unknowns(),
        )
    }
}

fn locate_1d(edges: &[f64], v: f64) -> Option<usize> {
    let n = edges.len() - 1;
    let lo = edges[0];
    let hi = edges[n];
    let slack = (hi - lo) * 1e-12;
    if !v.is_finite() || v < lo - slack || v > hi + slack {
        return None;
    }
    // interior edges only; a point on one goes to the lower element
    let i = edges[1..n].partition_point(|&e| e < v);
    Some(i)
}

fn nearest_1d(centers: &[f64], v: f64) -> (usize, f64) {
    let i = centers.partition_point(|&c| c < v);
    let best = if i == 0 {
        0
    } else if i == centers.len() {
        centers.len() - 1
    } else if (v - centers[i - 1]).abs() <= (centers[i] - v).abs() {
        i - 1
    } else {
        i
    };
    (best, v - centers[best])
}
