//! Built-in reference surfaces with analytic derivatives.
//!
//! These drive the boundary data of the blending experiments and provide
//! targets for the reconstruction ones. All derivatives are closed-form;
//! [`biharmonic_residual`] offers an independent finite-difference check.

use std::f64::consts::PI;

use crate::assembly::BoundaryPlan;
use crate::boundary::{ConditionKind, SideCondition};
use crate::error::{Error, Result};
use crate::mesh::{Mesh, Rect, Side};

/// Reference surface catalogue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Surface {
    /// Cosine-carried biharmonic surface, symmetric in x and y.
    Cosine,
    /// Product of cosines; not biharmonic (it is a metaharmonic bump).
    CosCos,
    /// Exponentially skewed biharmonic surface.
    Nonsymmetric,
    /// Three-bump polynomial-Gaussian test surface; not biharmonic.
    Multipeak,
}

impl Surface {
    pub const ALL: [Surface; 4] =
        [Surface::Cosine, Surface::CosCos, Surface::Nonsymmetric, Surface::Multipeak];

    pub fn from_name(name: &str) -> Result<Self> {
        match name.trim().to_ascii_lowercase().as_str() {
            "cosine" => Ok(Surface::Cosine),
            "coscos" | "cos-cos" => Ok(Surface::CosCos),
            "nonsymmetric" | "nonsym" => Ok(Surface::Nonsymmetric),
            "multipeak" => Ok(Surface::Multipeak),
            other => Err(Error::Cli(format!("unknown surface {other:?}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Surface::Cosine => "cosine",
            Surface::CosCos => "coscos",
            Surface::Nonsymmetric => "nonsymmetric",
            Surface::Multipeak => "multipeak",
        }
    }

    /// Domain the surface experiments run on.
    pub fn domain(self) -> Rect {
        let r = match self {
            Surface::Cosine | Surface::CosCos => (-PI / 2.0, -PI / 2.0, PI / 2.0, PI / 2.0),
            Surface::Nonsymmetric => (0.0, -PI, PI / 2.0, PI),
            Surface::Multipeak => (-3.0, -4.0, 3.0, 4.0),
        };
        Rect::new(r.0, r.1, r.2, r.3).expect("static domains are valid")
    }

    /// Reference bending energy used for comparison in reports.
    pub fn reference_energy(self) -> f64 {
        match self {
            Surface::Cosine => 17.1850,
            Surface::CosCos => PI * PI,
            Surface::Nonsymmetric => 233228.4505,
            Surface::Multipeak => 4161.9368,
        }
    }

    pub fn w(self, x: f64, y: f64) -> f64 {
        self.eval(Deriv::W, x, y)
    }

    pub fn wx(self, x: f64, y: f64) -> f64 {
        self.eval(Deriv::Wx, x, y)
    }

    pub fn wy(self, x: f64, y: f64) -> f64 {
        self.eval(Deriv::Wy, x, y)
    }

    pub fn wxx(self, x: f64, y: f64) -> f64 {
        self.eval(Deriv::Wxx, x, y)
    }

    pub fn wyy(self, x: f64, y: f64) -> f64 {
        self.eval(Deriv::Wyy, x, y)
    }

    pub fn wxy(self, x: f64, y: f64) -> f64 {
        self.eval(Deriv::Wxy, x, y)
    }

    fn eval(self, d: Deriv, x: f64, y: f64) -> f64 {
        match self {
            Surface::Cosine => cosine(d, x, y),
            Surface::CosCos => coscos(d, x, y),
            Surface::Nonsymmetric => nonsym(d, x, y),
            Surface::Multipeak => multipeak(d, x, y),
        }
    }

    /// Boundary data for one element side sampled at (x, y), mapped onto the
    /// section parameters of that side: along a vertical side the section
    /// runs in x, so theta_n/m_n take the x-derivatives.
    pub fn side_condition(self, kind: ConditionKind, side: Side, x: f64, y: f64) -> SideCondition {
        let w = self.w(x, y);
        match (kind, side.is_vertical()) {
            (ConditionKind::Kinematic, true) => {
                SideCondition::Kinematic { w, theta_n: self.wx(x, y), theta_tau: self.wy(x, y) }
            }
            (ConditionKind::Kinematic, false) => {
                SideCondition::Kinematic { w, theta_n: self.wy(x, y), theta_tau: self.wx(x, y) }
            }
            (ConditionKind::Curvature, true) => {
                SideCondition::Curvature { w, m_n: self.wxx(x, y), m_tau: self.wxy(x, y) }
            }
            (ConditionKind::Curvature, false) => {
                SideCondition::Curvature { w, m_n: self.wyy(x, y), m_tau: self.wxy(x, y) }
            }
            (ConditionKind::Free, _) => SideCondition::Free,
        }
    }

    /// Sample this surface at every element-side midpoint of the mesh
    /// boundary.
    pub fn boundary_plan(self, mesh: &Mesh, kind: ConditionKind) -> Result<BoundaryPlan> {
        let mut plan = BoundaryPlan::all_free(mesh);
        let r = mesh.spec.rect;
        for side in Side::ALL {
            let count = if side.is_vertical() { mesh.ny() } else { mesh.nx() };
            let conds = (0..count)
                .map(|i| {
                    let (x, y) = match side {
                        Side::Left => (r.x0, mesh.y_centers[i]),
                        Side::Right => (r.x1, mesh.y_centers[i]),
                        Side::Bottom => (mesh.x_centers[i], r.y0),
                        Side::Top => (mesh.x_centers[i], r.y1),
                    };
                    self.side_condition(kind, side, x, y)
                })
                .collect();
            plan.set_side(side, conds)?;
        }
        Ok(plan)
    }
}

#[derive(Clone, Copy)]
enum Deriv {
    W,
    Wx,
    Wy,
    Wxx,
    Wyy,
    Wxy,
}

fn cosine(d: Deriv, x: f64, y: f64) -> f64 {
    // W = cos(x) g(y) + cos(y) g(x) with g chosen to keep W biharmonic
    let c = 1.0 / (PI / 2.0).tanh();
    let g = |t: f64| 0.5 * t.cosh() - c * (t / PI) * t.sinh();
    let g1 = |t: f64| 0.5 * t.sinh() - (c / PI) * (t.sinh() + t * t.cosh());
    let g2 = |t: f64| 0.5 * t.cosh() - (c / PI) * (2.0 * t.cosh() + t * t.sinh());
    match d {
        Deriv::W => x.cos() * g(y) + y.cos() * g(x),
        Deriv::Wx => -x.sin() * g(y) + y.cos() * g1(x),
        Deriv::Wy => x.cos() * g1(y) - y.sin() * g(x),
        Deriv::Wxx => -x.cos() * g(y) + y.cos() * g2(x),
        Deriv::Wyy => x.cos() * g2(y) - y.cos() * g(x),
        Deriv::Wxy => -x.sin() * g1(y) - y.sin() * g1(x),
    }
}

fn coscos(d: Deriv, x: f64, y: f64) -> f64 {
    match d {
        Deriv::W => x.cos() * y.cos(),
        Deriv::Wx => -x.sin() * y.cos(),
        Deriv::Wy => -x.cos() * y.sin(),
        Deriv::Wxx | Deriv::Wyy => -x.cos() * y.cos(),
        Deriv::Wxy => x.sin() * y.sin(),
    }
}

fn nonsym(d: Deriv, x: f64, y: f64) -> f64 {
    // W = (pi/2 - x) e^{3x} cos(3y), biharmonic by construction
    let e = (3.0 * x).exp();
    let u = (PI / 2.0 - x) * e;
    let u1 = (3.0 * (PI / 2.0 - x) - 1.0) * e;
    let u2 = (9.0 * (PI / 2.0 - x) - 6.0) * e;
    match d {
        Deriv::W => u * (3.0 * y).cos(),
        Deriv::Wx => u1 * (3.0 * y).cos(),
        Deriv::Wy => -3.0 * u * (3.0 * y).sin(),
        Deriv::Wxx => u2 * (3.0 * y).cos(),
        Deriv::Wyy => -9.0 * u * (3.0 * y).cos(),
        Deriv::Wxy => -3.0 * u1 * (3.0 * y).sin(),
    }
}

/// One multipeak term: polynomial (value and derivatives) times a unit
/// Gaussian centered at (x0, y0).
struct Peak {
    p: fn(f64, f64) -> f64,
    px: fn(f64, f64) -> f64,
    py: fn(f64, f64) -> f64,
    pxx: fn(f64, f64) -> f64,
    pyy: fn(f64, f64) -> f64,
    pxy: fn(f64, f64) -> f64,
    x0: f64,
    y0: f64,
}

const PEAKS: [Peak; 3] = [
    Peak {
        p: |x, _| 3.0 * (1.0 - x) * (1.0 - x),
        px: |x, _| -6.0 * (1.0 - x),
        py: |_, _| 0.0,
        pxx: |_, _| 6.0,
        pyy: |_, _| 0.0,
        pxy: |_, _| 0.0,
        x0: 0.0,
        y0: -1.0,
    },
    Peak {
        p: |x, y| -10.0 * (x / 5.0 - x.powi(3) - y.powi(5)),
        px: |x, _| -2.0 + 30.0 * x * x,
        py: |_, y| 50.0 * y.powi(4),
        pxx: |x, _| 60.0 * x,
        pyy: |_, y| 200.0 * y.powi(3),
        pxy: |_, _| 0.0,
        x0: 0.0,
        y0: 0.0,
    },
    Peak {
        p: |_, _| -1.0 / 3.0,
        px: |_, _| 0.0,
        py: |_, _| 0.0,
        pxx: |_, _| 0.0,
        pyy: |_, _| 0.0,
        pxy: |_, _| 0.0,
        x0: -1.0,
        y0: 0.0,
    },
];

fn multipeak(d: Deriv, x: f64, y: f64) -> f64 {
    let mut tot = 0.0;
    for t in &PEAKS {
        let gx = -2.0 * (x - t.x0);
        let gy = -2.0 * (y - t.y0);
        let e = (-(x - t.x0).powi(2) - (y - t.y0).powi(2)).exp();
        let (p, px, py) = ((t.p)(x, y), (t.px)(x, y), (t.py)(x, y));
        let v = match d {
            Deriv::W => p,
            Deriv::Wx => px + p * gx,
            Deriv::Wy => py + p * gy,
            Deriv::Wxx => (t.pxx)(x, y) + 2.0 * px * gx + p * (gx * gx - 2.0),
            Deriv::Wyy => (t.pyy)(x, y) + 2.0 * py * gy + p * (gy * gy - 2.0),
            Deriv::Wxy => (t.pxy)(x, y) + px * gy + py * gx + p * gx * gy,
        };
        tot += v * e;
    }
    tot
}

/// Approximate extremum locations of the multipeak surface, inputs for the
/// reconstruction experiments. Polish them with [`refine_extremum`].
pub const MULTIPEAK_EXTREMA: [(f64, f64); 6] = [
    (0.0, 1.59),
    (-0.45, -0.64),
    (1.29, 0.0),
    (0.24, -1.63),
    (-1.34, 0.19),
    (0.29, 0.32),
];

/// Newton iteration on the gradient, using the analytic Hessian. Converges
/// quadratically from any reasonable seed near a non-degenerate stationary
/// point.
pub fn refine_extremum(surface: Surface, x0: f64, y0: f64) -> Result<(f64, f64)> {
    let (mut x, mut y) = (x0, y0);
    for _ in 0..80 {
        let (gx, gy) = (surface.wx(x, y), surface.wy(x, y));
        let (hxx, hyy, hxy) = (surface.wxx(x, y), surface.wyy(x, y), surface.wxy(x, y));
        let det = hxx * hyy - hxy * hxy;
        if det.abs() < 1e-30 {
            return Err(Error::Solve(format!(
                "degenerate Hessian near ({x}, {y}) while refining an extremum"
            )));
        }
        let dx = (-gx * hyy + gy * hxy) / det;
        let dy = (-gy * hxx + gx * hxy) / det;
        x += dx;
        y += dy;
        if dx.abs() + dy.abs() < 1e-14 * (1.0 + x.abs() + y.abs()) {
            return Ok((x, y));
        }
    }
    Err(Error::Solve(format!(
        "extremum refinement from ({x0}, {y0}) did not converge"
    )))
}

/// Finite-difference biharmonic operator (nested 5-point Laplacians).
/// Near zero for the biharmonic surfaces; equals 4 W for the cosine product.
pub fn biharmonic_residual(surface: Surface, x: f64, y: f64, h: f64) -> f64 {
    let lap = |x: f64, y: f64| {
        (surface.w(x + h, y) + surface.w(x - h, y) + surface.w(x, y + h) + surface.w(x, y - h)
            - 4.0 * surface.w(x, y))
            / (h * h)
    };
    (lap(x + h, y) + lap(x - h, y) + lap(x, y + h) + lap(x, y - h) - 4.0 * lap(x, y)) / (h * h)
}

/// Midpoint-rule bending energy of the analytic surface on an nx x ny grid:
/// integrand Wxx^2 + 2 Wxy^2 + Wyy^2 sampled at cell centers.
pub fn midpoint_energy(surface: Surface, nx: usize, ny: usize) -> f64 {
    let r = surface.domain();
    let (hx, hy) = (r.width() / nx as f64, r.height() / ny as f64);
    let mut tot = 0.0;
    for iy in 0..ny {
        for ix in 0..nx {
            let x = r.x0 + hx * (ix as f64 + 0.5);
            let y = r.y0 + hy * (iy as f64 + 0.5);
            let (wxx, wyy, wxy) = (surface.wxx(x, y), surface.wyy(x, y), surface.wxy(x, y));
            tot += (wxx * wxx + 2.0 * wxy * wxy + wyy * wyy) * hx * hy;
        }
    }
    tot
}

/// Independent high-resolution reference for the corner-supported plate
/// (clamped top edge, corner supports at the bottom, uniform load, nu = 0.3):
/// `(y_frac, x_frac, w, m_x, m_y)` where the fractions scale the domain
/// extents. Moments vanish along free edges.
pub const CORNER_PLATE_REFERENCE: [(f64, f64, f64, f64, f64); 8] = [
    (0.0, 0.25, 0.008098, 0.076216, 0.0),
    (0.0, 0.5, 0.011237, 0.094329, 0.0),
    (0.25, 0.0, 0.005163, 0.0, 0.071900),
    (0.25, 0.25, 0.008934, 0.050837, 0.056157),
    (0.25, 0.5, 0.010596, 0.066909, 0.052390),
    (0.5, 0.0, 0.005797, 0.0, 0.062840),
    (0.5, 0.25, 0.007316, 0.029028, 0.052692),
    (0.5, 0.5, 0.008052, 0.037900, 0.049495),
];

#[cfg(test)]
mod tests {
    use super::*;

    /// All analytic derivatives agree with central differences.
    #[test]
    fn derivatives_match_finite_differences() {
        let pts = [(-0.7, 0.3), (0.11, -0.52), (1.2, 1.7), (-2.0, -3.1), (0.0, 0.0)];
        for s in Surface::ALL {
            for &(x, y) in &pts {
                let h = 1e-5;
                let fd_x = (s.w(x + h, y) - s.w(x - h, y)) / (2.0 * h);
                let fd_y = (s.w(x, y + h) - s.w(x, y - h)) / (2.0 * h);
                let scale = 1.0 + s.w(x, y).abs();
                assert!((s.wx(x, y) - fd_x).abs() < 1e-5 * scale, "{s:?} Wx at ({x}, {y})");
                assert!((s.wy(x, y) - fd_y).abs() < 1e-5 * scale, "{s:?} Wy at ({x}, {y})");
                let h = 1e-4;
                let fd_xx = (s.w(x + h, y) - 2.0 * s.w(x, y) + s.w(x - h, y)) / (h * h);
                let fd_yy = (s.w(x, y + h) - 2.0 * s.w(x, y) + s.w(x, y - h)) / (h * h);
                let fd_xy = (s.w(x + h, y + h) - s.w(x + h, y - h) - s.w(x - h, y + h)
                    + s.w(x - h, y - h))
                    / (4.0 * h * h);
                let scale = scale + s.wxx(x, y).abs() + s.wyy(x, y).abs();
                assert!((s.wxx(x, y) - fd_xx).abs() < 1e-4 * scale, "{s:?} Wxx at ({x}, {y})");
                assert!((s.wyy(x, y) - fd_yy).abs() < 1e-4 * scale, "{s:?} Wyy at ({x}, {y})");
                assert!((s.wxy(x, y) - fd_xy).abs() < 1e-4 * scale, "{s:?} Wxy at ({x}, {y})");
            }
        }
    }

    #[test]
    fn blend_surfaces_are_biharmonic() {
        for (s, pts) in [
            (Surface::Cosine, [(0.3, -0.2), (-1.1, 0.9)]),
            (Surface::Nonsymmetric, [(0.8, 0.5), (0.2, -2.0)]),
        ] {
            for (x, y) in pts {
                let r = biharmonic_residual(s, x, y, 5e-3);
                // truncation rides on the sixth derivatives, so scale the
                // bound by the curvature magnitude rather than w alone
                let scale = 1.0 + s.w(x, y).abs() + s.wxx(x, y).abs() + s.wyy(x, y).abs();
                assert!(r.abs() < 5e-3 * scale, "{s:?} residual {r} at ({x}, {y})");
            }
        }
    }

    #[test]
    fn cosine_product_biharmonic_is_four_w() {
        let r = biharmonic_residual(Surface::CosCos, 0.0, 0.0, 1e-2);
        assert!((r - 4.0).abs() < 1e-3, "{r}");
        // cos x cos y satisfies lap lap W = 4 W everywhere
        let (x, y) = (0.4, -0.9);
        let r = biharmonic_residual(Surface::CosCos, x, y, 1e-2);
        assert!((r - 4.0 * Surface::CosCos.w(x, y)).abs() < 1e-3);
    }

    #[test]
    fn cosine_center_is_unit() {
        // g(0) = 1/2 so both carriers add up to 1 at the origin
        assert!((Surface::Cosine.w(0.0, 0.0) - 1.0).abs() < 1e-15);
        assert!(Surface::Cosine.wx(0.0, 0.0).abs() < 1e-15);
        // boundary elevation vanishes: g(pi/2) = 0 and cos(pi/2) = 0
        assert!(Surface::Cosine.w(PI / 2.0, 0.3).abs() < 1e-15);
    }

    #[test]
    fn multipeak_frozen_center_value() {
        assert!((Surface::Multipeak.w(0.0, 0.0) - 0.9810118431238463).abs() < 1e-15);
    }

    #[test]
    fn extrema_refine_to_stationary_points() {
        for (sx, sy) in MULTIPEAK_EXTREMA {
            let (x, y) = refine_extremum(Surface::Multipeak, sx, sy).unwrap();
            assert!((x - sx).abs() < 0.05 && (y - sy).abs() < 0.05, "drifted from ({sx}, {sy})");
            assert!(Surface::Multipeak.wx(x, y).abs() < 1e-10);
            assert!(Surface::Multipeak.wy(x, y).abs() < 1e-10);
        }
    }

    #[test]
    fn midpoint_energy_matches_analytic_integrals() {
        // cos x cos y: integral of Wxx^2 + 2 Wxy^2 + Wyy^2 over the square
        // is exactly pi^2; the midpoint rule hits it at any resolution
        // because the integrand's Fourier modes alias to the exact mean.
        let e = midpoint_energy(Surface::CosCos, 11, 11);
        assert!((e - PI * PI).abs() < 1e-10, "{e}");
        // cosine blend converges to its reference from below
        let coarse = midpoint_energy(Surface::Cosine, 71, 71);
        let fine = midpoint_energy(Surface::Cosine, 401, 401);
        assert!((fine - Surface::Cosine.reference_energy()).abs() < 1e-2, "{fine}");
        assert!((coarse - fine).abs() < 0.05, "{coarse} vs {fine}");
    }

    #[test]
    fn names_round_trip() {
        for s in Surface::ALL {
            assert_eq!(Surface::from_name(s.name()).unwrap(), s);
        }
        assert!(Surface::from_name("torus").is_err());
    }

    #[test]
    fn corner_reference_free_edges_carry_no_normal_moment() {
        for (yf, xf, w, mx, my) in CORNER_PLATE_REFERENCE {
            assert!(w > 0.0);
            if xf == 0.0 {
                assert_eq!(mx, 0.0, "left edge is free");
            }
            if yf == 0.0 {
                assert_eq!(my, 0.0, "bottom edge is free");
            }
        }
    }
}
