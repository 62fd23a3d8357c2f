//! Single-element model: two coupled 1D sections over a rectangle.
//!
//! Each a x b element carries an X-section along its horizontal center line
//! and a Y-section along its vertical center line. A section is described by
//! six parameters (w, theta_n, theta_tau, M_n, M_tau, Q) that evolve along the
//! section coordinate as closed-form polynomials driven by the inlet state and
//! three coupling constants A1, A2, A3. The constants are eliminated by
//! welding the two sections at the element center:
//!
//!   w_x(a/2) = w_y(b/2)
//!   theta_n_x(a/2) = theta_tau_y(b/2)
//!   theta_tau_x(a/2) = theta_n_y(b/2)
//!
//! which makes every section value a linear map of the 12-entry inlet state
//! and the distributed data term P. The linear maps are what the assembly
//! consumes (see [`TransferOperator`]).

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{Error, Result};

/// Element dimensions and material parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementGeometry {
    /// Extent along x.
    pub a: f64,
    /// Extent along y.
    pub b: f64,
    /// Stiffness parameter.
    pub d: f64,
    /// Material ratio coupling the two bending directions.
    pub nu: f64,
}

impl ElementGeometry {
    pub fn new(a: f64, b: f64, d: f64, nu: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) || !(b > 0.0 && b.is_finite()) {
            return Err(Error::InvalidGeometry(format!("a = {a}, b = {b}")));
        }
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::InvalidGeometry(format!("d = {d}")));
        }
        if !(0.0..1.0).contains(&nu) {
            return Err(Error::InvalidGeometry(format!("nu = {nu}")));
        }
        Ok(Self { a, b, d, nu })
    }
}

/// Inlet state of one element: X-section entries 0..6 as
/// (w, theta_n, theta_tau, M_n, M_tau, Q), Y-section entries 6..12 likewise.
pub type SectionState = [f64; 12];

/// Section parameter indices within a 6-block.
pub const W: usize = 0;
pub const THETA_N: usize = 1;
pub const THETA_TAU: usize = 2;
pub const M_N: usize = 3;
pub const M_TAU: usize = 4;
pub const Q: usize = 5;

/// Which section of an element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// The six section parameters at one coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SectionValues {
    pub w: f64,
    pub theta_n: f64,
    pub theta_tau: f64,
    pub m_n: f64,
    pub m_tau: f64,
    pub q: f64,
}

impl SectionValues {
    pub fn as_array(&self) -> [f64; 6] {
        [self.w, self.theta_n, self.theta_tau, self.m_n, self.m_tau, self.q]
    }
}

/// Center-welding solution: A = alpha * Z0 + P * beta.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingCoefficients {
    pub alpha: [[f64; 12]; 3],
    pub beta: [f64; 3],
}

impl CouplingCoefficients {
    /// Coupling constants for a concrete state and data term.
    pub fn constants(&self, z0: &SectionState, p: f64) -> [f64; 3] {
        let mut a = [0.0; 3];
        for i in 0..3 {
            let mut s = p * self.beta[i];
            for k in 0..12 {
                s += self.alpha[i][k] * z0[k];
            }
            a[i] = s;
        }
        a
    }
}

/// Section values at a fixed coordinate as a linear map of (Z0, P):
/// value_m = sum_k coeff[m][k] * z0[k] + P * load[m].
#[derive(Debug, Clone, PartialEq)]
pub struct TransferOperator {
    pub coeff: [[f64; 12]; 6],
    pub load: [f64; 6],
}

impl TransferOperator {
    pub fn apply(&self, z0: &SectionState, p: f64) -> SectionValues {
        let mut out = [0.0; 6];
        for m in 0..6 {
            let mut s = p * self.load[m];
            for k in 0..12 {
                s += self.coeff[m][k] * z0[k];
            }
            out[m] = s;
        }
        SectionValues {
            w: out[0],
            theta_n: out[1],
            theta_tau: out[2],
            m_n: out[3],
            m_tau: out[4],
            q: out[5],
        }
    }
}

/// X-section values at x for explicit coupling constants.
///
/// The averaged cross moment of the opposite section enters the slope and
/// elevation terms, so the full 12-entry state is required.
fn x_section_raw(g: &ElementGeometry, z: &SectionState, a_c: &[f64; 3], p: f64, x: f64) -> SectionValues {
    let (b, d, nu) = (g.b, g.d, g.nu);
    let [a1, a2, a3] = *a_c;
    let (w0, tn0, tt0, mn0, mt0, q0) = (z[0], z[1], z[2], z[3], z[4], z[5]);
    let c1 = 1.0 / (d * (1.0 - nu * nu));
    let cn = nu / (d * (1.0 - nu * nu));
    let c2 = 1.0 / (d * (1.0 - nu));
    // average of M_n over the opposite (Y) section
    let mny_avg = z[9] + z[11] * b / 2.0 + (p - a1) * b * b / 6.0 - a3 * b / 2.0;
    let q = q0 + a1 * x;
    let m_tau = mt0 + a3 * x;
    let m_n = mn0 + q0 * x + a1 * x * x / 2.0 - a2 * x;
    let theta_tau = tt0 + (mt0 * x + a3 * x * x / 2.0) * c2;
    let theta_n = tn0
        + (mn0 * x + q0 * x * x / 2.0 + a1 * x.powi(3) / 6.0 - a2 * x * x / 2.0) * c1
        - cn * mny_avg * x;
    let w = w0
        + tn0 * x
        + (mn0 * x * x / 2.0 + q0 * x.powi(3) / 6.0 + a1 * x.powi(4) / 24.0 - a2 * x.powi(3) / 6.0)
            * c1
        - cn * mny_avg * x * x / 2.0;
    SectionValues { w, theta_n, theta_tau, m_n, m_tau, q }
}

/// Y-section values at y; mirror of [`x_section_raw`] with the data term
/// split (P - A1) and the constants A2/A3 exchanging roles.
fn y_section_raw(g: &ElementGeometry, z: &SectionState, a_c: &[f64; 3], p: f64, y: f64) -> SectionValues {
    let (a, d, nu) = (g.a, g.d, g.nu);
    let [a1, a2, a3] = *a_c;
    let (w0, tn0, tt0, mn0, mt0, q0) = (z[6], z[7], z[8], z[9], z[10], z[11]);
    let c1 = 1.0 / (d * (1.0 - nu * nu));
    let cn = nu / (d * (1.0 - nu * nu));
    let c2 = 1.0 / (d * (1.0 - nu));
    let mnx_avg = z[3] + z[5] * a / 2.0 + a1 * a * a / 6.0 - a2 * a / 2.0;
    let q = q0 + (p - a1) * y;
    let m_tau = mt0 + a2 * y;
    let m_n = mn0 + q0 * y + (p - a1) * y * y / 2.0 - a3 * y;
    let theta_tau = tt0 + (mt0 * y + a2 * y * y / 2.0) * c2;
    let theta_n = tn0
        + (mn0 * y + q0 * y * y / 2.0 + (p - a1) * y.powi(3) / 6.0 - a3 * y * y / 2.0) * c1
        - cn * mnx_avg * y;
    let w = w0
        + tn0 * y
        + (mn0 * y * y / 2.0
            + q0 * y.powi(3) / 6.0
            + (p - a1) * y.powi(4) / 24.0
            - a3 * y.powi(3) / 6.0)
            * c1
        - cn * mnx_avg * y * y / 2.0;
    SectionValues { w, theta_n, theta_tau, m_n, m_tau, q }
}

/// Residuals of the three center-welding conditions.
fn matching_residual(g: &ElementGeometry, a_c: &[f64; 3], z: &SectionState, p: f64) -> [f64; 3] {
    let sx = x_section_raw(g, z, a_c, p, g.a / 2.0);
    let sy = y_section_raw(g, z, a_c, p, g.b / 2.0);
    [
        sx.w - sy.w,
        sx.theta_n - sy.theta_tau,
        sx.theta_tau - sy.theta_n,
    ]
}

/// Solve m * x = rhs for a 3x3 system (partial pivoting).
fn solve3(m: &[[f64; 3]; 3], rhs: &[f64; 3]) -> Option<[f64; 3]> {
    let mut a = *m;
    let mut x = *rhs;
    for col in 0..3 {
        let piv = (col..3)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[piv][col].abs() < f64::MIN_POSITIVE.sqrt() {
            return None;
        }
        a.swap(col, piv);
        x.swap(col, piv);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            x[row] -= f * x[col];
        }
    }
    for col in (0..3).rev() {
        x[col] /= a[col][col];
        for row in 0..col {
            x[row] -= a[row][col] * x[col];
        }
    }
    Some(x)
}

/// Eliminate the coupling constants for one geometry.
///
/// The welding residual is linear in (A, Z0, P); probing it with unit vectors
/// yields the exact 3x3 system and right-hand sides, no symbolic work needed.
pub fn coupling_coefficients(g: &ElementGeometry) -> Result<CouplingCoefficients> {
    let z0: SectionState = [0.0; 12];
    let mut m = [[0.0; 3]; 3];
    for j in 0..3 {
        let mut a_c = [0.0; 3];
        a_c[j] = 1.0;
        let r = matching_residual(g, &a_c, &z0, 0.0);
        for i in 0..3 {
            m[i][j] = r[i];
        }
    }
    let mut alpha = [[0.0; 12]; 3];
    for k in 0..12 {
        let mut z = [0.0; 12];
        z[k] = 1.0;
        let r = matching_residual(g, &[0.0; 3], &z, 0.0);
        let col = solve3(&m, &[-r[0], -r[1], -r[2]])
            .ok_or(Error::DegenerateCoupling { a: g.a, b: g.b })?;
        for i in 0..3 {
            alpha[i][k] = col[i];
        }
    }
    let r = matching_residual(g, &[0.0; 3], &z0, 1.0);
    let beta = solve3(&m, &[-r[0], -r[1], -r[2]])
        .ok_or(Error::DegenerateCoupling { a: g.a, b: g.b })?;
    Ok(CouplingCoefficients { alpha, beta })
}

type GeomKey = [u64; 4];

fn geom_key(g: &ElementGeometry) -> GeomKey {
    [g.a.to_bits(), g.b.to_bits(), g.d.to_bits(), g.nu.to_bits()]
}

static COUPLING_CACHE: OnceLock<RwLock<HashMap<GeomKey, Arc<CouplingCoefficients>>>> =
    OnceLock::new();

/// Shared coupling coefficients, computed once per distinct geometry.
///
/// Reads are lock-shared; a miss takes the write lock only to publish.
pub fn cached_coupling(g: &ElementGeometry) -> Result<Arc<CouplingCoefficients>> {
    let cache = COUPLING_CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    let key = geom_key(g);
    if let Some(cc) = cache.read().unwrap().get(&key) {
        return Ok(cc.clone());
    }
    let cc = Arc::new(coupling_coefficients(g)?);
    let mut map = cache.write().unwrap();
    Ok(map.entry(key).or_insert(cc).clone())
}

fn check_range(t: f64, span: f64, what: &'static str) -> Result<()> {
    let slack = span * 1e-12;
    if t < -slack || t > span + slack || !t.is_finite() {
        return Err(Error::OutOfRange { what, value: t, lo: 0.0, hi: span });
    }
    Ok(())
}

/// Linear map giving the X-section values at coordinate x in [0, a].
pub fn transfer_x(g: &ElementGeometry, cc: &CouplingCoefficients, x: f64) -> Result<TransferOperator> {
    check_range(x, g.a, "x")?;
    transfer(g, cc, Axis::X, x)
}

/// Linear map giving the Y-section values at coordinate y in [0, b].
pub fn transfer_y(g: &ElementGeometry, cc: &CouplingCoefficients, y: f64) -> Result<TransferOperator> {
    check_range(y, g.b, "y")?;
    transfer(g, cc, Axis::Y, y)
}

fn transfer(g: &ElementGeometry, cc: &CouplingCoefficients, axis: Axis, t: f64) -> Result<TransferOperator> {
    let raw = match axis {
        Axis::X => x_section_raw,
        Axis::Y => y_section_raw,
    };
    let mut coeff = [[0.0; 12]; 6];
    for k in 0..12 {
        let mut z = [0.0; 12];
        z[k] = 1.0;
        let a_c = [cc.alpha[0][k], cc.alpha[1][k], cc.alpha[2][k]];
        let s = raw(g, &z, &a_c, 0.0, t).as_array();
        for m in 0..6 {
            coeff[m][k] = s[m];
        }
    }
    let load = raw(g, &[0.0; 12], &cc.beta, 1.0, t).as_array();
    Ok(TransferOperator { coeff, load })
}

/// Section values at coordinate t along the chosen section.
pub fn evaluate_section(
    g: &ElementGeometry,
    cc: &CouplingCoefficients,
    z0: &SectionState,
    p: f64,
    axis: Axis,
    t: f64,
) -> Result<SectionValues> {
    let a_c = cc.constants(z0, p);
    match axis {
        Axis::X => {
            check_range(t, g.a, "x")?;
            Ok(x_section_raw(g, z0, &a_c, p, t))
        }
        Axis::Y => {
            check_range(t, g.b, "y")?;
            Ok(y_section_raw(g, z0, &a_c, p, t))
        }
    }
}

/// Discrete bending energy of one element: center curvatures squared times
/// area. The twist enters once per section, which doubles it overall.
pub fn element_energy(
    g: &ElementGeometry,
    cc: &CouplingCoefficients,
    z0: &SectionState,
    p: f64,
) -> f64 {
    let a_c = cc.constants(z0, p);
    let sx = x_section_raw(g, z0, &a_c, p, g.a / 2.0);
    let sy = y_section_raw(g, z0, &a_c, p, g.b / 2.0);
    (sx.m_n * sx.m_n + sx.m_tau * sx.m_tau + sy.m_n * sy.m_n + sy.m_tau * sy.m_tau) * g.a * g.b
}
