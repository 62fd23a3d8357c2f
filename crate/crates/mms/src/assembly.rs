//! Global system assembly and sparse solve.
//!
//! Unknowns: 24 per element (inlet + outlet states of both sections) plus
//! one multiplier per point constraint. Rows, in order:
//!
//! * connection — outlet block minus transferred inlet block, 12 per element;
//! * conjugation — state continuity across interior edges, 6 per edge;
//! * boundary — 3 per element side on the domain boundary;
//! * target — one elevation equation per point constraint.
//!
//! The count identity 24*nx*ny + c = 12*nx*ny + 6*edges + 3*sides + c makes
//! the system square. Rows are scaled by their largest coefficient before
//! factorization; the reported residual is the worst row defect of the
//! scaled system. Multipliers are eliminated by a Schur complement so their
//! (possibly near-dense) columns never enter the sparse factorization.

use std::collections::HashMap;
use std::io::Write as IoWrite;
use std::sync::Arc;

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};

use crate::boundary::{corner_rows, side_rows, Corner, CornerVariant, SideCondition};
use crate::constraints::{resolve_constraints, PointConstraint, ResolvedConstraint, Spreading};
use crate::element::{cached_coupling, transfer_x, transfer_y, CouplingCoefficients, TransferOperator};
use crate::error::{Error, Result};
use crate::mesh::{Mesh, Side};

/// Boundary conditions resolved per element side, plus corner supports.
///
/// Corner supports replace the plain rows on both element sides meeting at
/// that corner.
#[derive(Debug, Clone)]
pub struct BoundaryPlan {
    nx: usize,
    ny: usize,
    left: Vec<SideCondition>,
    right: Vec<SideCondition>,
    bottom: Vec<SideCondition>,
    top: Vec<SideCondition>,
    corners: Vec<(Corner, CornerVariant)>,
}

impl BoundaryPlan {
    /// Same condition on every element side of the boundary.
    pub fn uniform(mesh: &Mesh, cond: SideCondition) -> Self {
        let (nx, ny) = (mesh.nx(), mesh.ny());
        Self {
            nx,
            ny,
            left: vec![cond; ny],
            right: vec![cond; ny],
            bottom: vec![cond; nx],
            top: vec![cond; nx],
            corners: Vec::new(),
        }
    }

    pub fn all_free(mesh: &Mesh) -> Self {
        Self::uniform(mesh, SideCondition::Free)
    }

    /// Replace one domain side; `conds` runs bottom-to-top on vertical sides
    /// and left-to-right on horizontal ones, one entry per element.
    pub fn set_side(&mut self, side: Side, conds: Vec<SideCondition>) -> Result<()> {
        let want = if side.is_vertical() { self.ny } else { self.nx };
        if conds.len() != want {
            return Err(Error::BoundaryConflict(format!(
                "{side} expects {want} conditions, got {}",
                conds.len()
            )));
        }
        *self.side_mut(side) = conds;
        Ok(())
    }

    pub fn set_corner(&mut self, corner: Corner, variant: CornerVariant) -> Result<()> {
        if self.corners.iter().any(|(c, _)| *c == corner) {
            return Err(Error::BoundaryConflict(format!(
                "corner {corner:?} supported twice"
            )));
        }
        self.corners.push((corner, variant));
        Ok(())
    }

    pub fn side(&self, side: Side) -> &[SideCondition] {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
            Side::Bottom => &self.bottom,
            Side::Top => &self.top,
        }
    }

    pub fn corners(&self) -> &[(Corner, CornerVariant)] {
        &self.corners
    }

    fn side_mut(&mut self, side: Side) -> &mut Vec<SideCondition> {
        match side {
            Side::Left => &mut self.left,
            Side::Right => &mut self.right,
            Side::Bottom => &mut self.bottom,
            Side::Top => &mut self.top,
        }
    }

    /// Map each corner support onto the element sides it claims.
    fn corner_claims(&self, mesh: &Mesh) -> Result<HashMap<(Side, usize), (Corner, CornerVariant)>> {
        let (nx, ny) = (mesh.nx(), mesh.ny());
        let mut claims = HashMap::new();
        for &(corner, variant) in &self.corners {
            let (ix, iy) = match corner {
                Corner::BottomLeft => (0, 0),
                Corner::BottomRight => (nx - 1, 0),
                Corner::TopLeft => (0, ny - 1),
                Corner::TopRight => (nx - 1, ny - 1),
            };
            let e = mesh.id(ix, iy);
            let sides = match corner {
                Corner::BottomLeft => [Side::Left, Side::Bottom],
                Corner::BottomRight => [Side::Right, Side::Bottom],
                Corner::TopLeft => [Side::Left, Side::Top],
                Corner::TopRight => [Side::Right, Side::Top],
            };
            for side in sides {
                if claims.insert((side, e), (corner, variant)).is_some() {
                    return Err(Error::BoundaryConflict(format!(
                        "two corner supports claim the {side} side of element {e}"
                    )));
                }
            }
        }
        Ok(claims)
    }
}

/// Solved global system.
#[derive(Debug, Clone)]
pub struct Solution {
    /// 24-entry state per element: inlet X, inlet Y, outlet X, outlet Y.
    pub states: Vec<[f64; 24]>,
    /// One multiplier per point constraint, in input order.
    pub multipliers: Vec<f64>,
    /// Effective distributed load on each element.
    pub loads: Vec<f64>,
    /// Worst row defect of the scaled system.
    pub residual: f64,
    pub unknowns: usize,
}

impl Solution {
    pub fn inlet(&self, e: usize) -> [f64; 12] {
        self.states[e][..12].try_into().unwrap()
    }
}

#[derive(Debug, Clone, Copy)]
enum RowTag {
    Connection { element: usize, local: usize },
    Conjugation { lo: usize, hi: usize },
    Boundary { element: usize, side: Side },
    Target { constraint: usize },
}

impl RowTag {
    fn describe(&self) -> String {
        match *self {
            RowTag::Connection { element, local } => {
                format!("connection row of element {element}, state entry {local}")
            }
            RowTag::Conjugation { lo, hi } => {
                format!("conjugation row between elements {lo} and {hi}")
            }
            RowTag::Boundary { element, side } => {
                format!("boundary row on the {side} side of element {element}")
            }
            RowTag::Target { constraint } => format!("target row of constraint {constraint}"),
        }
    }
}

/// Flat row-major sparse row store.
struct Rows {
    offs: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    rhs: Vec<f64>,
    tags: Vec<RowTag>,
}

impl Rows {
    fn with_capacity(nrows: usize, nnz: usize) -> Self {
        let mut offs = Vec::with_capacity(nrows + 1);
        offs.push(0);
        Self {
            offs,
            cols: Vec::with_capacity(nnz),
            vals: Vec::with_capacity(nnz),
            rhs: Vec::with_capacity(nrows),
            tags: Vec::with_capacity(nrows),
        }
    }

    fn push(&mut self, tag: RowTag, entries: impl IntoIterator<Item = (usize, f64)>, rhs: f64) {
        for (c, v) in entries {
            if v != 0.0 {
                self.cols.push(c);
                self.vals.push(v);
            }
        }
        self.offs.push(self.cols.len());
        self.rhs.push(rhs);
        self.tags.push(tag);
    }

    fn len(&self) -> usize {
        self.rhs.len()
    }

    fn row(&self, r: usize) -> (&[usize], &[f64], f64) {
        let (lo, hi) = (self.offs[r], self.offs[r + 1]);
        (&self.cols[lo..hi], &self.vals[lo..hi], self.rhs[r])
    }
}

struct Assembled {
    n: usize,
    rows: Rows,
    lam_weights: HashMap<usize, Vec<(usize, f64)>>,
    q: f64,
}

/// Per-geometry element operators, computed once per distinct size.
struct Operators {
    cc: Arc<CouplingCoefficients>,
    to_x: TransferOperator,
    to_y: TransferOperator,
}

fn operators_for(mesh: &Mesh) -> Result<HashMap<[u64; 2], Operators>> {
    let mut ops = HashMap::new();
    for iy in 0..mesh.ny() {
        for ix in 0..mesh.nx() {
            let g = mesh.geometry(ix, iy);
            ops.entry([g.a.to_bits(), g.b.to_bits()])
                .or_insert(None::<Operators>);
        }
    }
    for (key, slot) in ops.iter_mut() {
        let g = crate::element::ElementGeometry {
            a: f64::from_bits(key[0]),
            b: f64::from_bits(key[1]),
            d: mesh.spec.material.d,
            nu: mesh.spec.material.nu,
        };
        let cc = cached_coupling(&g)?;
        let to_x = transfer_x(&g, &cc, g.a)?;
        let to_y = transfer_y(&g, &cc, g.b)?;
        *slot = Some(Operators { cc, to_x, to_y });
    }
    Ok(ops.into_iter().map(|(k, v)| (k, v.unwrap())).collect())
}

fn assemble(
    mesh: &Mesh,
    plan: &BoundaryPlan,
    q: f64,
    resolved: &[ResolvedConstraint],
) -> Result<Assembled> {
    if plan.nx != mesh.nx() || plan.ny != mesh.ny() {
        return Err(Error::Assembly(format!(
            "boundary plan sized {} x {} used with a {} x {} mesh",
            plan.nx,
            plan.ny,
            mesh.nx(),
            mesh.ny()
        )));
    }
    let (nx, ny) = (mesh.nx(), mesh.ny());
    let m = mesh.element_count();
    let nlam = resolved.len();
    let n = 24 * m + nlam;
    let lam_col = |c: usize| 24 * m + c;

    let mut lam_weights: HashMap<usize, Vec<(usize, f64)>> = HashMap::new();
    for (c, rc) in resolved.iter().enumerate() {
        for &(e, w) in &rc.weights {
            lam_weights.entry(e).or_default().push((c, w));
        }
    }
    if q != 0.0 {
        if let Some(e) = lam_weights.keys().min() {
            return Err(Error::ConstraintWithLoad { element: *e });
        }
    }

    let ops = operators_for(mesh)?;
    let op = |ix: usize, iy: usize| -> &Operators {
        let g = mesh.geometry(ix, iy);
        &ops[&[g.a.to_bits(), g.b.to_bits()]]
    };

    // ~13 entries per connection row dominates the count
    let mut rows = Rows::with_capacity(n, 14 * 12 * m + 12 * mesh.interior_edge_count() + 6 * (nx + ny) * 2);

    // connection rows: outlet = transfer(inlet) + load * loadcol
    for iy in 0..ny {
        for ix in 0..nx {
            let e = mesh.id(ix, iy);
            let base = 24 * e;
            let lam = lam_weights.get(&e);
            let o = op(ix, iy);
            for (to, out_block) in [(&o.to_x, 12), (&o.to_y, 18)] {
                for p in 0..6 {
                    let head = std::iter::once((base + out_block + p, 1.0));
                    let inlet = (0..12).map(|k| (base + k, -to.coeff[p][k]));
                    let lam_cols = lam
                        .into_iter()
                        .flatten()
                        .map(|&(c, w)| (lam_col(c), -w * to.load[p]));
                    rows.push(
                        RowTag::Connection { element: e, local: out_block + p },
                        head.chain(inlet).chain(lam_cols),
                        q * to.load[p],
                    );
                }
            }
        }
    }

    // conjugation: vertical edges first, then horizontal
    for iy in 0..ny {
        for ix in 0..nx - 1 {
            let b1 = 24 * mesh.id(ix, iy);
            let b2 = 24 * mesh.id(ix + 1, iy);
            for i in 0..6 {
                rows.push(
                    RowTag::Conjugation { lo: b1 / 24, hi: b2 / 24 },
                    [(b1 + 12 + i, 1.0), (b2 + i, -1.0)],
                    0.0,
                );
            }
        }
    }
    for iy in 0..ny - 1 {
        for ix in 0..nx {
            let b1 = 24 * mesh.id(ix, iy);
            let b2 = 24 * mesh.id(ix, iy + 1);
            for i in 0..6 {
                rows.push(
                    RowTag::Conjugation { lo: b1 / 24, hi: b2 / 24 },
                    [(b1 + 18 + i, 1.0), (b2 + 6 + i, -1.0)],
                    0.0,
                );
            }
        }
    }

    // boundary rows
    let claims = plan.corner_claims(mesh)?;
    let emit = |rows: &mut Rows, side: Side, ix: usize, iy: usize, index: usize| -> Result<()> {
        let e = mesh.id(ix, iy);
        let g = mesh.geometry(ix, iy);
        let half = if side.is_vertical() { g.b / 2.0 } else { g.a / 2.0 };
        let emitted = match claims.get(&(side, e)) {
            Some(&(corner, variant)) => corner_rows(variant, side, corner, half)?,
            None => side_rows(side, &plan.side(side)[index]),
        };
        for r in emitted {
            rows.push(
                RowTag::Boundary { element: e, side },
                r.cols.iter().map(|&(l, v)| (24 * e + l, v)),
                r.rhs,
            );
        }
        Ok(())
    };
    for iy in 0..ny {
        emit(&mut rows, Side::Left, 0, iy, iy)?;
        emit(&mut rows, Side::Right, nx - 1, iy, iy)?;
    }
    for ix in 0..nx {
        emit(&mut rows, Side::Bottom, ix, 0, ix)?;
        emit(&mut rows, Side::Top, ix, ny - 1, ix)?;
    }

    // constraint target rows: elevation at the attached element's center.
    // Only the constraint's own multiplier enters its target row (at the
    // full load column); overlapping spread discs act through the
    // connection rows alone.
    for (c, rc) in resolved.iter().enumerate() {
        let (ix, iy) = mesh.pos(rc.element);
        let g = mesh.geometry(ix, iy);
        let o = op(ix, iy);
        let tc = transfer_x(&g, &o.cc, g.a / 2.0)?;
        let base = 24 * rc.element;
        let inlet = (0..12).map(|k| (base + k, tc.coeff[0][k]));
        rows.push(
            RowTag::Target { constraint: c },
            inlet.chain([(lam_col(c), tc.load[0])]),
            rc.constraint.target,
        );
    }

    if rows.len() != n {
        return Err(Error::Assembly(format!(
            "assembled {} rows for {n} unknowns",
            rows.len()
        )));
    }
    Ok(Assembled { n, rows, lam_weights, q })
}

fn describe_unknown(mesh: &Mesh, idx: usize) -> String {
    let m = mesh.element_count();
    if idx < 24 * m {
        let (e, local) = (idx / 24, idx % 24);
        let (ix, iy) = mesh.pos(e);
        format!("element ({ix}, {iy}) state entry {local}")
    } else {
        format!("constraint multiplier {}", idx - 24 * m)
    }
}

/// Assemble and solve the plate problem.
///
/// `q` is the uniform distributed load; it cannot coexist with constraint
/// loading on any element. Constraints each add one multiplier unknown.
///
/// Constrained systems eliminate the multipliers through a Schur complement
/// on the state block: a spread multiplier column touches every element
/// inside the cutoff disc, and factoring such near-dense columns directly
/// explodes the fill-in (gigabytes on a 251 x 251 mesh). The state block
/// keeps the plain banded structure, so one factorization plus one extra
/// right-hand side per multiplier does the same job in the memory footprint
/// of an unconstrained run. A singular state block (say a floating plate
/// held only by pins) falls back to the full bordered matrix.
pub fn solve(
    mesh: &Mesh,
    plan: &BoundaryPlan,
    q: f64,
    constraints: &[PointConstraint],
    spreading: Option<Spreading>,
) -> Result<Solution> {
    let resolved = resolve_constraints(mesh, constraints, spreading)?;
    let asm = assemble(mesh, plan, q, &resolved)?;
    let n = asm.n;
    let m = mesh.element_count();
    let n24 = 24 * m;
    let k = n - n24;

    let (scales, scaled_rhs) = scale_rows(&asm)?;
    let x = if k == 0 {
        solve_bordered(mesh, &asm, &scales, &scaled_rhs)?
    } else {
        match solve_schur(mesh, &asm, &scales, &scaled_rhs, n24, k) {
            Ok(x) => x,
            Err(_) => solve_bordered(mesh, &asm, &scales, &scaled_rhs)?,
        }
    };

    let mut residual = 0.0f64;
    for r in 0..n {
        let (cols, vals, _) = asm.rows.row(r);
        let mut acc = -scaled_rhs[r];
        for (&c, &v) in cols.iter().zip(vals) {
            acc += v / scales[r] * x[c];
        }
        residual = residual.max(acc.abs());
    }

    let mut states = vec![[0.0; 24]; m];
    for (e, st) in states.iter_mut().enumerate() {
        st.copy_from_slice(&x[24 * e..24 * (e + 1)]);
    }
    let multipliers = x[n24..].to_vec();
    let mut loads = vec![asm.q; m];
    for (e, ws) in &asm.lam_weights {
        loads[*e] = ws.iter().map(|&(c, w)| w * multipliers[c]).sum();
    }

    Ok(Solution { states, multipliers, loads, residual, unknowns: n })
}

fn scale_rows(asm: &Assembled) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = asm.rows.len();
    let mut scales = vec![0.0; n];
    let mut scaled_rhs = vec![0.0; n];
    for r in 0..n {
        let (_, vals, rhs) = asm.rows.row(r);
        let s = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if s == 0.0 {
            return Err(Error::Assembly(format!(
                "row {r} ({}) has no coefficients",
                asm.rows.tags[r].describe()
            )));
        }
        scales[r] = s;
        scaled_rhs[r] = rhs / s;
    }
    Ok((scales, scaled_rhs))
}

/// Factor a square sparse system, releasing the triplet buffer before the
/// fill-heavy factorization.
fn factorize(
    mesh: &Mesh,
    n: usize,
    triplets: Vec<Triplet<usize, usize, f64>>,
) -> Result<faer::sparse::linalg::solvers::Lu<usize, f64>> {
    let mat = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets)
        .map_err(|e| Error::Solve(format!("matrix build: {e:?}")))?;
    // a structurally deficient system usually means untouched unknowns
    let mut seen = vec![false; n];
    for t in &triplets {
        seen[t.col] = true;
    }
    drop(triplets);
    mat.sp_lu().map_err(|e| {
        let missing: Vec<String> = seen
            .iter()
            .enumerate()
            .filter(|(_, s)| !**s)
            .take(4)
            .map(|(i, _)| describe_unknown(mesh, i))
            .collect();
        if missing.is_empty() {
            Error::Solve(format!("{e:?}"))
        } else {
            Error::Solve(format!("{e:?}; unknowns never referenced: {}", missing.join(", ")))
        }
    })
}

/// Direct factorization of the full system, multiplier columns included.
fn solve_bordered(
    mesh: &Mesh,
    asm: &Assembled,
    scales: &[f64],
    scaled_rhs: &[f64],
) -> Result<Vec<f64>> {
    let n = asm.n;
    let mut triplets = Vec::with_capacity(asm.rows.cols.len());
    for r in 0..n {
        let (cols, vals, _) = asm.rows.row(r);
        for (&c, &v) in cols.iter().zip(vals) {
            triplets.push(Triplet::new(r, c, v / scales[r]));
        }
    }
    let lu = factorize(mesh, n, triplets)?;
    let rhs = faer::Mat::from_fn(n, 1, |i, _| scaled_rhs[i]);
    let x = lu.solve(&rhs);
    Ok((0..n).map(|i| x[(i, 0)]).collect())
}

/// Factor the state block alone and eliminate the multipliers.
///
/// With states x and multipliers lam the system is `K x + B lam = f` over
/// the structural rows and `R x + D lam = t` over the target rows. Columns
/// 1.. of the block solve hold -K^-1 B, so x = xb0 + sum_j lam_j xb_{1+j}
/// and the multipliers satisfy the dense k x k system
/// `(D + R [xb_1 .. xb_k]) lam = t - R xb0`.
fn solve_schur(
    mesh: &Mesh,
    asm: &Assembled,
    scales: &[f64],
    scaled_rhs: &[f64],
    n24: usize,
    k: usize,
) -> Result<Vec<f64>> {
    debug_assert!(asm
        .rows
        .tags[n24..]
        .iter()
        .all(|t| matches!(t, RowTag::Target { .. })));
    let mut triplets = Vec::with_capacity(asm.rows.cols.len());
    for r in 0..n24 {
        let (cols, vals, _) = asm.rows.row(r);
        for (&c, &v) in cols.iter().zip(vals) {
            if c < n24 {
                triplets.push(Triplet::new(r, c, v / scales[r]));
            }
        }
    }
    let lu = factorize(mesh, n24, triplets)?;
    let mut rhs = faer::Mat::<f64>::zeros(n24, k + 1);
    for r in 0..n24 {
        let (cols, vals, _) = asm.rows.row(r);
        rhs[(r, 0)] = scaled_rhs[r];
        for (&c, &v) in cols.iter().zip(vals) {
            if c >= n24 {
                rhs[(r, 1 + c - n24)] = -v / scales[r];
            }
        }
    }
    let xb = lu.solve(&rhs);
    drop(lu);

    let mut s = vec![0.0; k * k];
    let mut srhs = vec![0.0; k];
    for i in 0..k {
        let r = n24 + i;
        let (cols, vals, _) = asm.rows.row(r);
        srhs[i] = scaled_rhs[r];
        for (&c, &v) in cols.iter().zip(vals) {
            let v = v / scales[r];
            if c < n24 {
                srhs[i] -= v * xb[(c, 0)];
                for j in 0..k {
                    s[i * k + j] += v * xb[(c, 1 + j)];
                }
            } else {
                s[i * k + (c - n24)] += v;
            }
        }
    }
    let lam = gauss_solve(k, &mut s, &mut srhs)
        .ok_or_else(|| Error::Solve("singular multiplier block".into()))?;

    let mut x = vec![0.0; n24 + k];
    for (i, xi) in x[..n24].iter_mut().enumerate() {
        let mut v = xb[(i, 0)];
        for (j, lj) in lam.iter().enumerate() {
            v += lj * xb[(i, 1 + j)];
        }
        *xi = v;
    }
    x[n24..].copy_from_slice(&lam);
    Ok(x)
}

/// Dense row-major Gaussian elimination with partial pivoting; `None` when
/// a pivot degenerates.
fn gauss_solve(k: usize, a: &mut [f64], b: &mut [f64]) -> Option<Vec<f64>> {
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return None;
    }
    for col in 0..k {
        let piv = (col..k).max_by(|&i, &j| a[i * k + col].abs().total_cmp(&a[j * k + col].abs()))?;
        if a[piv * k + col].abs() <= scale * 1e-14 {
            return None;
        }
        if piv != col {
            for j in 0..k {
                a.swap(piv * k + j, col * k + j);
            }
            b.swap(piv, col);
        }
        for row in col + 1..k {
            let f = a[row * k + col] / a[col * k + col];
            if f != 0.0 {
                for j in col..k {
                    a[row * k + j] -= f * a[col * k + j];
                }
                b[row] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; k];
    for col in (0..k).rev() {
        let mut v = b[col];
        for j in col + 1..k {
            v -= a[col * k + j] * x[j];
        }
        x[col] = v / a[col * k + col];
    }
    Some(x)
}

/// Write the unscaled assembled system as COO text: `row col value` lines,
/// then one `rhs <row> <value>` line per row.
pub fn dump_matrix(
    mesh: &Mesh,
    plan: &BoundaryPlan,
    q: f64,
    constraints: &[PointConstraint],
    spreading: Option<Spreading>,
    out: &mut dyn IoWrite,
) -> Result<()> {
    let resolved = resolve_constraints(mesh, constraints, spreading)?;
    let asm = assemble(mesh, plan, q, &resolved)?;
    writeln!(out, "# {0} rows, {0} cols", asm.n)?;
    for r in 0..asm.n {
        let (cols, vals, _) = asm.rows.row(r);
        for (&c, &v) in cols.iter().zip(vals) {
            writeln!(out, "{r} {c} {v:.17e}")?;
        }
    }
    for r in 0..asm.n {
        writeln!(out, "rhs {r} {:.17e}", asm.rows.row(r).2)?;
    }
    Ok(())
}
