//! Interior point constraints and load spreading.
//!
//! A point constraint pins the reconstructed elevation at an interior point
//! to a target value and introduces one unknown load multiplier. The
//! multiplier either acts on the containing element alone, or is spread over
//! nearby elements with a rational-kernel weight that decays with the
//! distance between element centers.

use crate::error::{Error, Result};
use crate::mesh::Mesh;

/// Pin the surface to `target` at (x, y).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointConstraint {
    pub x: f64,
    pub y: f64,
    pub target: f64,
}

/// Load-spreading control. `zeta` scales the kernel width relative to the
/// smaller domain extent; large values approach a uniform load over the
/// cutoff disc. The spreading radius defaults to [`spread_cutoff`] and can be
/// tightened (or widened) per run; shrinking it toward zero recovers the
/// single-element load.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spreading {
    pub zeta: f64,
    /// Maximum center-to-center spreading distance; `None` for the default.
    pub cutoff: Option<f64>,
}

impl Spreading {
    pub fn new(zeta: f64) -> Result<Self> {
        if !(zeta > 0.0 && zeta.is_finite()) {
            return Err(Error::InvalidGeometry(format!("zeta = {zeta}")));
        }
        Ok(Self { zeta, cutoff: None })
    }

    pub fn with_cutoff(zeta: f64, cutoff: f64) -> Result<Self> {
        if !(cutoff > 0.0 && cutoff.is_finite()) {
            return Err(Error::InvalidGeometry(format!("cutoff = {cutoff}")));
        }
        let mut s = Self::new(zeta)?;
        s.cutoff = Some(cutoff);
        Ok(s)
    }
}

/// Weight of an element at center distance `d` from the constrained element.
/// `l_min` is the smaller domain extent.
pub fn kernel_weight(d: f64, zeta: f64, l_min: f64) -> f64 {
    let r = d / (zeta * l_min);
    1.0 / (1.0 + r * r)
}

/// Elements receive load only within this radius of the constrained element.
pub fn spread_cutoff(l_min: f64) -> f64 {
    l_min / 5.0
}

/// One constraint resolved against a mesh: the element it attaches to and
/// the per-element load weights of its multiplier.
#[derive(Debug, Clone)]
pub struct ResolvedConstraint {
    pub constraint: PointConstraint,
    /// Element the target row is written on.
    pub element: usize,
    /// (element, weight) pairs; a lone `(element, 1.0)` without spreading.
    pub weights: Vec<(usize, f64)>,
}

/// Attach each constraint to its containing element and compute its spread
/// weights. Two constraints may not attach to the same element.
pub fn resolve_constraints(
    mesh: &Mesh,
    constraints: &[PointConstraint],
    spreading: Option<Spreading>,
) -> Result<Vec<ResolvedConstraint>> {
    let l_min = mesh.spec.rect.width().min(mesh.spec.rect.height());
    let cutoff = spreading
        .and_then(|s| s.cutoff)
        .unwrap_or_else(|| spread_cutoff(l_min));
    let mut out = Vec::with_capacity(constraints.len());
    let mut taken = std::collections::HashMap::new();
    for (c, pc) in constraints.iter().enumerate() {
        let (ix, iy) = mesh.locate(pc.x, pc.y)?;
        let e = mesh.id(ix, iy);
        if taken.insert(e, c).is_some() {
            return Err(Error::ConstraintOverlap { element: e });
        }
        let weights = match spreading {
            None => vec![(e, 1.0)],
            Some(sp) => {
                let (cx, cy) = mesh.center(ix, iy);
                let mut w = Vec::new();
                for jy in 0..mesh.ny() {
                    for jx in 0..mesh.nx() {
                        let (ex, ey) = mesh.center(jx, jy);
                        let d = (ex - cx).hypot(ey - cy);
                        if d <= cutoff {
                            w.push((mesh.id(jx, jy), kernel_weight(d, sp.zeta, l_min)));
                        }
                    }
                }
                w
            }
        };
        out.push(ResolvedConstraint { constraint: *pc, element: e, weights });
    }
    Ok(out)
}
