//! Boundary conditions: per-side row emission and corner supports.
//!
//! Every element side lying on the domain boundary contributes exactly three
//! rows to the global system. The rows act on the 6-block of the element
//! state that faces the boundary (see [`Side::block`]); which block entries
//! they pin depends on the condition kind. Data values are sampled at the
//! midpoint of the element side.

use crate::error::{Error, Result};
use crate::mesh::Side;

/// Local block entries within a side's 6-block.
const B_W: usize = 0;
const B_THETA_N: usize = 1;
const B_THETA_TAU: usize = 2;
const B_M_N: usize = 3;
const B_M_TAU: usize = 4;
const B_Q: usize = 5;

/// How a domain side is constrained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConditionKind {
    /// Pin elevation and both slopes.
    Kinematic,
    /// Pin elevation and both moments.
    Curvature,
    /// Zero moments and shear; the edge floats.
    Free,
}

impl std::str::FromStr for ConditionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "kinematic" | "kin" => Ok(ConditionKind::Kinematic),
            "curvature" | "cur" => Ok(ConditionKind::Curvature),
            "free" => Ok(ConditionKind::Free),
            other => Err(Error::BoundaryConflict(format!(
                "unknown boundary kind {other:?}"
            ))),
        }
    }
}

/// Condition of one element side, data already mapped to section parameters.
///
/// For kinematic sides the triple is (w, theta_n, theta_tau); for curvature
/// sides (w, m_n, m_tau); n is the along-side direction and tau the
/// transverse one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SideCondition {
    Kinematic { w: f64, theta_n: f64, theta_tau: f64 },
    Curvature { w: f64, m_n: f64, m_tau: f64 },
    Free,
}

/// One boundary row: sparse coefficients over the element's 24 local state
/// entries plus a right-hand side.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryRow {
    pub cols: Vec<(usize, f64)>,
    pub rhs: f64,
}

impl BoundaryRow {
    fn pin(local: usize, rhs: f64) -> Self {
        Self { cols: vec![(local, 1.0)], rhs }
    }
}

/// The three rows for a plain (non-corner) element side.
pub fn side_rows(side: Side, cond: &SideCondition) -> [BoundaryRow; 3] {
    let sb = side.block();
    match *cond {
        SideCondition::Kinematic { w, theta_n, theta_tau } => [
            BoundaryRow::pin(sb + B_W, w),
            BoundaryRow::pin(sb + B_THETA_N, theta_n),
            BoundaryRow::pin(sb + B_THETA_TAU, theta_tau),
        ],
        SideCondition::Curvature { w, m_n, m_tau } => [
            BoundaryRow::pin(sb + B_W, w),
            BoundaryRow::pin(sb + B_M_N, m_n),
            BoundaryRow::pin(sb + B_M_TAU, m_tau),
        ],
        SideCondition::Free => [
            BoundaryRow::pin(sb + B_M_N, 0.0),
            BoundaryRow::pin(sb + B_M_TAU, 0.0),
            BoundaryRow::pin(sb + B_Q, 0.0),
        ],
    }
}

/// Corner support model, in increasing fidelity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CornerVariant {
    /// Zero elevation at the side midpoint.
    B,
    /// Zero elevation extrapolated to the corner itself.
    BA,
    /// As BA, plus the transverse moment extrapolated to the corner.
    BAM,
}

impl std::str::FromStr for CornerVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "B" => Ok(CornerVariant::B),
            "BA" => Ok(CornerVariant::BA),
            "BAM" => Ok(CornerVariant::BAM),
            other => Err(Error::BoundaryConflict(format!(
                "unknown corner variant {other:?}"
            ))),
        }
    }
}

/// A domain corner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Corner {
    BottomLeft,
    BottomRight,
    TopLeft,
    TopRight,
}

impl Corner {
    pub const ALL: [Corner; 4] = [
        Corner::BottomLeft,
        Corner::BottomRight,
        Corner::TopLeft,
        Corner::TopRight,
    ];

    pub fn touches(self, side: Side) -> bool {
        match self {
            Corner::BottomLeft => matches!(side, Side::Bottom | Side::Left),
            Corner::BottomRight => matches!(side, Side::Bottom | Side::Right),
            Corner::TopLeft => matches!(side, Side::Top | Side::Left),
            Corner::TopRight => matches!(side, Side::Top | Side::Right),
        }
    }

    /// Signed distance from the side midpoint to this corner along the side:
    /// negative toward the low end of the transverse coordinate.
    pub fn offset_on(self, side: Side, half: f64) -> Result<f64> {
        if !self.touches(side) {
            return Err(Error::CornerSide { side, corner: self });
        }
        let toward_high = match side {
            // transverse coordinate is y; high end is the top
            Side::Left | Side::Right => matches!(self, Corner::TopLeft | Corner::TopRight),
            // transverse coordinate is x; high end is the right
            Side::Bottom | Side::Top => {
                matches!(self, Corner::BottomRight | Corner::TopRight)
            }
        };
        Ok(if toward_high { half } else { -half })
    }
}

impl std::str::FromStr for Corner {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "bottomleft" | "bl" => Ok(Corner::BottomLeft),
            "bottomright" | "br" => Ok(Corner::BottomRight),
            "topleft" | "tl" => Ok(Corner::TopLeft),
            "topright" | "tr" => Ok(Corner::TopRight),
            other => Err(Error::BoundaryConflict(format!("unknown corner {other:?}"))),
        }
    }
}

/// Rows for an element side carrying a corner support.
///
/// `half` is half the element extent transverse to the side (b/2 on
/// left/right sides, a/2 on bottom/top). The side's own values live at the
/// midpoint; variants BA and BAM extrapolate linearly to the corner using
/// the transverse slope (and twist) entries of the block.
pub fn corner_rows(
    variant: CornerVariant,
    side: Side,
    corner: Corner,
    half: f64,
) -> Result<[BoundaryRow; 3]> {
    let offs = corner.offset_on(side, half)?;
    let sb = side.block();
    let w_row = match variant {
        CornerVariant::B => BoundaryRow::pin(sb + B_W, 0.0),
        _ => BoundaryRow {
            cols: vec![(sb + B_W, 1.0), (sb + B_THETA_TAU, offs)],
            rhs: 0.0,
        },
    };
    let m_tau_row = match variant {
        CornerVariant::BAM => BoundaryRow {
            cols: vec![(sb + B_M_TAU, 1.0), (sb + B_Q, offs)],
            rhs: 0.0,
        },
        _ => BoundaryRow::pin(sb + B_M_TAU, 0.0),
    };
    Ok([w_row, BoundaryRow::pin(sb + B_M_N, 0.0), m_tau_row])
}

/// Boundary data tabulated along one domain side.
///
/// `s` is the absolute coordinate along the side (x on bottom/top, y on
/// left/right). Lookups interpolate linearly and refuse to extrapolate
/// beyond a small slack.
#[derive(Debug, Clone)]
pub struct TabulatedSide {
    pub kind: ConditionKind,
    /// (s, w, d1, d2) sorted by s; d1/d2 are theta_n/theta_tau for kinematic
    /// sides and m_n/m_tau for curvature sides.
    pub points: Vec<(f64, f64, f64, f64)>,
}

impl TabulatedSide {
    pub fn new(kind: ConditionKind, mut points: Vec<(f64, f64, f64, f64)>) -> Result<Self> {
        if kind == ConditionKind::Free {
            return Err(Error::BoundaryConflict(
                "a free side takes no tabulated data".into(),
            ));
        }
        if points.len() < 2 {
            return Err(Error::BoundaryConflict(
                "tabulated side needs at least two points".into(),
            ));
        }
        points.sort_by(|p, q| p.0.total_cmp(&q.0));
        if points.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::BoundaryConflict(
                "tabulated side has duplicate coordinates".into(),
            ));
        }
        Ok(Self { kind, points })
    }

    pub fn at(&self, s: f64) -> Result<SideCondition> {
        let lo = self.points[0].0;
        let hi = self.points[self.points.len() - 1].0;
        let slack = (hi - lo) * 1e-9;
        if s < lo - slack || s > hi + slack {
            return Err(Error::OutOfRange { what: "tabulated coordinate", value: s, lo, hi });
        }
        let s = s.clamp(lo, hi);
        let i = self.points[1..self.points.len() - 1].partition_point(|p| p.0 < s);
        let (s0, w0, a0, b0) = self.points[i];
        let (s1, w1, a1, b1) = self.points[i + 1];
        let t = (s - s0) / (s1 - s0);
        let lerp = |u: f64, v: f64| u + (v - u) * t;
        let (w, d1, d2) = (lerp(w0, w1), lerp(a0, a1), lerp(b0, b1));
        Ok(match self.kind {
            ConditionKind::Kinematic => SideCondition::Kinematic { w, theta_n: d1, theta_tau: d2 },
            ConditionKind::Curvature => SideCondition::Curvature { w, m_n: d1, m_tau: d2 },
            ConditionKind::Free => unreachable!("rejected in new"),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kinematic_rows_pin_the_right_entries() {
        let rows = side_rows(
            Side::Right,
            &SideCondition::Kinematic { w: 1.0, theta_n: 2.0, theta_tau: 3.0 },
        );
        assert_eq!(rows[0].cols, vec![(12, 1.0)]);
        assert_eq!(rows[0].rhs, 1.0);
        assert_eq!(rows[1].cols, vec![(13, 1.0)]);
        assert_eq!(rows[1].rhs, 2.0);
        assert_eq!(rows[2].cols, vec![(14, 1.0)]);
        assert_eq!(rows[2].rhs, 3.0);
    }

    #[test]
    fn curvature_rows_skip_slopes() {
        let rows = side_rows(
            Side::Bottom,
            &SideCondition::Curvature { w: 0.5, m_n: -1.0, m_tau: 0.25 },
        );
        assert_eq!(rows[0].cols, vec![(6, 1.0)]);
        assert_eq!(rows[1].cols, vec![(9, 1.0)]);
        assert_eq!(rows[1].rhs, -1.0);
        assert_eq!(rows[2].cols, vec![(10, 1.0)]);
    }

    #[test]
    fn free_rows_zero_the_statics() {
        let rows = side_rows(Side::Top, &SideCondition::Free);
        assert_eq!(rows[0].cols, vec![(21, 1.0)]);
        assert_eq!(rows[1].cols, vec![(22, 1.0)]);
        assert_eq!(rows[2].cols, vec![(23, 1.0)]);
        assert!(rows.iter().all(|r| r.rhs == 0.0));
    }

    #[test]
    fn corner_offsets_all_eight_combinations() {
        let cases = [
            (Side::Left, Corner::BottomLeft, -1.0),
            (Side::Left, Corner::TopLeft, 1.0),
            (Side::Right, Corner::BottomRight, -1.0),
            (Side::Right, Corner::TopRight, 1.0),
            (Side::Bottom, Corner::BottomLeft, -1.0),
            (Side::Bottom, Corner::BottomRight, 1.0),
            (Side::Top, Corner::TopLeft, -1.0),
            (Side::Top, Corner::TopRight, 1.0),
        ];
        for (side, corner, sign) in cases {
            let offs = corner.offset_on(side, 2.5).unwrap();
            assert_eq!(offs, sign * 2.5, "{side:?} {corner:?}");
        }
        assert!(Corner::TopLeft.offset_on(Side::Right, 1.0).is_err());
        assert!(Corner::BottomRight.offset_on(Side::Top, 1.0).is_err());
    }

    #[test]
    fn corner_variant_rows() {
        let half = 0.5;
        let b = corner_rows(CornerVariant::B, Side::Left, Corner::BottomLeft, half).unwrap();
        assert_eq!(b[0].cols, vec![(0, 1.0)]);
        assert_eq!(b[1].cols, vec![(3, 1.0)]);
        assert_eq!(b[2].cols, vec![(4, 1.0)]);

        let ba = corner_rows(CornerVariant::BA, Side::Left, Corner::BottomLeft, half).unwrap();
        assert_eq!(ba[0].cols, vec![(0, 1.0), (2, -0.5)]);
        assert_eq!(ba[2].cols, vec![(4, 1.0)]);

        let bam =
            corner_rows(CornerVariant::BAM, Side::Bottom, Corner::BottomRight, half).unwrap();
        assert_eq!(bam[0].cols, vec![(6, 1.0), (8, 0.5)]);
        assert_eq!(bam[1].cols, vec![(9, 1.0)]);
        assert_eq!(bam[2].cols, vec![(10, 1.0), (11, 0.5)]);
        assert!(bam.iter().all(|r| r.rhs == 0.0));
    }

    #[test]
    fn tabulated_interpolates_and_bounds() {
        let tab = TabulatedSide::new(
            ConditionKind::Kinematic,
            vec![(1.0, 10.0, 0.0, 1.0), (0.0, 0.0, 2.0, 1.0), (2.0, 0.0, 0.0, 1.0)],
        )
        .unwrap();
        match tab.at(0.5).unwrap() {
            SideCondition::Kinematic { w, theta_n, theta_tau } => {
                assert!((w - 5.0).abs() < 1e-15);
                assert!((theta_n - 1.0).abs() < 1e-15);
                assert!((theta_tau - 1.0).abs() < 1e-15);
            }
            other => panic!("{other:?}"),
        }
        // exact endpoints work, past them fails
        assert!(tab.at(0.0).is_ok());
        assert!(tab.at(2.0).is_ok());
        assert!(tab.at(2.1).is_err());
        assert!(tab.at(-0.1).is_err());
        assert!(TabulatedSide::new(ConditionKind::Free, vec![]).is_err());
        assert!(TabulatedSide::new(
            ConditionKind::Curvature,
            vec![(0.0, 0.0, 0.0, 0.0), (0.0, 1.0, 0.0, 0.0)]
        )
        .is_err());
    }
}
