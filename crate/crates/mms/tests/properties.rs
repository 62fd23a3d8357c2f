//! Randomized checks of the element algebra, kernel, and mesh lookups.
//! Each property holds for every admissible input, not just the meshes the
//! shipped configs use, so these run with arbitrary geometries and states.

use proptest::prelude::*;

use mms::constraints::{kernel_weight, resolve_constraints, PointConstraint, Spreading};
use mms::element::{
    cached_coupling, coupling_coefficients, element_energy, evaluate_section, transfer_x,
    transfer_y, Axis, ElementGeometry, SectionState,
};
use mms::mesh::{Material, MeshSpec, Rect};

fn geometry() -> impl Strategy<Value = ElementGeometry> {
    (0.05..3.0f64, 0.05..3.0f64, 0.2..5.0f64, 0.0..0.45f64)
        .prop_map(|(a, b, d, nu)| ElementGeometry::new(a, b, d, nu).unwrap())
}

fn state() -> impl Strategy<Value = SectionState> {
    prop::array::uniform12(-2.0..2.0f64)
}

proptest! {
    /// The inlet operators at coordinate 0 return the inlet state verbatim
    /// for any geometry, state, and load.
    #[test]
    fn transfer_at_zero_is_identity(g in geometry(), z in state(), p in -3.0..3.0f64) {
        let cc = coupling_coefficients(&g).unwrap();
        let x0 = transfer_x(&g, &cc, 0.0).unwrap().apply(&z, p).as_array();
        let y0 = transfer_y(&g, &cc, 0.0).unwrap().apply(&z, p).as_array();
        for i in 0..6 {
            prop_assert_eq!(x0[i], z[i]);
            prop_assert_eq!(y0[i], z[6 + i]);
        }
    }

    /// Both sections agree at the element center: equal elevation, and each
    /// section's normal slope equals the other's tangential slope.
    #[test]
    fn sections_meet_at_the_center(g in geometry(), z in state(), p in -3.0..3.0f64) {
        let cc = coupling_coefficients(&g).unwrap();
        let sx = evaluate_section(&g, &cc, &z, p, Axis::X, g.a / 2.0).unwrap();
        let sy = evaluate_section(&g, &cc, &z, p, Axis::Y, g.b / 2.0).unwrap();
        let scale = 1.0f64.max(sx.w.abs()).max(sx.theta_n.abs()).max(sx.theta_tau.abs());
        prop_assert!((sx.w - sy.w).abs() <= 1e-10 * scale);
        prop_assert!((sx.theta_n - sy.theta_tau).abs() <= 1e-10 * scale);
        prop_assert!((sx.theta_tau - sy.theta_n).abs() <= 1e-10 * scale);
    }

    /// The unit-probe transfer operator reproduces direct evaluation
    /// anywhere along either section.
    #[test]
    fn transfer_matches_direct_evaluation(
        g in geometry(),
        z in state(),
        p in -3.0..3.0f64,
        fx in 0.0..=1.0f64,
        fy in 0.0..=1.0f64,
    ) {
        let cc = coupling_coefficients(&g).unwrap();
        let tx = transfer_x(&g, &cc, fx * g.a).unwrap().apply(&z, p).as_array();
        let ex = evaluate_section(&g, &cc, &z, p, Axis::X, fx * g.a).unwrap().as_array();
        let ty = transfer_y(&g, &cc, fy * g.b).unwrap().apply(&z, p).as_array();
        let ey = evaluate_section(&g, &cc, &z, p, Axis::Y, fy * g.b).unwrap().as_array();
        for i in 0..6 {
            let sx = 1.0f64.max(ex[i].abs());
            prop_assert!((tx[i] - ex[i]).abs() <= 1e-9 * sx);
            let sy = 1.0f64.max(ey[i].abs());
            prop_assert!((ty[i] - ey[i]).abs() <= 1e-9 * sy);
        }
    }

    /// Curvature-squared quadrature cannot go negative.
    #[test]
    fn energy_is_nonnegative(g in geometry(), z in state(), p in -3.0..3.0f64) {
        let cc = coupling_coefficients(&g).unwrap();
        prop_assert!(element_energy(&g, &cc, &z, p) >= 0.0);
    }

    /// The coefficient cache hands back exactly what a fresh computation
    /// yields.
    #[test]
    fn cached_coupling_is_coherent(g in geometry()) {
        let fresh = coupling_coefficients(&g).unwrap();
        let cached = cached_coupling(&g).unwrap();
        prop_assert_eq!(&fresh, cached.as_ref());
    }

    /// The spreading kernel is 1 at the pin, halves at the width parameter,
    /// never exceeds 1, and decays monotonically.
    #[test]
    fn kernel_shape(
        zeta in 0.01..100.0f64,
        l in 0.1..20.0f64,
        d1 in 0.0..50.0f64,
        d2 in 0.0..50.0f64,
    ) {
        prop_assert_eq!(kernel_weight(0.0, zeta, l), 1.0);
        prop_assert!((kernel_weight(zeta * l, zeta, l) - 0.5).abs() <= 1e-12);
        let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        let (wlo, whi) = (kernel_weight(lo, zeta, l), kernel_weight(hi, zeta, l));
        prop_assert!(whi <= wlo && wlo <= 1.0 && whi > 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Any interior point lands in the element whose edges bracket it, and
    /// an unspread pin attaches there with weight one.
    #[test]
    fn locate_brackets_the_point(
        nx in 1..12usize,
        ny in 1..12usize,
        fx in 0.001..0.999f64,
        fy in 0.001..0.999f64,
        (x0, y0, w, h) in (-3.0..3.0f64, -3.0..3.0f64, 0.5..4.0f64, 0.5..4.0f64),
    ) {
        let rect = Rect::new(x0, y0, x0 + w, y0 + h).unwrap();
        let mesh = MeshSpec::uniform(rect, nx, ny, Material::default()).build().unwrap();
        let (px, py) = (x0 + fx * w, y0 + fy * h);
        let (ix, iy) = mesh.locate(px, py).unwrap();
        prop_assert!(mesh.x_edges[ix] <= px && px <= mesh.x_edges[ix + 1]);
        prop_assert!(mesh.y_edges[iy] <= py && py <= mesh.y_edges[iy + 1]);
        let pin = [PointConstraint { x: px, y: py, target: 0.0 }];
        let rc = resolve_constraints(&mesh, &pin, None).unwrap();
        prop_assert_eq!(&rc[0].weights, &vec![(mesh.id(ix, iy), 1.0)]);
    }

    /// Spread weights: 1 on the attachment element, in (0, 1] elsewhere,
    /// only within the cutoff radius, and a tighter cutoff keeps a subset.
    #[test]
    fn spread_weights_stay_in_the_disc(
        zeta in 0.05..80.0f64,
        fx in 0.05..0.95f64,
        fy in 0.05..0.95f64,
    ) {
        let rect = Rect::new(0.0, 0.0, 1.0, 1.0).unwrap();
        let mesh = MeshSpec::uniform(rect, 17, 17, Material::default()).build().unwrap();
        let pin = [PointConstraint { x: fx, y: fy, target: 1.0 }];
        let rc = resolve_constraints(&mesh, &pin, Some(Spreading::new(zeta).unwrap())).unwrap();
        let (ix, iy) = mesh.locate(fx, fy).unwrap();
        let (cx, cy) = mesh.center(ix, iy);
        for &(e, w) in &rc[0].weights {
            prop_assert!(w > 0.0 && w <= 1.0);
            let (ex, ey) = mesh.center(e % 17, e / 17);
            let d = (ex - cx).hypot(ey - cy);
            prop_assert!(d <= 0.2 + 1e-12);
            prop_assert!((w - kernel_weight(d, zeta, 1.0)).abs() <= 1e-15);
        }
        let tight =
            resolve_constraints(&mesh, &pin, Some(Spreading::with_cutoff(zeta, 0.1).unwrap()))
                .unwrap();
        prop_assert!(tight[0].weights.len() <= rc[0].weights.len());
        prop_assert!(tight[0].weights.iter().all(|tw| rc[0].weights.contains(tw)));
    }
}
