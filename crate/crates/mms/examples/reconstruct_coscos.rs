//! Energy optimality on the cosine-product generator, which is not
//! biharmonic: the boundary-only solve undershoots the generator's energy,
//! a center pin pulls the surface toward it at a small energy cost, and
//! forcing the center away from its free value costs more.

use mms::assembly::solve;
use mms::boundary::ConditionKind;
use mms::constraints::PointConstraint;
use mms::fields::{sample_near, total_energy};
use mms::mesh::{Material, MeshSpec};
use mms::surfaces::{midpoint_energy, Surface};

fn main() -> mms::Result<()> {
    let surface = Surface::CosCos;
    let mesh = MeshSpec::uniform(surface.domain(), 11, 11, Material::default()).build()?;
    let plan = surface.boundary_plan(&mesh, ConditionKind::Kinematic)?;

    let free = solve(&mesh, &plan, 0.0, &[], None)?;
    let free_center = sample_near(&mesh, &free, 0.0, 0.0)?.values.w;
    let free_energy = total_energy(&mesh, &free)?.total;
    println!("generator midpoint energy  = {:.4}", midpoint_energy(surface, 11, 11));
    println!("boundary-only solve        = {free_energy:.4}, center w = {free_center:.4}");

    for target in [1.0, 0.3] {
        let pin = PointConstraint { x: 0.0, y: 0.0, target };
        let sol = solve(&mesh, &plan, 0.0, &[pin], None)?;
        let energy = total_energy(&mesh, &sol)?.total;
        println!(
            "center pinned to {target:<4} solve = {energy:.4}, multiplier = {:.3}",
            sol.multipliers[0]
        );
    }
    Ok(())
}
