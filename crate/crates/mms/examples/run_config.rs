//! Run a full workflow from a config file, exactly as the `mms` binary does.
//! Pass a config path as the first argument, or let it default to the
//! shipped cos*cos blend. Artifacts land in the directory the config names.

use mms::cli::{parse_config, run};

fn main() -> mms::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| {
        format!(
            "{}/examples/configs/blend_coscos.cfg",
            env!("CARGO_MANIFEST_DIR")
        )
    });
    let cfg = parse_config(path.as_ref())?;
    let out = run(&cfg)?;
    println!("workflow     : {}", cfg.workflow.name());
    println!("mesh         : {}", out.mesh.summary());
    println!("residual     : {:.3e}", out.solution.residual);
    println!("energy       : {:.6}", out.energy.total);
    println!("center w     : {:.6}", out.center.values.w);
    if let Some(n) = &out.norms {
        println!("max |w err|  : {:.3e}", n.max_w);
    }
    println!("artifacts in : {}", out.out_dir.display());
    Ok(())
}
