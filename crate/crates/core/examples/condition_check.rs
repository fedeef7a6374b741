//! Symbolic condition integrals for a few kernels, including the shorthand
//! and JSON kernel formats.

use anyhow::Result;
use hausdorff_lab::harness::hand_worked_kernels;
use hausdorff_lab::kernel::check_conditions;
use hausdorff_lab::{RadialKernel, SpaceParams};

fn main() -> Result<()> {
    for hw in hand_worked_kernels() {
        let r = check_conditions(&hw.kernel, &hw.params);
        println!(
            "{:<20} n={} local {:<22} global {:<22} sharp {:<22} {:?}",
            hw.id, r.dim, r.basic_local.to_string(), r.basic_global.to_string(), r.sharp_value.to_string(), r.verdict
        );
    }

    let inline = RadialKernel::parse_shorthand(1, "1*r^2@[0.5,1]; 0.25*r^-2@[1,2]")?;
    let from_json = RadialKernel::from_json(&inline.to_json(), 1)?;
    let p = SpaceParams::modulation(2.0, 2.0, 0.0)?;
    println!("shorthand {inline} -> sharp {}", check_conditions(&inline, &p).sharp_value);
    println!("json round trip equal: {}", inline == from_json);

    match RadialKernel::parse_shorthand(1, "1*r^-1.5@[1,inf] 2*x^2@[0,1]") {
        Ok(_) => println!("unexpectedly parsed"),
        Err(e) => println!("malformed input: {e}"),
    }
    Ok(())
}
