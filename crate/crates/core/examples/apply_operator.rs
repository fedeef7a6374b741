//! Apply the operator and its companion to `x^2`, where both have closed
//! forms, then write one result in the on-disk grid format.

use anyhow::Result;
use hausdorff_lab::corpus::annulus_kernel;
use hausdorff_lab::grid::io::{self, SampleFormat};
use hausdorff_lab::grid::InterpolationSpec;
use hausdorff_lab::hausdorff::{apply_hausdorff, apply_hausdorff_tilde};
use hausdorff_lab::quadrature::QuadratureSpec;
use hausdorff_lab::{Domain, GridFunction, GridSpec};

fn main() -> Result<()> {
    let spec = GridSpec::line(4096, 16.0)?;
    // (1/2) 1[1,2]: H x^2 = x^2 \int r^{-2} Phi = x^2 / 2 and
    // ~H x^2 = x^2 \int r^2 Phi = 3.75 x^2.
    let kernel = annulus_kernel();
    let quad = QuadratureSpec::default().with_interp(InterpolationSpec { oversample: 1, order: 8 });
    let f = GridFunction::from_real_fn(spec, Domain::Space, |x| x[0] * x[0])?;
    let hf = apply_hausdorff(&kernel, &f, &quad)?;
    let tf = apply_hausdorff_tilde(&kernel, &f, &quad)?;
    for x in [-2.0, -0.5, 0.25, 1.0, 1.75] {
        let i = (spec.center() as isize + (x / spec.step()).round() as isize) as usize;
        println!(
            "x = {x:5}: H = {:.12} (want {:.12}), ~H = {:.12} (want {:.12})",
            hf.values()[i].re,
            x * x / 2.0,
            tf.values()[i].re,
            3.75 * x * x
        );
    }
    let dir = std::env::temp_dir().join("hausdorff-apply-example");
    std::fs::create_dir_all(&dir)?;
    let (header, samples) = io::write(&hf, &dir.join("h_x2.json"), SampleFormat::Binary)?;
    let back = io::read(&header)?;
    println!("wrote {} and {}; reread equal: {}", header.display(), samples.display(), back == hf);
    Ok(())
}
