//! The Gaussian `e^{-pi x^2}` is its own Fourier transform under the
//! continuous convention; print the sampled error and a round trip.

use std::f64::consts::PI;

use anyhow::Result;
use hausdorff_lab::grid::{fourier_transform, inverse_fourier_transform, lp_norm};
use hausdorff_lab::{Domain, GridFunction, GridSpec};

fn main() -> Result<()> {
    for (points, half_extent) in [(1024, 8.0), (4096, 16.0), (4096, 32.0)] {
        let spec = GridSpec::line(points, half_extent)?;
        let g = GridFunction::from_real_fn(spec, Domain::Space, |x| (-PI * x[0] * x[0]).exp())?;
        let exact = GridFunction::from_real_fn(spec, Domain::Frequency, |xi| (-PI * xi[0] * xi[0]).exp())?;
        let fg = fourier_transform(&g)?;
        let back = inverse_fourier_transform(&fg)?;
        println!(
            "N = {points:5}, L = {half_extent:4}: |Fg - g|_inf = {:.2e}, round trip {:.2e}, |g|_2 = {:.15}",
            fg.sub(&exact)?.max_abs(),
            back.sub(&g)?.max_abs(),
            lp_norm(&g, 2.0)?
        );
    }
    println!("2^(-1/4)                                                        = {:.15}", 2f64.powf(-0.25));
    Ok(())
}
