//! Modulation and Wiener amalgam norms of corpus members from one STFT each.

use anyhow::Result;
use hausdorff_lab::corpus::{corpus, DEFAULT_SEED};
use hausdorff_lab::grid::lp_norm;
use hausdorff_lab::timefreq::{gaussian_window, stft_norms, StftConfig};
use hausdorff_lab::{GridSpec, SpaceParams};

fn main() -> Result<()> {
    let spec = GridSpec::line(4096, 16.0)?;
    let window = gaussian_window(spec);
    let inf = f64::INFINITY;
    let requests = [
        SpaceParams::modulation(2.0, 2.0, 0.0)?,
        SpaceParams::modulation(2.0, 1.0, 0.0)?,
        SpaceParams::modulation(1.0, inf, 0.0)?,
        SpaceParams::wiener(1.0, 2.0, 0.0)?,
        SpaceParams::modulation(2.0, 1.0, 1.0)?,
    ];
    print!("{:<24} {:>10}", "function", "L^2");
    for r in &requests {
        print!(" {:>12}", r.label());
    }
    println!();
    for entry in corpus(DEFAULT_SEED) {
        let f = entry.sample(spec);
        print!("{:<24} {:>10.6}", entry.id, lp_norm(&f, 2.0)?);
        for v in stft_norms(&f, &window, &StftConfig::default(), &requests)? {
            print!(" {v:>12.6}");
        }
        println!();
    }
    println!("M_{{2,2}} = 2^(-1/4) |f|_2 for the unit-height Gaussian window");
    Ok(())
}
