//! Frequency-uniform partition of unity: coverage, band energies and the
//! discrete modulation norm next to the STFT one.

use anyhow::Result;
use hausdorff_lab::corpus::{find, DEFAULT_SEED};
use hausdorff_lab::grid::lp_norm;
use hausdorff_lab::timefreq::{
    box_operator, gaussian_window, modulation_norm_discrete_report, stft_norms, DecompositionFamily, StftConfig,
};
use hausdorff_lab::{Domain, GridSpec, SpaceParams};

fn main() -> Result<()> {
    let spec = GridSpec::line(4096, 16.0)?;
    let family = DecompositionFamily::with_default_radius(spec)?;
    println!("{}", family.describe());

    let mut worst = 0.0f64;
    for idx in 0..spec.len() {
        if spec.coordinate(Domain::Frequency, idx).abs() <= (family.k_max() - 1) as f64 {
            worst = worst.max((family.coverage(idx) - 1.0).abs());
        }
    }
    println!("coverage deviation on the interior: {worst:.2e}");

    let f = find(DEFAULT_SEED, "modulated-gaussian-2.5")?.sample(spec);
    for k in -1..=6 {
        println!("  |box_{k:<2} f|_2 = {:.3e}", lp_norm(&box_operator(&f, &family, &[k])?, 2.0)?);
    }
    let window = gaussian_window(spec);
    for (p, q) in [(2.0, 2.0), (2.0, 1.0), (1.0, 2.0)] {
        let params = SpaceParams::modulation(p, q, 0.0)?;
        let d = modulation_norm_discrete_report(&f, &params, &family)?;
        let c = stft_norms(&f, &window, &StftConfig::default(), &[params])?[0];
        println!(
            "{}: discrete {:.6}, continuous {:.6}, ratio {:.4}, tail {:.1e}",
            params.label(),
            d.value,
            c,
            d.value / c,
            d.spectral_tail
        );
    }
    Ok(())
}
