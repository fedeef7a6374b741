//! Fourier intertwining `F(H f) = ~H(F f)` and the adjoint pairing
//! `<H f | g> = <f | ~H g>` over the corpus and the sharp-finite kernel suite.

use std::time::Instant;

use anyhow::Result;
use hausdorff_lab::corpus::{corpus, sharp_finite_kernels, DEFAULT_SEED};
use hausdorff_lab::hausdorff::{verify_adjoint_identity, verify_fourier_identity};
use hausdorff_lab::quadrature::QuadratureSpec;
use hausdorff_lab::GridSpec;

fn main() -> Result<()> {
    let panels_per_octave: usize = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(4);
    let spec = GridSpec::line(4096, 16.0)?;
    let quad = QuadratureSpec::octaves(2f64.powi(-12), 2f64.powi(12), panels_per_octave);
    let members = corpus(DEFAULT_SEED);
    let started = Instant::now();
    let (mut worst_fourier, mut worst_adjoint) = (0.0f64, 0.0f64);
    for k in sharp_finite_kernels(1) {
        let (mut wf, mut wa) = (0.0f64, 0.0f64);
        let mut worst_id = "";
        for (i, f) in members.iter().enumerate() {
            let fs = f.sample(spec);
            let g = members[(i + 7) % members.len()].sample(spec);
            let r = verify_fourier_identity(&k.kernel, &fs, &quad)?.residual;
            if r > wf {
                wf = r;
                worst_id = &f.id;
            }
            // Self-pairing never degenerates; the partner pairing may be
            // orthogonal, where only the scaled residual is meaningful.
            for g in [&fs, &g] {
                let a = verify_adjoint_identity(&k.kernel, &fs, g, &quad)?;
                let r = if a.is_degenerate(1e-6) { a.scaled_residual } else { a.residual };
                wa = wa.max(r);
            }
        }
        println!("{:<13} fourier {:.2e} (worst {worst_id})  adjoint {:.2e}", k.id, wf, wa);
        worst_fourier = worst_fourier.max(wf);
        worst_adjoint = worst_adjoint.max(wa);
    }
    println!(
        "worst fourier residual {worst_fourier:.2e}, worst adjoint residual {worst_adjoint:.2e}, {:.1}s",
        started.elapsed().as_secs_f64()
    );
    Ok(())
}
