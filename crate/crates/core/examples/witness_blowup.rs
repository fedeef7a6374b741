//! Lower-bound experiments: the ratio `R(N, M)` grows with the annulus
//! integral `A(M)` for a divergent kernel and stays flat for a finite one.
//!
//! Run with `cargo run --release --example witness_blowup -- [max_depth]`.

use std::time::Instant;

use anyhow::Result;
use hausdorff_lab::corpus::{annulus_kernel, divergent_kernel};
use hausdorff_lab::witness::{
    build_fn, lower_bound_experiment_modulation, lower_bound_experiment_wiener, ExperimentCurve,
    WitnessSettings, WitnessSpec,
};

fn show(curve: &ExperimentCurve) {
    println!("{} / {} ({:?})", curve.experiment, curve.kernel, curve.kernel_verdict);
    println!("   N   M          R          A   R/(A*...)");
    for r in &curve.rows {
        println!(
            "{:>4}{:>4}{:>11.5}{:>11.5}{:>12}",
            r.depth,
            r.margin,
            r.ratio,
            r.annulus,
            r.bound_ratio.map_or("-".into(), |b| format!("{b:.4}"))
        );
    }
    println!("   growth {:?}, spread {:.3}, verdict {:?}\n", curve.growth, curve.spread, curve.verdict);
}

fn main() -> Result<()> {
    let max_depth: u32 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(12);
    let schedule: Vec<(u32, u32)> = [8, 12, 16]
        .into_iter()
        .filter(|&n| n <= max_depth)
        .map(|n| (n, n / 4))
        .collect();
    let settings = WitnessSettings::default();

    let w = build_fn(&WitnessSpec::scheduled(8, 2.0, 2.0)?)?;
    println!(
        "f_8: c0 = {:.4}, spectral tail = {:.2e}, ||f||_2 = {:.4}\n",
        w.c0, w.spectral_tail, w.lp_norm
    );

    for (name, kernel) in [("divergent", divergent_kernel()), ("annulus", annulus_kernel())] {
        let t = Instant::now();
        let m = lower_bound_experiment_modulation(&kernel, &schedule, 2.0, 2.0, &settings)?;
        show(&m);
        let w = lower_bound_experiment_wiener(&kernel, &schedule, 2.0, 2.0, &settings)?;
        show(&w);
        println!("{name}: {:.1}s\n", t.elapsed().as_secs_f64());
    }
    Ok(())
}
