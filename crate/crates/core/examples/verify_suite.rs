//! Run a verification suite in-process and print one line per check.
//!
//! `cargo run --release --example verify_suite -- lemmas [workers]`

use anyhow::Result;
use hausdorff_lab::harness::{run_suite, ExperimentConfig, Suite};

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let suite: Suite = args.next().as_deref().unwrap_or("identities").parse()?;
    let mut config = ExperimentConfig::default();
    if let Some(w) = args.next() {
        config.workers = w.parse()?;
    }
    let report = run_suite(&config, suite)?;
    for c in &report.checks {
        let rel = if c.passed { "PASS" } else { "FAIL" };
        println!("[{rel}] {:<30} measured {:.4e} vs {:.4e}", c.name, c.measured, c.bound);
        for (k, v) in &c.details {
            println!("        {k}: {v}");
        }
        if let Some(e) = &c.error {
            println!("        error: {e}");
        }
    }
    for (name, secs) in &report.timings {
        println!("{name:<30} {secs:7.2} s");
    }
    println!("suite {} passed: {} (exit {})", report.suite, report.passed, report.exit_code());
    Ok(())
}
