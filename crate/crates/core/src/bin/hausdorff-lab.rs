//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 admissible kernel with a
//! divergent sharp integral, 3 inadmissible kernel, 4 numeric guard tripped,
//! 5 a verification check failed.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context as _, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use hausdorff_lab::corpus;
use hausdorff_lab::grid::io::{self, SampleFormat};
use hausdorff_lab::grid::lp_norm;
use hausdorff_lab::harness::{run_suite, ExperimentConfig, KernelConfig, Overrides, Suite};
use hausdorff_lab::hausdorff::{apply_hausdorff, apply_hausdorff_tilde};
use hausdorff_lab::kernel::check_conditions;
use hausdorff_lab::quadrature::QuadratureSpec;
use hausdorff_lab::timefreq::{
    gaussian_window, modulation_norm_discrete_report, parse_exponent, stft_norms, DecompositionFamily, StftConfig,
};
use hausdorff_lab::{Domain, Error, GridFunction, GridSpec, SpaceKind, SpaceParams};

const EXIT_USAGE: u8 = 1;
const EXIT_GUARD: u8 = 4;

/// `println!` that tolerates a closed pipe.
macro_rules! say {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

#[derive(Parser)]
#[command(version, about = "Hausdorff operators on modulation and Wiener amalgam spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the admissibility and sharp conditions of a kernel.
    CheckCondition {
        /// Kernel name, JSON file, or inline shorthand such as `0.5@[1,2]`.
        kernel: String,
        #[command(flatten)]
        exps: Exponents,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        /// Print JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Compute a modulation, Wiener amalgam or Lebesgue norm.
    Norm {
        /// Corpus id, `zero`, or a grid-function header file.
        function: String,
        #[arg(long, default_value = "modulation")]
        space: SpaceKind,
        #[command(flatten)]
        exps: Exponents,
        /// Weight exponent.
        #[arg(long, default_value_t = 0.0)]
        s: f64,
        /// Use the frequency-uniform decomposition instead of the STFT.
        #[arg(long)]
        discrete: bool,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        json: bool,
    },
    /// Apply the operator (or its companion with `--tilde`) and write the result.
    Apply {
        kernel: String,
        function: String,
        /// Output header path; samples go next to it.
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long)]
        tilde: bool,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Run a verification suite and write its report.
    Verify {
        #[arg(default_value = "all")]
        suite: Suite,
        /// TOML configuration file.
        #[arg(short, long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        kernel: Option<String>,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        half_extent: Option<f64>,
        /// Witness depths for the lower-bound schedule, comma separated.
        #[arg(long, value_delimiter = ',')]
        depths: Option<Vec<u32>>,
    },
    /// Inspect the regression corpus.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
}

#[derive(Subcommand)]
enum CorpusAction {
    /// List member ids and descriptions.
    List {
        #[arg(long, default_value_t = corpus::DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct Exponents {
    #[arg(long, default_value = "2", value_parser = exponent)]
    p: f64,
    #[arg(long, default_value = "2", value_parser = exponent)]
    q: f64,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long, default_value_t = 4096)]
    points: usize,
    #[arg(long, default_value_t = 16.0)]
    half_extent: f64,
    #[arg(long, default_value_t = corpus::DEFAULT_SEED)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Binary,
}

fn exponent(s: &str) -> std::result::Result<f64, String> {
    parse_exponent(s).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let guard = e
                .chain()
                .filter_map(|c| c.downcast_ref::<Error>())
                .any(|c| matches!(c, Error::SpectralTail { .. } | Error::QuadratureCoverage { .. }));
            ExitCode::from(if guard { EXIT_GUARD } else { EXIT_USAGE })
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::CheckCondition { kernel, exps, dim, json } => check_condition(&kernel, &exps, dim, json),
        Command::Norm { function, space, exps, s, discrete, grid, json } => {
            norm(&function, space, &exps, s, discrete, &grid, json)
        }
        Command::Apply { kernel, function, out, tilde, format, grid } => {
            apply(&kernel, &function, &out, tilde, format, &grid)
        }
        Command::Verify { suite, config, seed, workers, out_dir, kernel, points, half_extent, depths } => {
            let overrides = Overrides { seed, workers, out_dir, kernel, points, half_extent, depths };
            verify(suite, config.as_deref(), &overrides)
        }
        Command::Corpus { action: CorpusAction::List { seed, json } } => {
            let listing: Vec<_> = corpus::corpus(seed).iter().map(|e| e.listing()).collect();
            if json {
                say!("{}", serde_json::to_string_pretty(&listing)?);
            } else {
                for e in listing {
                    say!("{:<24} {}", e.id, e.description);
                }
            }
            Ok(0)
        }
    }
}

fn check_condition(kernel: &str, exps: &Exponents, dim: usize, json: bool) -> Result<u8> {
    let kernel = KernelConfig::from_argument(kernel).load(dim)?;
    let params = SpaceParams::modulation(exps.p, exps.q, 0.0)?;
    let report = check_conditions(&kernel, &params);
    if json {
        say!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        say!("kernel        {kernel}");
        say!("dimension     {}", report.dim);
        say!("exponents     p = {}, q = {}", report.p, report.q);
        say!("local moment  {}", report.basic_local);
        say!("global moment {}", report.basic_global);
        say!("|y|^(n/p)     {}", report.sharp_p_term);
        say!("|y|^(n/q')    {}", report.sharp_q_term);
        say!("sharp value   {}", report.sharp_value);
        say!("verdict       {:?}", report.verdict);
    }
    Ok(report.verdict.exit_code() as u8)
}

fn load_function(spec_arg: &str, grid: &GridArgs) -> Result<GridFunction> {
    let spec = GridSpec::line(grid.points, grid.half_extent)?;
    if spec_arg == "zero" {
        return Ok(GridFunction::zeros(spec, Domain::Space));
    }
    let path = Path::new(spec_arg);
    if path.extension().is_some_and(|e| e == "json") || path.is_file() {
        return io::read(path).with_context(|| format!("reading grid function {}", path.display()));
    }
    Ok(corpus::find(grid.seed, spec_arg)?.sample(spec))
}

fn norm(
    function: &str,
    space: SpaceKind,
    exps: &Exponents,
    s: f64,
    discrete: bool,
    grid: &GridArgs,
    json: bool,
) -> Result<u8> {
    let f = load_function(function, grid)?;
    let params = SpaceParams::new(space, exps.p, exps.q, s)?;
    let spec = *f.spec();
    let (value, method, extra) = match (space, discrete) {
        (SpaceKind::Lebesgue, _) => (lp_norm(&f, exps.p)?, "grid sum", json!({})),
        (SpaceKind::Modulation, true) => {
            let family = DecompositionFamily::with_default_radius(spec)?;
            let r = modulation_norm_discrete_report(&f, &params, &family)?;
            let extra = json!({"decomposition": family.describe(), "spectral_tail": r.spectral_tail});
            (r.value, "frequency-uniform decomposition", extra)
        }
        (SpaceKind::Wiener, true) => bail!("the discrete norm is defined for modulation spaces only"),
        (_, false) => {
            let window = gaussian_window(spec);
            let v = stft_norms(&f, &window, &StftConfig::default(), &[params])?[0];
            (v, "short-time Fourier transform", json!({"window": "exp(-pi x^2)"}))
        }
    };
    if json {
        let out = json!({
            "function": function,
            "space": params.label(),
            "value": value,
            "method": method,
            "grid": {"n": spec.dim(), "N_grid": spec.points(), "L": spec.half_extent()},
            "details": extra,
        });
        say!("{}", serde_json::to_string_pretty(&out)?);
    } else {
        say!("{value:.12e}");
        say!("# {} of {function} via {method}; grid N = {}, L = {}", params.label(), spec.points(), spec.half_extent());
    }
    Ok(0)
}

fn apply(kernel: &str, function: &str, out: &Path, tilde: bool, format: Format, grid: &GridArgs) -> Result<u8> {
    let f = load_function(function, grid)?;
    let kernel = KernelConfig::from_argument(kernel).load(f.spec().dim())?;
    let quad = QuadratureSpec::default();
    let result = if tilde { apply_hausdorff_tilde(&kernel, &f, &quad)? } else { apply_hausdorff(&kernel, &f, &quad)? };
    let format = match format {
        Format::Csv => SampleFormat::Csv,
        Format::Binary => SampleFormat::Binary,
    };
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let (header, samples) = io::write(&result, out, format)?;
    say!("{}", header.display());
    say!("{}", samples.display());
    Ok(0)
}

fn verify(suite: Suite, config: Option<&Path>, overrides: &Overrides) -> Result<u8> {
    let cfg = ExperimentConfig::resolve(config, overrides)?;
    cfg.validate()?;
    let report = run_suite(&cfg, suite)?;
    let written = report.write_artifacts(&cfg.out_dir)?;
    for c in &report.checks {
        say!("[{}] {}", if c.passed { "PASS" } else { "FAIL" }, c.name);
        if let Some(e) = &c.error {
            say!("       {e}");
        }
    }
    for curve in &report.curves {
        say!("{} / {}: {:?}", curve.experiment, curve.kernel, curve.verdict);
    }
    for path in written {
        say!("wrote {}", path.display());
    }
    Ok(report.exit_code() as u8)
}
