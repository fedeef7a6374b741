//! Experiment orchestration: configuration, named verification suites,
//! reports and their on-disk artifacts.

mod checks;
pub mod pinned;

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::corpus::{self, CorpusEntry};
use crate::error::{Error, Result};
use crate::grid::{GridFunction, GridSpec};
use crate::kernel::{check_conditions, ConditionReport, RadialKernel};
use crate::quadrature::QuadratureSpec;
use crate::timefreq::{gaussian_window, DecompositionFamily, SpaceParams};
use crate::witness::{ExperimentCurve, WitnessSettings, WitnessSpec};

pub use checks::{hand_worked_kernels, HandWorkedKernel};

/// Environment variable overriding the output directory.
pub const OUT_DIR_ENV: &str = "HAUSDORFF_OUT_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub dim: usize,
    pub points: usize,
    pub half_extent: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            dim: 1,
            points: 4096,
            half_extent: 16.0,
        }
    }
}

/// Exactly one of `name`, `inline` (shorthand) or `file` (JSON) is used, in
/// that order of preference.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelConfig {
    pub name: Option<String>,
    pub inline: Option<String>,
    pub file: Option<PathBuf>,
}

impl Default for KernelConfig {
    fn default() -> Self {
        Self {
            name: Some("divergent".into()),
            inline: None,
            file: None,
        }
    }
}

impl KernelConfig {
    pub fn named(name: &str) -> Self {
        Self {
            name: Some(name.into()),
            ..Self::none()
        }
    }

    fn none() -> Self {
        Self {
            name: None,
            inline: None,
            file: None,
        }
    }

    /// Interpret a command-line kernel argument: a suite name, a JSON file
    /// path, or inline shorthand.
    pub fn from_argument(arg: &str) -> Self {
        if arg.contains('@') {
            Self {
                inline: Some(arg.into()),
                ..Self::none()
            }
        } else if arg.ends_with(".json") || Path::new(arg).is_file() {
            Self {
                file: Some(arg.into()),
                ..Self::none()
            }
        } else {
            Self::named(arg)
        }
    }

    pub fn load(&self, dim: usize) -> Result<RadialKernel> {
        if let Some(name) = &self.name {
            corpus::named_kernel(name, dim)
        } else if let Some(text) = &self.inline {
            RadialKernel::parse_shorthand(dim, text)
        } else if let Some(path) = &self.file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read kernel file {}: {e}", path.display())))?;
            RadialKernel::from_json(&text, dim).map_err(|e| match e {
                Error::Kernel(msg) => Error::Kernel(format!("{}: {msg}", path.display())),
                other => other,
            })
        } else {
            Err(Error::Config("no kernel given".into()))
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusConfig {
    /// Members to use; empty selects all twenty.
    pub ids: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WitnessConfig {
    /// Depths of the lower-bound schedule; the margin is `N / 4`.
    pub depths: Vec<u32>,
    /// Depths at which `f_N` is built and checked.
    pub integrity_depths: Vec<u32>,
    /// Depths at which the Wiener norm scaling of `g_N` is checked.
    pub wiener_depths: Vec<u32>,
    #[serde(with = "crate::timefreq::exponent")]
    pub p: f64,
    #[serde(with = "crate::timefreq::exponent")]
    pub q: f64,
    pub settings: WitnessSettings,
}

impl Default for WitnessConfig {
    fn default() -> Self {
        Self {
            depths: vec![8, 12, 16],
            integrity_depths: (6..=16).collect(),
            wiener_depths: vec![6, 8, 10, 12],
            p: 2.0,
            q: 2.0,
            settings: WitnessSettings::default(),
        }
    }
}

impl WitnessConfig {
    pub fn schedule(&self) -> Vec<(u32, u32)> {
        self.depths.iter().map(|&n| (n, (n / 4).max(1))).collect()
    }
}

/// Everything a verification run depends on. Parsed from TOML.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    /// Thread count; does not affect any reported value.
    #[serde(skip_serializing)]
    pub workers: usize,
    #[serde(skip_serializing)]
    pub out_dir: PathBuf,
    pub grid: GridConfig,
    pub kernel: KernelConfig,
    /// Exponent sets for the upper-bound envelopes and the condition report.
    pub params: Vec<SpaceParams>,
    pub corpus: CorpusConfig,
    pub witness: WitnessConfig,
    pub quadrature: QuadratureSpec,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let m = |p, q| SpaceParams::modulation(p, q, 0.0).expect("valid");
        let w = |p, q| SpaceParams::wiener(p, q, 0.0).expect("valid");
        Self {
            seed: corpus::DEFAULT_SEED,
            workers: 1,
            out_dir: PathBuf::from("hausdorff-out"),
            grid: GridConfig::default(),
            kernel: KernelConfig::default(),
            params: vec![m(2.0, 2.0), m(2.0, 1.0), w(2.0, 2.0), w(1.0, 2.0)],
            corpus: CorpusConfig::default(),
            witness: WitnessConfig::default(),
            quadrature: QuadratureSpec::default(),
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub out_dir: Option<PathBuf>,
    pub kernel: Option<String>,
    pub points: Option<usize>,
    pub half_extent: Option<f64>,
    pub depths: Option<Vec<u32>>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serialises")
    }

    /// Precedence: command line, then the environment (output directory
    /// only), then the file, then defaults.
    pub fn resolve(file: Option<&Path>, overrides: &Overrides) -> Result<Self> {
        let mut cfg = match file {
            Some(path) => Self::load(path)?,
            None => Self::default(),
        };
        if let Ok(dir) = std::env::var(OUT_DIR_ENV) {
            if !dir.is_empty() {
                cfg.out_dir = dir.into();
            }
        }
        cfg.apply(overrides);
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = o.seed {
            self.seed = v;
        }
        if let Some(v) = o.workers {
            self.workers = v;
        }
        if let Some(v) = &o.out_dir {
            self.out_dir = v.clone();
        }
        if let Some(v) = &o.kernel {
            self.kernel = KernelConfig::from_argument(v);
        }
        if let Some(v) = o.points {
            self.grid.points = v;
        }
        if let Some(v) = o.half_extent {
            self.grid.half_extent = v;
        }
        if let Some(v) = &o.depths {
            self.witness.depths = v.clone();
        }
    }

    pub fn grid_spec(&self) -> Result<GridSpec> {
        GridSpec::new(self.grid.dim, self.grid.points, self.grid.half_extent)
    }

    /// All cross-field constraints, checked before any computation.
    pub fn validate(&self) -> Result<()> {
        if self.workers == 0 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        let spec = self.grid_spec().map_err(|e| Error::Config(e.to_string()))?;
        if spec.dim() != 1 {
            return Err(Error::Config("verification suites run in one dimension".into()));
        }
        DecompositionFamily::with_default_radius(spec)
            .map_err(|e| Error::Config(format!("grid cannot host the band decomposition: {e}")))?;
        if spec.half_extent() < 16.0 {
            return Err(Error::Config(format!(
                "corpus functions need half-extent >= 16 so dilations by 2 stay on the grid, got {}",
                spec.half_extent()
            )));
        }
        self.quadrature.validate().map_err(|e| Error::Config(e.to_string()))?;
        let kernel = self.kernel.load(1)?;
        crate::quadrature::RadialRule::new(&kernel, &self.quadrature)?;
        for id in &self.corpus.ids {
            corpus::find(self.seed, id).map_err(|e| Error::Config(e.to_string()))?;
        }
        if self.params.is_empty() {
            return Err(Error::Config("at least one exponent set is required".into()));
        }
        let w = &self.witness;
        if w.depths.len() < 2 {
            return Err(Error::Config("the witness schedule needs at least two depths".into()));
        }
        for &n in w.depths.iter().chain(&w.integrity_depths).chain(&w.wiener_depths) {
            WitnessSpec::scheduled(n, w.p, w.q).map_err(|e| Error::Config(e.to_string()))?;
        }
        if w.settings.stride == 0 || !w.settings.stride.is_power_of_two() || w.settings.stride > 64 {
            return Err(Error::Config("witness stride must be a power of two in 1..=64".into()));
        }
        w.settings.interp.validate().map_err(|e| Error::Config(e.to_string()))?;
        if w.settings.k_max < 2 {
            return Err(Error::Config("witness lattice radius must be >= 2".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Identities,
    Lemmas,
    UpperBounds,
    Sharpness,
    All,
}

impl Suite {
    pub const PARTS: [Suite; 4] = [Suite::Identities, Suite::Lemmas, Suite::UpperBounds, Suite::Sharpness];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::Lemmas => "lemmas",
            Suite::UpperBounds => "upper-bounds",
            Suite::Sharpness => "sharpness",
            Suite::All => "all",
        }
    }

    fn includes(self, part: Suite) -> bool {
        self == Suite::All || self == part
    }

    /// Check names in execution and report order.
    pub fn check_names(self) -> Vec<&'static str> {
        checks::registry()
            .iter()
            .filter(|c| self.includes(c.suite))
            .map(|c| c.name)
            .collect()
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identities" => Ok(Suite::Identities),
            "lemmas" => Ok(Suite::Lemmas),
            "upper-bounds" => Ok(Suite::UpperBounds),
            "sharpness" => Ok(Suite::Sharpness),
            "all" => Ok(Suite::All),
            other => Err(Error::Config(format!(
                "unknown suite `{other}` (identities, lemmas, upper-bounds, sharpness, all)"
            ))),
        }
    }
}

/// How a measured value is compared with its bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
}

/// Result of one named check.
#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub suite: Suite,
    #[serde(serialize_with = "finite_or_text")]
    pub measured: f64,
    #[serde(serialize_with = "finite_or_text")]
    pub bound: f64,
    pub relation: Relation,
    pub passed: bool,
    /// Supporting measurements, keyed by name.
    pub details: BTreeMap<String, Value>,
    pub error: Option<String>,
    /// Whether the failure came from a numeric guard (spectral tail, quadrature range).
    #[serde(skip)]
    pub guard_tripped: bool,
}

fn finite_or_text<S: serde::Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_str(&v.to_string())
    }
}

/// JSON number for finite values, a string otherwise.
pub(crate) fn num(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or_else(|| Value::String(v.to_string()), Value::Number)
}

/// A complete verification run.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub toolkit_version: String,
    pub suite: Suite,
    pub config: ExperimentConfig,
    pub kernel: String,
    pub condition: ConditionReport,
    pub checks: Vec<CheckResult>,
    pub curves: Vec<ExperimentCurve>,
    pub passed: bool,
    /// Seconds per check; written separately so the report stays reproducible.
    #[serde(skip)]
    pub timings: Vec<(String, f64)>,
}

impl ExperimentReport {
    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serialises");
        text.push('\n');
        text
    }

    pub fn timings_json(&self) -> String {
        let map: BTreeMap<&str, f64> = self.timings.iter().map(|(k, v)| (k.as_str(), *v)).collect();
        let mut text = serde_json::to_string_pretty(&map).expect("timings serialise");
        text.push('\n');
        text
    }

    /// Exit status: 0 when every check passed, 4 when a numeric guard
    /// tripped, 5 for any other failed check.
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else if self.checks.iter().any(|c| c.guard_tripped) {
            4
        } else {
            5
        }
    }

    /// Write `report.json`, `timings.json`, `checks.csv` and, when lower-bound
    /// curves were measured, `lower_bounds.csv` plus one two-column
    /// `ratio_<experiment>.dat` per curve.
    pub fn write_artifacts(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let mut put = |name: &str, text: String| -> Result<()> {
            let path = dir.join(name);
            std::fs::write(&path, text)?;
            written.push(path);
            Ok(())
        };
        put("report.json", self.to_json())?;
        put("timings.json", self.timings_json())?;

        let mut csv = String::from("suite,name,measured,relation,bound,passed\n");
        for c in &self.checks {
            let rel = match c.relation {
                Relation::AtMost => "<=",
                Relation::AtLeast => ">=",
            };
            csv.push_str(&format!("{},{},{:e},{rel},{:e},{}\n", c.suite, c.name, c.measured, c.bound, c.passed));
        }
        put("checks.csv", csv)?;

        if !self.curves.is_empty() {
            let mut rows = String::from("experiment,N,M,R,A,bound_ratio\n");
            for curve in &self.curves {
                let mut dat = format!("# {} / {}: N R\n", curve.experiment, curve.kernel);
                for r in &curve.rows {
                    rows.push_str(&format!(
                        "{},{},{},{:e},{:e},{}\n",
                        curve.experiment,
                        r.depth,
                        r.margin,
                        r.ratio,
                        r.annulus,
                        r.bound_ratio.map_or(String::new(), |b| format!("{b:e}"))
                    ));
                    dat.push_str(&format!("{} {:e}\n", r.depth, r.ratio));
                }
                put(&format!("ratio_{}.dat", curve.experiment), dat)?;
            }
            put("lower_bounds.csv", rows)?;
        }
        Ok(written)
    }
}

/// Shared inputs of every check in a run.
pub(crate) struct Context {
    pub config: ExperimentConfig,
    pub spec: GridSpec,
    pub members: Vec<CorpusEntry>,
    pub kernel: RadialKernel,
    pub quad: QuadratureSpec,
    pub window: GridFunction,
}

impl Context {
    fn new(config: &ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let spec = config.grid_spec()?;
        let all = corpus::corpus(config.seed);
        let members = if config.corpus.ids.is_empty() {
            all
        } else {
            all.into_iter().filter(|e| config.corpus.ids.contains(&e.id)).collect()
        };
        Ok(Self {
            config: config.clone(),
            spec,
            members,
            kernel: config.kernel.load(1)?,
            quad: config.quadrature,
            window: gaussian_window(spec),
        })
    }

    pub fn sampled(&self) -> Vec<GridFunction> {
        self.members.iter().map(|e| e.sample(self.spec)).collect()
    }
}

/// Run a suite. Checks execute concurrently on `config.workers` threads;
/// results are assembled in registry order, so the report does not depend
/// on the thread count. Failing checks are recorded, never propagated.
pub fn run_suite(config: &ExperimentConfig, suite: Suite) -> Result<ExperimentReport> {
    let ctx = Context::new(config)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let defs: Vec<&checks::CheckDef> = checks::registry().iter().filter(|c| suite.includes(c.suite)).collect();

    let outcomes: Vec<(CheckResult, Option<ExperimentCurve>, f64)> = pool.install(|| {
        defs.par_iter()
            .map(|def| {
                let started = Instant::now();
                let (result, curve) = checks::execute(def, &ctx);
                (result, curve, started.elapsed().as_secs_f64())
            })
            .collect()
    });

    let mut checks_out = Vec::with_capacity(outcomes.len());
    let mut curves = Vec::new();
    let mut timings = Vec::new();
    for (result, curve, secs) in outcomes {
        timings.push((result.name.clone(), secs));
        curves.extend(curve);
        checks_out.push(result);
    }
    let condition_params = SpaceParams::modulation(config.witness.p, config.witness.q, 0.0)?;
    Ok(ExperimentReport {
        toolkit_version: env!("CARGO_PKG_VERSION").into(),
        suite,
        config: config.clone(),
        kernel: ctx.kernel.to_string(),
        condition: check_conditions(&ctx.kernel, &condition_params),
        passed: checks_out.iter().all(|c| c.passed),
        checks: checks_out,
        curves,
        timings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trip_and_precedence() {
        let cfg = ExperimentConfig::from_toml(
            "seed = 7\nworkers = 3\n[grid]\npoints = 2048\n[witness]\ndepths = [8, 12]\n",
        )
        .unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.grid.points, 2048);
        assert_eq!(cfg.grid.half_extent, 16.0);
        assert_eq!(cfg.witness.schedule(), vec![(8, 2), (12, 3)]);
        let mut over = cfg.clone();
        over.apply(&Overrides {
            seed: Some(9),
            kernel: Some("annulus".into()),
            ..Default::default()
        });
        assert_eq!(over.seed, 9);
        assert_eq!(over.kernel, KernelConfig::named("annulus"));
        let echoed = ExperimentConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(echoed.seed, cfg.seed);
        assert_eq!(echoed.workers, 1, "execution settings are not echoed");
    }

    #[test]
    fn unknown_keys_and_bad_grids_rejected() {
        assert!(ExperimentConfig::from_toml("sede = 1").is_err());
        let mut cfg = ExperimentConfig::default();
        cfg.grid.half_extent = 15.7;
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        let mut cfg = ExperimentConfig::default();
        cfg.witness.depths = vec![8, 30];
        assert!(cfg.validate().is_err());
        assert!(ExperimentConfig::default().validate().is_ok());
    }

    #[test]
    fn suites_partition_the_checks() {
        let all = Suite::All.check_names();
        let parts: usize = Suite::PARTS.iter().map(|s| s.check_names().len()).sum();
        assert_eq!(all.len(), parts);
        let mut uniq = all.clone();
        uniq.sort();
        uniq.dedup();
        assert_eq!(uniq.len(), all.len());
    }
}
