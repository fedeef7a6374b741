//! Dyadic-shell witness functions and the lower-bound experiments that
//! expose operator-norm blow-up when the sharp kernel condition fails.
//!
//! Everything here is one-dimensional. For depth `N` the witness grid is
//! `[-L, L)` with `L = 3 * 2^{N+1}` and step `3/32`: twice the outermost shell
//! radius, so circular convolution never wraps onto the shells.

use std::f64::consts::LN_2;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{fourier, lp_norm, Domain, GridFunction, GridSpec, InterpolationSpec};
use crate::hausdorff::{apply_hausdorff_strided, apply_hausdorff_tilde_fn};
use crate::kernel::{check_conditions, ConditionVerdict, RadialKernel};
use crate::quadrature::QuadratureSpec;
use crate::timefreq::{build_decomposition, eta_1d, modulation_norm_discrete, SpaceParams};

/// `psi`: 1 on `|t| <= 4/3`, 0 on `|t| >= 3/2`.
pub fn psi(t: f64) -> f64 {
    crate::timefreq::smooth_step(t, 4.0 / 3.0, 1.5)
}

/// `rho(t) = psi(t) - psi(2t)`.
pub fn rho(t: f64) -> f64 {
    psi(t) - psi(2.0 * t)
}

/// `rho_j(t) = rho(t / 2^j)`.
pub fn rho_j(j: i32, t: f64) -> f64 {
    rho(t / 2f64.powi(j))
}

/// `sum_{j=a}^{b} rho_j(t)`, by telescoping.
pub fn shell_sum(t: f64, a: i32, b: i32) -> f64 {
    if b < a {
        return 0.0;
    }
    psi(t / 2f64.powi(b)) - psi(t / 2f64.powi(a - 1))
}

/// Spectral profile of the mollifier's square root: plateau `1/8`, support `1/4`.
fn mollifier_root(xi: f64) -> f64 {
    crate::timefreq::smooth_step(xi, 0.125, 0.25)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessSpec {
    /// Number of dyadic shells `N`.
    pub depth: u32,
    /// Shells trimmed at each end `M`.
    pub margin: u32,
    #[serde(with = "crate::timefreq::exponent")]
    pub p: f64,
    #[serde(with = "crate::timefreq::exponent")]
    pub q: f64,
}

impl WitnessSpec {
    pub fn new(depth: u32, margin: u32, p: f64, q: f64) -> Result<Self> {
        if depth < 4 {
            return Err(Error::Witness(format!("depth must be >= 4, got {depth}")));
        }
        if depth > 20 {
            return Err(Error::Witness(format!("depth {depth} needs more than 2^27 samples")));
        }
        if margin < 1 || 2 * margin + 2 > depth {
            return Err(Error::Witness(format!(
                "margin must satisfy 1 <= M <= N/2 - 1, got M = {margin}, N = {depth}"
            )));
        }
        crate::grid::check_exponent(p)?;
        crate::grid::check_exponent(q)?;
        Ok(Self { depth, margin, p, q })
    }

    /// The depth schedule's default margin `N / 4` (at least 1).
    pub fn scheduled(depth: u32, p: f64, q: f64) -> Result<Self> {
        Self::new(depth, (depth / 4).max(1), p, q)
    }

    pub fn grid(&self) -> GridSpec {
        GridSpec::line(1 << (self.depth + 7), 3.0 * 2f64.powi(self.depth as i32 + 1))
            .expect("witness grids are valid")
    }

    /// Outer radius of the last shell, `(3/2) 2^N`.
    pub fn outer_radius(&self) -> f64 {
        1.5 * 2f64.powi(self.depth as i32)
    }

    /// `g_N(x) = sum_{j=1}^{N} rho_j(x) |x|^{-1/q}`.
    pub fn g(&self, x: f64) -> f64 {
        let s = shell_sum(x, 1, self.depth as i32);
        if s == 0.0 {
            0.0
        } else {
            s * x.abs().powf(-1.0 / self.q)
        }
    }

    /// The profile convolved into `f_N`: shells `0..=N+1` times `|x|^{-1/p}`.
    pub fn f_profile(&self, x: f64) -> f64 {
        let s = shell_sum(x, 0, self.depth as i32 + 1);
        if s == 0.0 {
            0.0
        } else {
            s * x.abs().powf(-1.0 / self.p)
        }
    }

    /// Right-hand side of the pointwise lower bound: shells `1..=N`.
    pub fn lower_profile(&self, x: f64) -> f64 {
        let s = shell_sum(x, 1, self.depth as i32);
        if s == 0.0 {
            0.0
        } else {
            s * x.abs().powf(-1.0 / self.p)
        }
    }
}

/// `rho_j` for `j = 1..=N` sampled on the witness grid. Memory grows as
/// `N 2^{N+7}` samples; meant for small depths.
pub fn build_shell_functions(spec: &WitnessSpec) -> Result<Vec<GridFunction>> {
    let grid = spec.grid();
    (1..=spec.depth as i32)
        .map(|j| GridFunction::from_real_fn(grid, Domain::Space, |x| rho_j(j, x[0])))
        .collect()
}

/// `g_N` on the witness grid.
pub fn build_gn(spec: &WitnessSpec) -> Result<GridFunction> {
    GridFunction::from_real_fn(spec.grid(), Domain::Space, |x| spec.g(x[0]))
}

/// Nonnegative mollifier with spectrum in `B(0, 1/2)` and value 1 at 0,
/// built as `|F^{-1} b|^2 / |F^{-1} b(0)|^2` for a bump `b` of radius `1/4`.
pub fn build_mollifier(grid: GridSpec) -> Result<GridFunction> {
    let b: Vec<Complex64> = (0..grid.len())
        .map(|k| Complex64::new(mollifier_root(grid.coordinate(Domain::Frequency, k)), 0.0))
        .collect();
    let root = fourier::inverse_values(&grid, b);
    let peak = root[grid.center()].norm_sqr();
    if peak == 0.0 {
        return Err(Error::Witness("mollifier root vanishes at the origin".into()));
    }
    GridFunction::new(
        grid,
        Domain::Space,
        root.iter().map(|v| Complex64::new(v.norm_sqr() / peak, 0.0)).collect(),
    )
}

/// A built `f_N` together with its measured integrity constants.
#[derive(Clone, Debug)]
pub struct WitnessF {
    pub spec: WitnessSpec,
    pub f: GridFunction,
    /// Fraction of `|F f_N|^2` outside `|xi| <= 1/2`.
    pub spectral_tail: f64,
    /// Largest `|F phi_w|` outside `|xi| <= 1/2`, relative to its peak.
    pub mollifier_tail: f64,
    /// `min f_N / rhs` over samples where the shell lower profile is positive.
    pub c0: f64,
    /// Most negative sample relative to the maximum (rounding level).
    pub min_relative: f64,
    pub lp_norm: f64,
}

/// Spectral construction of `f_N = (sum_{j=0}^{N+1} rho_j |x|^{-1/p}) * phi`.
pub fn build_fn(spec: &WitnessSpec) -> Result<WitnessF> {
    let grid = spec.grid();
    let profile: Vec<Complex64> = (0..grid.len())
        .into_par_iter()
        .map(|i| Complex64::new(spec.f_profile(grid.coordinate(Domain::Space, i)), 0.0))
        .collect();
    let mollifier = build_mollifier(grid)?;
    let mol_hat = fourier::forward_values(&grid, mollifier.into_values());
    let mol_peak = mol_hat.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mollifier_tail = (0..grid.len())
        .filter(|&k| grid.coordinate(Domain::Frequency, k).abs() > 0.5)
        .map(|k| mol_hat[k].norm())
        .fold(0.0, f64::max)
        / mol_peak;
    let mut spectrum = fourier::forward_values(&grid, profile);
    for (s, m) in spectrum.iter_mut().zip(&mol_hat) {
        *s *= m;
    }

    let (mut total, mut outside) = (0.0, 0.0);
    for (k, v) in spectrum.iter().enumerate() {
        let e = v.norm_sqr();
        total += e;
        if grid.coordinate(Domain::Frequency, k).abs() > 0.5 {
            outside += e;
        }
    }
    let spectral_tail = if total > 0.0 { outside / total } else { 0.0 };

    let f = GridFunction::new(grid, Domain::Space, fourier::inverse_values(&grid, spectrum))?;
    let peak = f.max_abs();
    let min_relative = f.values().iter().map(|v| v.re).fold(f64::INFINITY, f64::min) / peak;

    let mut c0 = f64::INFINITY;
    let mut worst = 0.0;
    for (i, v) in f.values().iter().enumerate() {
        let x = grid.coordinate(Domain::Space, i);
        let rhs = spec.lower_profile(x);
        if rhs > 0.0 {
            let r = v.re / rhs;
            if r < c0 {
                c0 = r;
                worst = x;
            }
        }
    }
    if c0.is_nan() || c0 <= 0.0 {
        return Err(Error::Witness(format!(
            "pointwise shell lower bound fails at x = {worst} (ratio {c0})"
        )));
    }
    let lp = lp_norm(&f, spec.p)?;
    Ok(WitnessF {
        spec: *spec,
        f,
        spectral_tail,
        mollifier_tail,
        c0,
        min_relative,
        lp_norm: lp,
    })
}

/// `(||F^{-1}(sigma_k g_N)||_{L^p})_{k >= 0}`; the sequence is even in `k`.
/// Each band is sampled in closed form on a local frame.
pub fn gn_band_norms(spec: &WitnessSpec) -> Vec<f64> {
    const FRAME: usize = 256;
    const STEP: f64 = 1.0 / 32.0;
    let k_top = spec.outer_radius().ceil() as i64 + 1;
    let sigma0 = |t: f64| {
        let num = eta_1d(t);
        if num == 0.0 {
            return 0.0;
        }
        num / (-1..=1).map(|l| eta_1d(t - l as f64)).sum::<f64>()
    };
    let x_cell = 1.0 / (FRAME as f64 * STEP);
    let fft = FftPlanner::new().plan_fft_inverse(FRAME);
    (0..=k_top)
        .into_par_iter()
        .map_init(
            || (vec![Complex64::new(0.0, 0.0); FRAME], vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()]),
            |(buf, scratch), k| {
                let mut any = false;
                for (i, slot) in buf.iter_mut().enumerate() {
                    let t = (i as f64 - (FRAME / 2) as f64) * STEP;
                    let v = sigma0(t) * spec.g(k as f64 + t);
                    any |= v != 0.0;
                    *slot = Complex64::new(if i % 2 == 0 { v } else { -v }, 0.0);
                }
                if !any {
                    return 0.0;
                }
                fft.process_with_scratch(buf, scratch);
                let mags = buf.iter().map(|v| v.norm() * STEP);
                if spec.p.is_infinite() {
                    mags.fold(0.0, f64::max)
                } else {
                    (mags.map(|m| m.powf(spec.p)).sum::<f64>() * x_cell).powf(1.0 / spec.p)
                }
            },
        )
        .collect()
}

/// `||g_N||_{W_{q,p}}` through the frequency-side band decomposition:
/// `(sum_k ||F^{-1}(sigma_k g_N)||_p^q)^{1/q}`.
pub fn gn_wiener_norm(spec: &WitnessSpec) -> f64 {
    let bands = gn_band_norms(spec);
    if spec.q.is_infinite() {
        return bands.iter().cloned().fold(0.0, f64::max);
    }
    let total: f64 = bands
        .iter()
        .enumerate()
        .map(|(k, b)| if k == 0 { 1.0 } else { 2.0 } * b.powf(spec.q))
        .sum();
    total.powf(1.0 / spec.q)
}

/// Numerical knobs of the blow-up experiments.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WitnessSettings {
    /// Output subsampling of `H f_N` relative to the witness grid.
    pub stride: usize,
    pub panels_per_octave: usize,
    pub nodes_per_panel: usize,
    pub interp: InterpolationSpec,
    /// Lattice radius of the decomposition measuring `||f_N||_{M_{p,q}}`.
    pub k_max: i64,
    pub r_min: f64,
    /// `r_max = 2^{N + r_max_octaves_past_depth}`.
    pub r_max_octaves_past_depth: i32,
}

impl Default for WitnessSettings {
    fn default() -> Self {
        Self {
            stride: 4,
            panels_per_octave: 4,
            nodes_per_panel: 8,
            interp: InterpolationSpec { oversample: 1, order: 4 },
            k_max: 2,
            r_min: 1.0 / 16.0,
            r_max_octaves_past_depth: 6,
        }
    }
}

impl WitnessSettings {
    pub fn quadrature(&self, depth: u32) -> QuadratureSpec {
        let r_max = 2f64.powi(depth as i32 + self.r_max_octaves_past_depth);
        QuadratureSpec {
            nodes_per_panel: self.nodes_per_panel,
            interp: self.interp,
            ..QuadratureSpec::octaves(self.r_min, r_max, self.panels_per_octave)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrendVerdict {
    BlowUp,
    Bounded,
    Inconclusive,
}

/// One `(N, M)` cell of a schedule.
#[derive(Clone, Debug, Serialize)]
pub struct ScheduleRow {
    #[serde(rename = "N")]
    pub depth: u32,
    #[serde(rename = "M")]
    pub margin: u32,
    /// Lower-bound ratio `R(N, M)`.
    #[serde(rename = "R")]
    pub ratio: f64,
    /// Closed-form annulus integral `A(M)`.
    #[serde(rename = "A")]
    pub annulus: f64,
    /// `R / (A (lg 2^{N-2M} / lg 2^N)^{1/r})`; absent when `A = 0`.
    pub bound_ratio: Option<f64>,
    pub numerator: f64,
    pub denominator: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentCurve {
    pub experiment: String,
    pub kernel: String,
    pub kernel_verdict: ConditionVerdict,
    pub rows: Vec<ScheduleRow>,
    /// `R_{i+1} / R_i - 1` along the schedule.
    pub growth: Vec<f64>,
    /// `max R / min R`.
    pub spread: f64,
    pub growth_threshold: f64,
    pub verdict: TrendVerdict,
    /// Smallest measured constant `c` in `R >= c A(M) (...)^{1/r}`.
    pub c_measured: Option<f64>,
}

/// Growth needed per step for a blow-up verdict in the modulation experiment.
pub const MODULATION_GROWTH: f64 = 0.20;
/// Same for the Wiener mirror.
pub const WIENER_GROWTH: f64 = 0.15;
/// Largest `max/min` spread still called bounded.
pub const BOUNDED_SPREAD: f64 = 1.10;

/// Classify a ratio sequence.
pub fn classify(ratios: &[f64], growth_threshold: f64) -> (TrendVerdict, Vec<f64>, f64) {
    let growth: Vec<f64> = ratios
        .windows(2)
        .map(|w| if w[0] > 0.0 { w[1] / w[0] - 1.0 } else if w[1] > 0.0 { f64::INFINITY } else { 0.0 })
        .collect();
    let max = ratios.iter().cloned().fold(0.0, f64::max);
    let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let spread = if max == 0.0 { 1.0 } else { max / min };
    let verdict = if !growth.is_empty() && growth.iter().all(|g| *g >= growth_threshold) {
        TrendVerdict::BlowUp
    } else if spread <= BOUNDED_SPREAD {
        TrendVerdict::Bounded
    } else {
        TrendVerdict::Inconclusive
    };
    (verdict, growth, spread)
}

fn check_regime(p: f64, q: f64) -> Result<()> {
    let (ip, iq) = (1.0 / p, 1.0 / q);
    if !(0.5 <= ip && ip <= iq && iq <= 1.0) {
        return Err(Error::Witness(format!(
            "lower-bound experiments need 1/2 <= 1/p <= 1/q <= 1, got p = {p}, q = {q}"
        )));
    }
    Ok(())
}

fn check_kernel(kernel: &RadialKernel) -> Result<()> {
    if kernel.dim() != 1 {
        return Err(Error::Witness("witness experiments are one-dimensional".into()));
    }
    if !kernel.is_admissible() {
        return Err(Error::Inadmissible {
            local: kernel.basic_local().to_string(),
            global: kernel.basic_global().to_string(),
        });
    }
    Ok(())
}

fn finite_ratio(numerator: f64, denominator: f64, depth: u32) -> Result<f64> {
    let ratio = numerator / denominator;
    if !ratio.is_finite() {
        return Err(Error::Witness(format!(
            "non-finite ratio {numerator} / {denominator} at depth {depth}"
        )));
    }
    Ok(ratio)
}

fn depth_factor(depth: u32, margin: u32, r: f64) -> f64 {
    let frac = (depth - 2 * margin) as f64 / depth as f64;
    if r.is_infinite() {
        1.0
    } else {
        frac.powf(1.0 / r)
    }
}

fn finish(
    experiment: &str,
    kernel: &RadialKernel,
    params: &SpaceParams,
    rows: Vec<ScheduleRow>,
    threshold: f64,
) -> ExperimentCurve {
    let ratios: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
    let (verdict, growth, spread) = classify(&ratios, threshold);
    let c_measured = rows
        .iter()
        .filter_map(|r| r.bound_ratio)
        .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.min(v))));
    ExperimentCurve {
        experiment: experiment.into(),
        kernel: kernel.to_string(),
        kernel_verdict: check_conditions(kernel, params).verdict,
        rows,
        growth,
        spread,
        growth_threshold: threshold,
        verdict,
        c_measured,
    }
}

/// `R(N, M) = ||H f_N||_{L^p} / ||f_N||_{M_{p,q}}` along a depth schedule,
/// with `A(M) = \int_{(3/4)2^{-M} <= |y| <= (2/3)2^M} Phi |y|^{1/p}`.
pub fn lower_bound_experiment_modulation(
    kernel: &RadialKernel,
    schedule: &[(u32, u32)],
    p: f64,
    q: f64,
    settings: &WitnessSettings,
) -> Result<ExperimentCurve> {
    check_regime(p, q)?;
    check_kernel(kernel)?;
    let params = SpaceParams::modulation(p, q, 0.0)?;
    let mut rows = Vec::with_capacity(schedule.len());
    for &(depth, margin) in schedule {
        let spec = WitnessSpec::new(depth, margin, p, q)?;
        let annulus = kernel
            .moment_over(1.0 / p, 0.75 * 2f64.powi(-(margin as i32)), (2.0 / 3.0) * 2f64.powi(margin as i32))
            .as_f64();
        let (numerator, denominator) = if kernel.is_zero() {
            (0.0, 1.0)
        } else {
            let w = build_fn(&spec)?;
            let family = build_decomposition(*w.f.spec(), settings.k_max)?;
            let denominator = modulation_norm_discrete(&w.f, &params, &family)?;
            let hf = apply_hausdorff_strided(kernel, &w.f, &settings.quadrature(depth), settings.stride)?;
            (lp_norm(&hf, p)?, denominator)
        };
        let ratio = finite_ratio(numerator, denominator, depth)?;
        let scale = annulus * depth_factor(depth, margin, p);
        rows.push(ScheduleRow {
            depth,
            margin,
            ratio,
            annulus,
            bound_ratio: (scale > 0.0).then(|| ratio / scale),
            numerator,
            denominator,
        });
    }
    Ok(finish("modulation", kernel, &params, rows, MODULATION_GROWTH))
}

/// `R(N, M) = ||~H g_N||_{L^q} / ||g_N||_{W_{q,p}}` along a depth schedule,
/// with `A(M) = \int_{(3/2)2^{-M} <= |y| <= (4/3)2^M} Phi |y|^{1/q'}`.
pub fn lower_bound_experiment_wiener(
    kernel: &RadialKernel,
    schedule: &[(u32, u32)],
    p: f64,
    q: f64,
    settings: &WitnessSettings,
) -> Result<ExperimentCurve> {
    check_regime(p, q)?;
    check_kernel(kernel)?;
    let params = SpaceParams::wiener(q, p, 0.0)?;
    let q_conj = crate::timefreq::conjugate(q);
    let mut rows = Vec::with_capacity(schedule.len());
    for &(depth, margin) in schedule {
        let spec = WitnessSpec::new(depth, margin, p, q)?;
        let annulus = kernel
            .moment_over(1.0 / q_conj, 1.5 * 2f64.powi(-(margin as i32)), (4.0 / 3.0) * 2f64.powi(margin as i32))
            .as_f64();
        let (numerator, denominator) = if kernel.is_zero() {
            (0.0, 1.0)
        } else {
            let grid = spec.grid();
            let out = GridSpec::line(grid.points() / settings.stride, grid.half_extent())?;
            let hg = apply_hausdorff_tilde_fn(
                kernel,
                |x| spec.g(x),
                (4.0 / 3.0, spec.outer_radius()),
                out,
                &settings.quadrature(depth),
            )?;
            (lp_norm(&hg, q)?, gn_wiener_norm(&spec))
        };
        let ratio = finite_ratio(numerator, denominator, depth)?;
        let scale = annulus * depth_factor(depth, margin, q);
        rows.push(ScheduleRow {
            depth,
            margin,
            ratio,
            annulus,
            bound_ratio: (scale > 0.0).then(|| ratio / scale),
            numerator,
            denominator,
        });
    }
    Ok(finish("wiener", kernel, &params, rows, WIENER_GROWTH))
}

/// Expected trend for a kernel verdict.
pub fn expected_trend(verdict: ConditionVerdict) -> TrendVerdict {
    match verdict {
        ConditionVerdict::SharpFinite => TrendVerdict::Bounded,
        _ => TrendVerdict::BlowUp,
    }
}

/// `||f_N||_{L^p} / (ln 2^N)^{1/p}`.
pub fn normalised_lp(w: &WitnessF) -> f64 {
    let n = w.spec.depth as f64;
    if w.spec.p.is_infinite() {
        w.lp_norm
    } else {
        w.lp_norm / (n * LN_2).powf(1.0 / w.spec.p)
    }
}
