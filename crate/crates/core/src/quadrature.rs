//! Composite Gauss-Legendre rules for radial integrals.
//!
//! Integrals `\int_0^inf omega_n r^{n-1} Phi(r) F(r) dr` are split into
//! panels uniform in `u = ln r` over `[r_min, r_max]`, refined at kernel
//! breakpoints so each panel sees one smooth power law. What lies outside
//! `[r_min, r_max]` is handled in closed form by the caller, since there
//! `F` collapses to its value at the origin.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::InterpolationSpec;
use crate::kernel::{sphere_measure, Moment, RadialKernel};

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        for _ in 0..100 {
            let (p, pm1) = legendre(n, x);
            let dx = p / (nf * (x * p - pm1) / (x * x - 1.0));
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        let (p, pm1) = legendre(n, x);
        let dp = nf * (x * p - pm1) / (x * x - 1.0);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// `(P_n(x), P_{n-1}(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    (p1, p0)
}

/// Radial quadrature settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureSpec {
    pub r_min: f64,
    pub r_max: f64,
    /// Log-uniform panels across `[r_min, r_max]` before breakpoint refinement.
    pub panels: usize,
    pub nodes_per_panel: usize,
    /// How `f` is evaluated at the off-grid arguments `x / r` or `r x`.
    pub interp: InterpolationSpec,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            r_min: 2f64.powi(-12),
            r_max: 2f64.powi(12),
            panels: 96,
            nodes_per_panel: 8,
            interp: InterpolationSpec::default(),
        }
    }
}

impl QuadratureSpec {
    /// Same range with `panels_per_octave` panels per doubling of `r`.
    pub fn octaves(r_min: f64, r_max: f64, panels_per_octave: usize) -> Self {
        let octaves = (r_max / r_min).log2().ceil().max(1.0) as usize;
        Self {
            r_min,
            r_max,
            panels: octaves * panels_per_octave,
            ..Self::default()
        }
    }

    pub fn with_panels(self, panels: usize) -> Self {
        Self { panels, ..self }
    }

    pub fn with_interp(self, interp: InterpolationSpec) -> Self {
        Self { interp, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_min > 0.0 && self.r_min < self.r_max && self.r_max.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "quadrature range must satisfy 0 < r_min < r_max < inf, got [{}, {}]",
                self.r_min, self.r_max
            )));
        }
        if self.panels == 0 || self.nodes_per_panel == 0 || self.nodes_per_panel > 64 {
            return Err(Error::InvalidParameter(
                "quadrature needs at least one panel and 1..=64 nodes per panel".into(),
            ));
        }
        self.interp.validate()
    }
}

/// Discretised radial measure `omega_n r^{n-1} Phi(r) dr` on `[r_min, r_max]`
/// plus the closed-form masses outside it.
#[derive(Clone, Debug)]
pub struct RadialRule {
    pub dim: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// `\int_{r > r_max} Phi dy`.
    pub tail_mass: Moment,
    /// `\int_{r < r_min} Phi dy`.
    pub head_mass: Moment,
    /// `\int_{r < r_min} |y|^n Phi dy`.
    pub head_mass_weighted: Moment,
    /// `\int_{r > r_max} |y|^n Phi dy`.
    pub tail_mass_weighted: Moment,
}

impl RadialRule {
    /// Build the rule, rejecting kernels whose segments straddle the range
    /// anywhere other than towards `0` or `inf`.
    pub fn new(kernel: &RadialKernel, spec: &QuadratureSpec) -> Result<Self> {
        spec.validate()?;
        for s in kernel.active_segments() {
            let lo_ok = s.r_lo == 0.0 || s.r_lo >= spec.r_min;
            let hi_ok = s.r_hi.is_infinite() || s.r_hi <= spec.r_max;
            if !(lo_ok && hi_ok) {
                return Err(Error::QuadratureCoverage {
                    r_min: spec.r_min,
                    r_max: spec.r_max,
                    r_lo: s.r_lo,
                    r_hi: s.r_hi,
                });
            }
        }

        let (gl_x, gl_w) = gauss_legendre(spec.nodes_per_panel);
        let (u0, u1) = (spec.r_min.ln(), spec.r_max.ln());
        let mut cuts: Vec<f64> = (0..=spec.panels)
            .map(|i| u0 + (u1 - u0) * i as f64 / spec.panels as f64)
            .collect();
        cuts.extend(
            kernel
                .breakpoints()
                .into_iter()
                .filter(|r| *r > spec.r_min && *r < spec.r_max)
                .map(f64::ln),
        );
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);

        let omega = sphere_measure(kernel.dim());
        let n = kernel.dim() as i32;
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let mid = 0.5 * (a + b);
            if kernel.value(mid.exp()) == 0.0 {
                continue;
            }
            let half = 0.5 * (b - a);
            for (x, wt) in gl_x.iter().zip(&gl_w) {
                let r = (mid + half * x).exp();
                // dr = r du
                let weight = omega * r.powi(n - 1) * kernel.value(r) * r * wt * half;
                nodes.push(r);
                weights.push(weight);
            }
        }

        let nf = kernel.dim() as f64;
        Ok(Self {
            dim: kernel.dim(),
            nodes,
            weights,
            tail_mass: kernel.moment_over(0.0, spec.r_max, f64::INFINITY),
            head_mass: kernel.moment_over(0.0, 0.0, spec.r_min),
            head_mass_weighted: kernel.moment_over(nf, 0.0, spec.r_min),
            tail_mass_weighted: kernel.moment_over(nf, spec.r_max, f64::INFINITY),
        })
    }

    /// Quadrature estimate of `\int |y|^beta Phi(y) dy` over `[r_min, r_max]`.
    pub fn moment(&self, beta: f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(r, w)| w * r.powf(beta))
            .sum()
    }
}
