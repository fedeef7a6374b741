//! The Hausdorff operator `H f(x) = \int Phi(y) f(x / |y|) dy`, its companion
//! `~H f(x) = \int Phi(y) |y|^n f(|y| x) dy`, and numerical checks of the
//! identities linking them.
//!
//! Both reduce to radial integrals against `omega_n r^{n-1} Phi(r) dr`,
//! evaluated with a [`RadialRule`]. Off-grid values of `f` come from an
//! [`Interpolator`]; arguments outside the grid read as zero.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{
    fourier_transform, inner_product, lp_norm, Domain, GridFunction, GridSpec, Interpolator,
};
use crate::kernel::RadialKernel;
use crate::quadrature::{QuadratureSpec, RadialRule};

const CHUNK: usize = 256;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Variant {
    Plain,
    Tilde,
}

fn require_admissible(kernel: &RadialKernel) -> Result<()> {
    if !kernel.is_admissible() {
        return Err(Error::Inadmissible {
            local: kernel.basic_local().to_string(),
            global: kernel.basic_global().to_string(),
        });
    }
    Ok(())
}

/// `H f` on the grid of `f`.
pub fn apply_hausdorff(kernel: &RadialKernel, f: &GridFunction, quad: &QuadratureSpec) -> Result<GridFunction> {
    apply(kernel, f, quad, 1, Variant::Plain)
}

/// `~H f` on the grid of `f`.
pub fn apply_hausdorff_tilde(
    kernel: &RadialKernel,
    f: &GridFunction,
    quad: &QuadratureSpec,
) -> Result<GridFunction> {
    apply(kernel, f, quad, 1, Variant::Tilde)
}

/// `H f` at every `stride`-th space sample; the result lives on a grid with
/// the same extent and `N / stride` points.
pub fn apply_hausdorff_strided(
    kernel: &RadialKernel,
    f: &GridFunction,
    quad: &QuadratureSpec,
    stride: usize,
) -> Result<GridFunction> {
    apply(kernel, f, quad, stride, Variant::Plain)
}

pub fn apply_hausdorff_tilde_strided(
    kernel: &RadialKernel,
    f: &GridFunction,
    quad: &QuadratureSpec,
    stride: usize,
) -> Result<GridFunction> {
    apply(kernel, f, quad, stride, Variant::Tilde)
}

fn apply(
    kernel: &RadialKernel,
    f: &GridFunction,
    quad: &QuadratureSpec,
    stride: usize,
    variant: Variant,
) -> Result<GridFunction> {
    let spec = *f.spec();
    if kernel.dim() != spec.dim() {
        return Err(Error::Kernel(format!(
            "kernel dimension {} does not match grid dimension {}",
            kernel.dim(),
            spec.dim()
        )));
    }
    require_admissible(kernel)?;
    if stride == 0 || !stride.is_power_of_two() || spec.points() / stride < 16 {
        return Err(Error::InvalidParameter(format!("output stride {stride} is not usable on this grid")));
    }
    if stride > 1 && f.domain() != Domain::Space {
        return Err(Error::InvalidParameter("strided output needs a space-side function".into()));
    }
    let out_spec = GridSpec::new(spec.dim(), spec.points() / stride, spec.half_extent())?;
    let rule = RadialRule::new(kernel, quad)?;
    if kernel.is_zero() {
        return Ok(GridFunction::zeros(out_spec, f.domain()));
    }
    let ip = Interpolator::new(f, quad.interp)?;
    let dim = spec.dim();
    let centre = spec.ravel([spec.center(), spec.center()]);
    let f0 = f.values()[centre];

    let n = dim as i32;
    let (scales, weights): (Vec<f64>, Vec<f64>) = match variant {
        Variant::Plain => (rule.nodes.iter().map(|r| 1.0 / r).collect(), rule.weights.clone()),
        Variant::Tilde => (
            rule.nodes.clone(),
            rule.nodes.iter().zip(&rule.weights).map(|(r, w)| w * r.powi(n)).collect(),
        ),
    };
    // Mass outside [r_min, r_max] that sees f(0) at every x, and the extra
    // mass that sees it only at x = 0.
    let (everywhere, at_origin) = match variant {
        Variant::Plain => (rule.tail_mass, rule.head_mass),
        Variant::Tilde => (rule.head_mass_weighted, rule.tail_mass_weighted),
    };
    let everywhere = everywhere.value().unwrap_or(0.0);
    let at_origin = at_origin.value().unwrap_or(0.0);

    let domain = f.domain();
    let mut values = vec![Complex64::new(0.0, 0.0); out_spec.len()];
    values.par_chunks_mut(CHUNK).enumerate().for_each(|(c, out)| {
        for (i, slot) in out.iter_mut().enumerate() {
            let idx = c * CHUNK + i;
            let x = out_spec.point(domain, idx);
            let mut acc = Complex64::new(0.0, 0.0);
            if dim == 1 {
                for (s, w) in scales.iter().zip(&weights) {
                    acc += ip.eval_1d(x[0] * s) * w;
                }
            } else {
                for (s, w) in scales.iter().zip(&weights) {
                    acc += ip.eval(&[x[0] * s, x[1] * s]) * w;
                }
            }
            acc += f0 * everywhere;
            if x[..dim].iter().all(|t| *t == 0.0) {
                acc += f0 * at_origin;
            }
            *slot = acc;
        }
    });
    GridFunction::new(out_spec, domain, values)
}

/// `H g` for a closed-form one-dimensional `g` vanishing outside
/// `support.0 <= |t| <= support.1`, sampled on `out` (space side).
pub fn apply_hausdorff_fn<G>(
    kernel: &RadialKernel,
    g: G,
    support: (f64, f64),
    out: GridSpec,
    quad: &QuadratureSpec,
) -> Result<GridFunction>
where
    G: Fn(f64) -> f64 + Sync,
{
    apply_closed_form(kernel, g, support, out, quad, Variant::Plain)
}

/// `~H g` for a closed-form one-dimensional `g`; see [`apply_hausdorff_fn`].
pub fn apply_hausdorff_tilde_fn<G>(
    kernel: &RadialKernel,
    g: G,
    support: (f64, f64),
    out: GridSpec,
    quad: &QuadratureSpec,
) -> Result<GridFunction>
where
    G: Fn(f64) -> f64 + Sync,
{
    apply_closed_form(kernel, g, support, out, quad, Variant::Tilde)
}

fn apply_closed_form<G>(
    kernel: &RadialKernel,
    g: G,
    support: (f64, f64),
    out: GridSpec,
    quad: &QuadratureSpec,
    variant: Variant,
) -> Result<GridFunction>
where
    G: Fn(f64) -> f64 + Sync,
{
    if kernel.dim() != 1 || out.dim() != 1 {
        return Err(Error::InvalidParameter("closed-form application is one-dimensional".into()));
    }
    require_admissible(kernel)?;
    let (a, b) = support;
    if !(a >= 0.0 && a < b) {
        return Err(Error::InvalidParameter(format!("bad support [{a}, {b}]")));
    }
    let rule = RadialRule::new(kernel, quad)?;
    let g0 = if a == 0.0 { g(0.0) } else { 0.0 };
    let (everywhere, at_origin) = match variant {
        Variant::Plain => (rule.tail_mass, rule.head_mass),
        Variant::Tilde => (rule.head_mass_weighted, rule.tail_mass_weighted),
    };
    let everywhere = everywhere.value().unwrap_or(0.0);
    let at_origin = at_origin.value().unwrap_or(0.0);
    let nodes = &rule.nodes;
    let weights: Vec<f64> = match variant {
        Variant::Plain => rule.weights.clone(),
        Variant::Tilde => nodes.iter().zip(&rule.weights).map(|(r, w)| w * r).collect(),
    };

    let mut values = vec![Complex64::new(0.0, 0.0); out.len()];
    values.par_chunks_mut(CHUNK).enumerate().for_each(|(c, chunk)| {
        for (i, slot) in chunk.iter_mut().enumerate() {
            let x = out.coordinate(Domain::Space, c * CHUNK + i);
            let ax = x.abs();
            let mut acc = g0 * everywhere;
            if ax == 0.0 {
                acc += g0 * (at_origin + weights.iter().sum::<f64>());
            } else {
                // Radii whose argument lands inside the support of g.
                let (lo, hi) = match variant {
                    Variant::Plain => (ax / b, if a > 0.0 { ax / a } else { f64::INFINITY }),
                    Variant::Tilde => (a / ax, b / ax),
                };
                let start = nodes.partition_point(|r| *r < lo);
                let end = nodes.partition_point(|r| *r <= hi);
                for i in start..end {
                    let arg = match variant {
                        Variant::Plain => x / nodes[i],
                        Variant::Tilde => x * nodes[i],
                    };
                    acc += weights[i] * g(arg);
                }
            }
            *slot = Complex64::new(acc, 0.0);
        }
    });
    GridFunction::new(out, Domain::Space, values)
}

/// Relative (or absolute, for a vanishing reference) `L^2` residual.
#[derive(Clone, Debug, Serialize)]
pub struct ResidualReport {
    pub residual: f64,
    pub relative: bool,
    pub reference_norm: f64,
}

/// Compare `F(H f)` with `~H(F f)`.
pub fn verify_fourier_identity(
    kernel: &RadialKernel,
    f: &GridFunction,
    quad: &QuadratureSpec,
) -> Result<ResidualReport> {
    f.require_domain(Domain::Space)?;
    let lhs = fourier_transform(&apply_hausdorff(kernel, f, quad)?)?;
    let rhs = apply_hausdorff_tilde(kernel, &fourier_transform(f)?, quad)?;
    let diff = lp_norm(&lhs.sub(&rhs)?, 2.0)?;
    let reference_norm = lp_norm(&lhs, 2.0)?;
    let relative = reference_norm >= 1e-14;
    Ok(ResidualReport {
        residual: if relative { diff / reference_norm } else { diff },
        relative,
        reference_norm,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct AdjointReport {
    /// `<H f | g>`.
    pub lhs: Complex64,
    /// `<f | ~H g>`.
    pub rhs: Complex64,
    /// `|lhs - rhs| / |lhs|`.
    pub residual: f64,
    /// Cauchy-Schwarz scale `|H f|_2 |g|_2`.
    pub scale: f64,
    /// `|lhs - rhs| / scale`; meaningful when the pairing nearly vanishes.
    pub scaled_residual: f64,
}

impl AdjointReport {
    /// Whether the pairing is large enough relative to its Cauchy-Schwarz
    /// scale for the relative residual to carry information.
    pub fn is_degenerate(&self, floor: f64) -> bool {
        self.lhs.norm() < floor * self.scale
    }
}

/// Compare `<H f | g>` with `<f | ~H g>`.
pub fn verify_adjoint_identity(
    kernel: &RadialKernel,
    f: &GridFunction,
    g: &GridFunction,
    quad: &QuadratureSpec,
) -> Result<AdjointReport> {
    f.check_compatible(g)?;
    let hf = apply_hausdorff(kernel, f, quad)?;
    let lhs = inner_product(&hf, g)?;
    let rhs = inner_product(f, &apply_hausdorff_tilde(kernel, g, quad)?)?;
    let diff = (lhs - rhs).norm();
    let scale = lp_norm(&hf, 2.0)? * lp_norm(g, 2.0)?;
    Ok(AdjointReport {
        lhs,
        rhs,
        residual: diff / (lhs.norm() + 1e-300),
        scale,
        scaled_residual: if scale > 0.0 { diff / scale } else { diff },
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BilinearReport {
    pub pairing: f64,
    pub bound: f64,
    pub ratio: f64,
}

/// `|<H f, g>|` against `(|f|_1 + |f|_inf)(|g|_1 + |g|_inf) \int Phi min{1, |y|^n}`.
pub fn verify_bilinear_bound(
    kernel: &RadialKernel,
    f: &GridFunction,
    g: &GridFunction,
    quad: &QuadratureSpec,
) -> Result<BilinearReport> {
    f.check_compatible(g)?;
    let moment = kernel.min_moment().value().ok_or_else(|| Error::Inadmissible {
        local: kernel.basic_local().to_string(),
        global: kernel.basic_global().to_string(),
    })?;
    let pairing = inner_product(&apply_hausdorff(kernel, f, quad)?, g)?.norm();
    let size = |h: &GridFunction| -> Result<f64> { Ok(lp_norm(h, 1.0)? + lp_norm(h, f64::INFINITY)?) };
    let bound = size(f)? * size(g)? * moment;
    Ok(BilinearReport {
        pairing,
        bound,
        ratio: if bound > 0.0 { pairing / bound } else { 0.0 },
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PointwiseReport {
    /// Largest `|H f(x)| / bound(x)` over the grid.
    pub max_ratio: f64,
    pub worst_x: f64,
}

/// `|H f(x)| <= |x|^{-n} A sup_t |t|^n |f(t)| + |f|_inf B`, with `A` and `B`
/// the local and global admissibility integrals.
pub fn verify_pointwise_bound(
    kernel: &RadialKernel,
    f: &GridFunction,
    quad: &QuadratureSpec,
) -> Result<PointwiseReport> {
    f.require_domain(Domain::Space)?;
    let hf = apply_hausdorff(kernel, f, quad)?;
    let local = kernel.basic_local().as_f64();
    let global = kernel.basic_global().as_f64();
    let n = f.spec().dim() as i32;
    let norm_x = |p: [f64; 2]| (p[0] * p[0] + p[1] * p[1]).sqrt();
    let weighted_sup = (0..f.len())
        .map(|i| norm_x(f.point(i)).powi(n) * f.values()[i].norm())
        .fold(0.0, f64::max);
    let sup = f.max_abs();
    let mut report = PointwiseReport {
        max_ratio: 0.0,
        worst_x: 0.0,
    };
    for (i, v) in hf.values().iter().enumerate() {
        let r = norm_x(hf.point(i));
        let bound = if r == 0.0 {
            f64::INFINITY
        } else {
            r.powi(-n) * local * weighted_sup + sup * global
        };
        let ratio = if bound > 0.0 { v.norm() / bound } else { 0.0 };
        if ratio > report.max_ratio {
            report.max_ratio = ratio;
            report.worst_x = r;
        }
    }
    Ok(report)
}
