//! Frequency-uniform partition of unity and band operators.
//!
//! `eta` is a tensor product of a one-dimensional smooth step, and
//! `sigma_k = eta(. - k) / sum_l eta(. - l)` factorises the same way. On a
//! grid where `2L` is an integer every translate `k` lands on whole frequency
//! indices, so all symbols are read from one table of `sigma_0`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{japanese_bracket, SpaceParams};
use crate::error::{Error, Result};
use crate::grid::{fourier, lp_norm_slice, Domain, GridFunction, GridSpec};

/// Smallest number of frequency samples across the transition `[1/2, 3/4]`.
pub const RESOLUTION_SAMPLES: f64 = 8.0;

/// Largest admissible fraction of spectral energy outside the lattice window.
pub const SPECTRAL_TAIL_LIMIT: f64 = 1e-10;

fn bump_edge(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else {
        (-1.0 / u).exp()
    }
}

/// Smooth step equal to 1 for `|t| <= a` and 0 for `|t| >= b`.
pub fn smooth_step(t: f64, a: f64, b: f64) -> f64 {
    let r = t.abs();
    if r <= a {
        return 1.0;
    }
    if r >= b {
        return 0.0;
    }
    let s = (r - a) / (b - a);
    let up = bump_edge(1.0 - s);
    up / (up + bump_edge(s))
}

/// One-dimensional profile of the base window.
pub fn eta_1d(t: f64) -> f64 {
    smooth_step(t, 0.5, 0.75)
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionFamily {
    #[serde(skip)]
    spec: GridSpec,
    k_max: i64,
    /// Frequency samples per unit lattice step (`2L`).
    stride: i64,
    /// Half-width of the `sigma_0` table in samples.
    reach: i64,
    /// `sigma_0` at offsets `-reach..=reach` from the origin.
    #[serde(skip)]
    table: Vec<f64>,
}

/// Build `sigma_k` for `|k|_inf <= k_max` on the frequency grid of `spec`.
pub fn build_decomposition(spec: GridSpec, k_max: i64) -> Result<DecompositionFamily> {
    if k_max < 2 {
        return Err(Error::InvalidParameter(format!("lattice radius must be >= 2, got {k_max}")));
    }
    let two_l = 2.0 * spec.half_extent();
    if (two_l - two_l.round()).abs() > 1e-9 {
        return Err(Error::InvalidGrid(format!(
            "band decomposition needs an integer 2L so lattice shifts are whole samples, got 2L = {two_l}"
        )));
    }
    let df = spec.freq_step();
    if 0.25 / df < RESOLUTION_SAMPLES {
        return Err(Error::InvalidGrid(format!(
            "frequency step {df} resolves the window transition with {:.1} samples (need {RESOLUTION_SAMPLES})",
            0.25 / df
        )));
    }
    if spec.freq_half_extent() < (k_max + 1) as f64 {
        return Err(Error::InvalidGrid(format!(
            "frequency half-extent {} is below k_max + 1 = {}",
            spec.freq_half_extent(),
            k_max + 1
        )));
    }
    let stride = two_l.round() as i64;
    let reach = (0.75 / df).ceil() as i64;
    let table = (-reach..=reach)
        .map(|d| {
            let t = d as f64 * df;
            let den: f64 = (-2..=2).map(|l| eta_1d(t - l as f64)).sum();
            eta_1d(t) / den
        })
        .collect();
    Ok(DecompositionFamily {
        spec,
        k_max,
        stride,
        reach,
        table,
    })
}

impl DecompositionFamily {
    /// Default radius: 64 (one dimension) or 24 (two), clamped to what the
    /// grid's frequency extent supports.
    pub fn default_k_max(spec: &GridSpec) -> i64 {
        let wanted = if spec.dim() == 1 { 64 } else { 24 };
        wanted.min(spec.freq_half_extent().floor() as i64 - 1)
    }

    pub fn with_default_radius(spec: GridSpec) -> Result<Self> {
        build_decomposition(spec, Self::default_k_max(&spec))
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn k_max(&self) -> i64 {
        self.k_max
    }

    pub fn describe(&self) -> String {
        format!("smooth-step partition, |k| <= {}", self.k_max)
    }

    /// All lattice points with `|k|_inf <= k_max`, lexicographic.
    pub fn lattice(&self) -> Vec<Vec<i64>> {
        let r = -self.k_max..=self.k_max;
        if self.spec.dim() == 1 {
            r.map(|k| vec![k]).collect()
        } else {
            r.clone()
                .flat_map(|a| r.clone().map(move |b| vec![a, b]))
                .collect()
        }
    }

    fn check_k(&self, k: &[i64]) -> Result<()> {
        if k.len() != self.spec.dim() || k.iter().any(|c| c.abs() > self.k_max) {
            return Err(Error::LatticeOutOfRange {
                k: k.to_vec(),
                k_max: self.k_max,
            });
        }
        Ok(())
    }

    /// One-dimensional `sigma_k` at axis index `j`.
    pub fn sigma_axis(&self, k: i64, j: usize) -> f64 {
        let d = j as i64 - (self.spec.points() / 2) as i64 - k * self.stride;
        if d.abs() > self.reach {
            0.0
        } else {
            self.table[(d + self.reach) as usize]
        }
    }

    /// Axis index range holding the support of `sigma_k` along one axis.
    fn axis_support(&self, k: i64) -> std::ops::Range<usize> {
        let c = (self.spec.points() / 2) as i64 + k * self.stride;
        let lo = (c - self.reach).max(0) as usize;
        let hi = ((c + self.reach + 1).min(self.spec.points() as i64)).max(0) as usize;
        lo..hi.max(lo)
    }

    /// `sigma_k` at flat frequency index `idx`.
    pub fn sigma(&self, k: &[i64], idx: usize) -> f64 {
        let ix = self.spec.unravel(idx);
        (0..self.spec.dim()).map(|a| self.sigma_axis(k[a], ix[a])).product()
    }

    /// `sigma_k^* = sum of sigma_l over |l - k|_inf <= 1`.
    pub fn sigma_star(&self, k: &[i64], idx: usize) -> f64 {
        let ix = self.spec.unravel(idx);
        (0..self.spec.dim())
            .map(|a| (-1..=1).map(|d| self.sigma_axis(k[a] + d, ix[a])).sum::<f64>())
            .product()
    }

    /// `sum_k sigma_k` over the truncated lattice at flat index `idx`.
    pub fn coverage(&self, idx: usize) -> f64 {
        let ix = self.spec.unravel(idx);
        (0..self.spec.dim())
            .map(|a| {
                (-self.k_max..=self.k_max)
                    .map(|k| self.sigma_axis(k, ix[a]))
                    .sum::<f64>()
            })
            .product()
    }

    /// `sigma_k` sampled on the full frequency grid.
    pub fn symbol(&self, k: &[i64]) -> Result<GridFunction> {
        self.check_k(k)?;
        let values = (0..self.spec.len())
            .map(|idx| Complex64::new(self.sigma(k, idx), 0.0))
            .collect();
        GridFunction::new(self.spec, Domain::Frequency, values)
    }

    /// Fraction of `|F f|^2` not covered by the truncated family.
    pub fn spectral_tail(&self, ff: &GridFunction) -> Result<f64> {
        ff.require_domain(Domain::Frequency)?;
        self.check_spec(ff.spec())?;
        let n = self.spec.points();
        let axis_cov: Vec<f64> = (0..n)
            .map(|j| (-self.k_max..=self.k_max).map(|k| self.sigma_axis(k, j)).sum())
            .collect();
        let mut total = 0.0;
        let mut outside = 0.0;
        for (idx, v) in ff.values().iter().enumerate() {
            let e = v.norm_sqr();
            if e == 0.0 {
                continue;
            }
            let ix = self.spec.unravel(idx);
            let cov: f64 = (0..self.spec.dim()).map(|a| axis_cov[ix[a]]).product();
            total += e;
            outside += e * (1.0 - cov).max(0.0);
        }
        Ok(if total == 0.0 { 0.0 } else { outside / total })
    }

    fn check_spec(&self, spec: &GridSpec) -> Result<()> {
        if *spec != self.spec {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// `sigma_k F f`, or `None` when it vanishes identically.
    fn band_spectrum(&self, ff: &[Complex64], k: &[i64]) -> Option<Vec<Complex64>> {
        let n = self.spec.points();
        let mut out = vec![Complex64::new(0.0, 0.0); ff.len()];
        let mut any = false;
        if self.spec.dim() == 1 {
            for j in self.axis_support(k[0]) {
                let v = ff[j] * self.sigma_axis(k[0], j);
                any |= v.re != 0.0 || v.im != 0.0;
                out[j] = v;
            }
        } else {
            let cols: Vec<(usize, f64)> = self
                .axis_support(k[1])
                .map(|j| (j, self.sigma_axis(k[1], j)))
                .collect();
            for i in self.axis_support(k[0]) {
                let si = self.sigma_axis(k[0], i);
                for &(j, sj) in &cols {
                    let v = ff[i * n + j] * (si * sj);
                    any |= v.re != 0.0 || v.im != 0.0;
                    out[i * n + j] = v;
                }
            }
        }
        any.then_some(out)
    }
}

/// `box_k f = F^{-1}(sigma_k F f)`.
pub fn box_operator(f: &GridFunction, family: &DecompositionFamily, k: &[i64]) -> Result<GridFunction> {
    f.require_domain(Domain::Space)?;
    family.check_spec(f.spec())?;
    family.check_k(k)?;
    let ff = fourier::forward_values(f.spec(), f.values().to_vec());
    Ok(match family.band_spectrum(&ff, k) {
        Some(band) => GridFunction::from_parts(*f.spec(), Domain::Space, fourier::inverse_values(f.spec(), band)),
        None => GridFunction::zeros(*f.spec(), Domain::Space),
    })
}

/// Band norms behind a discrete modulation norm.
#[derive(Clone, Debug, Serialize)]
pub struct DiscreteNormReport {
    pub value: f64,
    pub spectral_tail: f64,
    /// `(k, ||box_k f||_p)` for every band that is not identically zero.
    pub bands: Vec<(Vec<i64>, f64)>,
}

/// `(sum_k <k>^{sq} ||box_k f||_p^q)^{1/q}` over the truncated lattice.
pub fn modulation_norm_discrete(
    f: &GridFunction,
    params: &SpaceParams,
    family: &DecompositionFamily,
) -> Result<f64> {
    Ok(modulation_norm_discrete_report(f, params, family)?.value)
}

pub fn modulation_norm_discrete_report(
    f: &GridFunction,
    params: &SpaceParams,
    family: &DecompositionFamily,
) -> Result<DiscreteNormReport> {
    f.require_domain(Domain::Space)?;
    family.check_spec(f.spec())?;
    let spec = *f.spec();
    let ff = GridFunction::from_parts(spec, Domain::Frequency, fourier::forward_values(&spec, f.values().to_vec()));
    let tail = family.spectral_tail(&ff)?;
    if tail > SPECTRAL_TAIL_LIMIT {
        return Err(Error::SpectralTail {
            fraction: tail,
            limit: SPECTRAL_TAIL_LIMIT,
        });
    }
    let cell = spec.cell(Domain::Space);
    let bands: Vec<(Vec<i64>, f64)> = family
        .lattice()
        .into_par_iter()
        .filter_map(|k| {
            let band = family.band_spectrum(ff.values(), &k)?;
            let space = fourier::inverse_values(&spec, band);
            Some((k, lp_norm_slice(&space, params.p, cell)))
        })
        .collect();
    let weighted = bands.iter().map(|(k, v)| {
        let kf: Vec<f64> = k.iter().map(|&c| c as f64).collect();
        japanese_bracket(&kf, params.s) * v
    });
    let value = if params.q.is_infinite() {
        weighted.fold(0.0, f64::max)
    } else {
        weighted.map(|v| v.powf(params.q)).sum::<f64>().powf(1.0 / params.q)
    };
    Ok(DiscreteNormReport {
        value,
        spectral_tail: tail,
        bands,
    })
}
