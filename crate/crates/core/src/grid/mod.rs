//! Sampled functions on uniform grids in one or two dimensions.
//!
//! A [`GridSpec`] covers `[-L, L)^n` with `N` points per axis. The same spec
//! also fixes the dual frequency grid: step `1 / (2L)`, half-extent
//! `N / (4L)`, with the zero frequency at index `N / 2`. Fourier transforms
//! map between the two and follow the continuous convention
//! `F f(xi) = \int f(x) exp(-2 pi i x . xi) dx`.

pub(crate) mod fourier;
mod interp;
pub mod io;

pub use fourier::{fourier_transform, inverse_fourier_transform};
pub use interp::{dilate, dilate_with_report, DilationReport, InterpolationSpec, Interpolator};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest points-per-axis accepted for two-dimensional grids.
pub const MAX_POINTS_2D: usize = 512;

/// Which side of the Fourier transform a set of samples lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Space,
    Frequency,
}

impl Domain {
    pub fn dual(self) -> Domain {
        match self {
            Domain::Space => Domain::Frequency,
            Domain::Frequency => Domain::Space,
        }
    }
}

/// Uniform grid on `[-L, L)^n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    dim: usize,
    points: usize,
    half_extent: f64,
}

impl GridSpec {
    pub fn new(dim: usize, points: usize, half_extent: f64) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidGrid(format!("dimension must be 1 or 2, got {dim}")));
        }
        if points < 16 || !points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be a power of two >= 16, got {points}"
            )));
        }
        if dim == 2 && points > MAX_POINTS_2D {
            return Err(Error::InvalidGrid(format!(
                "two-dimensional grids are capped at {MAX_POINTS_2D} points per axis, got {points}"
            )));
        }
        if !(half_extent.is_finite() && half_extent > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "half-extent must be positive and finite, got {half_extent}"
            )));
        }
        Ok(Self {
            dim,
            points,
            half_extent,
        })
    }

    pub fn line(points: usize, half_extent: f64) -> Result<Self> {
        Self::new(1, points, half_extent)
    }

    pub fn plane(points: usize, half_extent: f64) -> Result<Self> {
        Self::new(2, points, half_extent)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Samples per axis.
    pub fn points(&self) -> usize {
        self.points
    }

    pub fn half_extent(&self) -> f64 {
        self.half_extent
    }

    /// Total number of samples, `points^dim`.
    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half_extent / self.points as f64
    }

    pub fn freq_step(&self) -> f64 {
        1.0 / (2.0 * self.half_extent)
    }

    pub fn freq_half_extent(&self) -> f64 {
        self.points as f64 / (4.0 * self.half_extent)
    }

    /// Index of the origin along each axis.
    pub fn center(&self) -> usize {
        self.points / 2
    }

    pub fn step_of(&self, domain: Domain) -> f64 {
        match domain {
            Domain::Space => self.step(),
            Domain::Frequency => self.freq_step(),
        }
    }

    /// Volume element of a single sample.
    pub fn cell(&self, domain: Domain) -> f64 {
        self.step_of(domain).powi(self.dim as i32)
    }

    /// Coordinate of axis index `i` on the given side.
    pub fn coordinate(&self, domain: Domain, i: usize) -> f64 {
        (i as f64 - self.center() as f64) * self.step_of(domain)
    }

    /// Coordinates of one axis.
    pub fn axis(&self, domain: Domain) -> Vec<f64> {
        (0..self.points).map(|i| self.coordinate(domain, i)).collect()
    }

    /// True when space and frequency grids coincide (`L^2 = N / 4`).
    pub fn is_self_dual(&self) -> bool {
        (self.step() - self.freq_step()).abs() <= 1e-12 * self.step()
    }

    /// The self-dual grid with `points` samples per axis.
    pub fn self_dual(dim: usize, points: usize) -> Result<Self> {
        Self::new(dim, points, (points as f64).sqrt() / 2.0)
    }

    /// Split a flat index into per-axis indices.
    pub fn unravel(&self, idx: usize) -> [usize; 2] {
        if self.dim == 1 {
            [idx, 0]
        } else {
            [idx / self.points, idx % self.points]
        }
    }

    pub fn ravel(&self, ix: [usize; 2]) -> usize {
        if self.dim == 1 {
            ix[0]
        } else {
            ix[0] * self.points + ix[1]
        }
    }

    /// Coordinates of a flat index; unused axes are zero.
    pub fn point(&self, domain: Domain, idx: usize) -> [f64; 2] {
        let ix = self.unravel(idx);
        let mut out = [0.0; 2];
        for (axis, slot) in out.iter_mut().enumerate().take(self.dim) {
            *slot = self.coordinate(domain, ix[axis]);
        }
        out
    }
}

/// Complex samples of a function on a [`GridSpec`], tagged with their side.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    spec: GridSpec,
    domain: Domain,
    values: Vec<Complex64>,
}

impl GridFunction {
    /// Wrap samples, rejecting wrong lengths and non-finite values.
    pub fn new(spec: GridSpec, domain: Domain, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::SampleCount {
                expected: spec.len(),
                got: values.len(),
            });
        }
        if let Some(index) = values
            .iter()
            .position(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(Error::NonFinite { index });
        }
        Ok(Self {
            spec,
            domain,
            values,
        })
    }

    /// Internal constructor for outputs of finite arithmetic.
    pub(crate) fn from_parts(spec: GridSpec, domain: Domain, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), spec.len());
        Self {
            spec,
            domain,
            values,
        }
    }

    pub fn zeros(spec: GridSpec, domain: Domain) -> Self {
        Self::from_parts(spec, domain, vec![Complex64::new(0.0, 0.0); spec.len()])
    }

    /// Sample `f` at every grid point. The closure receives `dim` coordinates.
    pub fn from_fn<F>(spec: GridSpec, domain: Domain, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Complex64,
    {
        let values = (0..spec.len())
            .map(|idx| {
                let p = spec.point(domain, idx);
                f(&p[..spec.dim()])
            })
            .collect();
        Self::new(spec, domain, values)
    }

    pub fn from_real_fn<F>(spec: GridSpec, domain: Domain, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64,
    {
        Self::from_fn(spec, domain, |x| Complex64::new(f(x), 0.0))
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn cell(&self) -> f64 {
        self.spec.cell(self.domain)
    }

    pub fn point(&self, idx: usize) -> [f64; 2] {
        self.spec.point(self.domain, idx)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.re == 0.0 && v.im == 0.0)
    }

    pub fn scale(&self, c: Complex64) -> Result<Self> {
        Self::new(
            self.spec,
            self.domain,
            self.values.iter().map(|v| v * c).collect(),
        )
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: Complex64, other: &GridFunction, b: Complex64) -> Result<Self> {
        self.check_compatible(other)?;
        Self::new(
            self.spec,
            self.domain,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(u, v)| a * u + b * v)
                .collect(),
        )
    }

    pub fn sub(&self, other: &GridFunction) -> Result<Self> {
        self.combine(Complex64::new(1.0, 0.0), other, Complex64::new(-1.0, 0.0))
    }

    pub fn map<F: Fn(Complex64) -> Complex64>(&self, f: F) -> Result<Self> {
        Self::new(self.spec, self.domain, self.values.iter().map(|&v| f(v)).collect())
    }

    /// Same samples read on the other side. Only meaningful on self-dual grids,
    /// where both sides share coordinates.
    pub fn reinterpret(&self, domain: Domain) -> Result<Self> {
        if domain != self.domain && !self.spec.is_self_dual() {
            return Err(Error::InvalidGrid(
                "reinterpreting samples across domains needs a self-dual grid".into(),
            ));
        }
        Ok(Self::from_parts(self.spec, domain, self.values.clone()))
    }

    pub(crate) fn check_compatible(&self, other: &GridFunction) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::GridMismatch);
        }
        if self.domain != other.domain {
            return Err(Error::DomainMismatch {
                expected: self.domain,
                got: other.domain,
            });
        }
        Ok(())
    }

    pub(crate) fn require_domain(&self, domain: Domain) -> Result<()> {
        if self.domain != domain {
            return Err(Error::DomainMismatch {
                expected: domain,
                got: self.domain,
            });
        }
        Ok(())
    }
}

/// Check an exponent lies in `[1, inf]`.
pub fn check_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "exponent must lie in [1, inf], got {p}"
        )));
    }
    Ok(())
}

/// Riemann-sum `L^p` norm; `p = inf` gives the largest magnitude.
pub fn lp_norm(f: &GridFunction, p: f64) -> Result<f64> {
    check_exponent(p)?;
    Ok(lp_norm_slice(f.values(), p, f.cell()))
}

pub(crate) fn lp_norm_slice(values: &[Complex64], p: f64, cell: f64) -> f64 {
    if p.is_infinite() {
        return values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    }
    if p == 2.0 {
        return (values.iter().map(|v| v.norm_sqr()).sum::<f64>() * cell).sqrt();
    }
    if p == 1.0 {
        return values.iter().map(|v| v.norm()).sum::<f64>() * cell;
    }
    (values.iter().map(|v| v.norm().powf(p)).sum::<f64>() * cell).powf(1.0 / p)
}

/// `<f | g> = \int f conj(g)`.
pub fn inner_product(f: &GridFunction, g: &GridFunction) -> Result<Complex64> {
    f.check_compatible(g)?;
    let sum: Complex64 = f
        .values
        .iter()
        .zip(&g.values)
        .map(|(a, b)| a * b.conj())
        .sum();
    Ok(sum * f.cell())
}

/// `\int f g` without conjugation.
pub fn bilinear_pairing(f: &GridFunction, g: &GridFunction) -> Result<Complex64> {
    f.check_compatible(g)?;
    let sum: Complex64 = f.values.iter().zip(&g.values).map(|(a, b)| a * b).sum();
    Ok(sum * f.cell())
}
