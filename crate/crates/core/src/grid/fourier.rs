//! Continuous-convention transforms built on a centered FFT.
//!
//! With `x_j = -L + j h` and `xi_k = (k - N/2) / (2L)` the rectangle rule for
//! `\int f(x) e^{-2 pi i x xi} dx` reduces to `h (-1)^k DFT[(-1)^j f_j]_k`
//! once `N` is even, and the inverse to `(2L)^{-1} (-1)^j IDFT[(-1)^k g_k]_j`
//! when `N / 4` is an integer. Both hold exactly for power-of-two grids.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::{Domain, GridFunction, GridSpec};
use crate::error::Result;

#[derive(Clone, Copy)]
enum Direction {
    Forward,
    Inverse,
}

/// `F f(xi) = \int f(x) e^{-2 pi i x . xi} dx`, sampled on the dual grid.
pub fn fourier_transform(f: &GridFunction) -> Result<GridFunction> {
    f.require_domain(Domain::Space)?;
    let values = transform(f.spec(), f.values().to_vec(), Direction::Forward);
    GridFunction::new(*f.spec(), Domain::Frequency, values)
}

/// `F^{-1} g(x) = \int g(xi) e^{2 pi i x . xi} d xi`, sampled on the space grid.
pub fn inverse_fourier_transform(g: &GridFunction) -> Result<GridFunction> {
    g.require_domain(Domain::Frequency)?;
    let values = transform(g.spec(), g.values().to_vec(), Direction::Inverse);
    GridFunction::new(*g.spec(), Domain::Space, values)
}

/// Transform raw samples in place of a fresh buffer; shared by the STFT and
/// the decomposition code, which work with bare sample vectors.
pub(crate) fn forward_values(spec: &GridSpec, values: Vec<Complex64>) -> Vec<Complex64> {
    transform(spec, values, Direction::Forward)
}

pub(crate) fn inverse_values(spec: &GridSpec, values: Vec<Complex64>) -> Vec<Complex64> {
    transform(spec, values, Direction::Inverse)
}

fn transform(spec: &GridSpec, mut values: Vec<Complex64>, dir: Direction) -> Vec<Complex64> {
    let n = spec.points();
    let mut planner = FftPlanner::new();
    let fft: Arc<dyn Fft<f64>> = match dir {
        Direction::Forward => planner.plan_fft_forward(n),
        Direction::Inverse => planner.plan_fft_inverse(n),
    };
    // Per-axis factor: step for the forward map, frequency step for the inverse.
    let scale = match dir {
        Direction::Forward => spec.step(),
        Direction::Inverse => spec.freq_step(),
    };
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];

    for row in values.chunks_exact_mut(n) {
        centered_1d(row, fft.as_ref(), &mut scratch, scale);
    }
    if spec.dim() == 2 {
        let mut column = vec![Complex64::new(0.0, 0.0); n];
        for c in 0..n {
            for (r, slot) in column.iter_mut().enumerate() {
                *slot = values[r * n + c];
            }
            centered_1d(&mut column, fft.as_ref(), &mut scratch, scale);
            for (r, v) in column.iter().enumerate() {
                values[r * n + c] = *v;
            }
        }
    }
    values
}

fn centered_1d(buf: &mut [Complex64], fft: &dyn Fft<f64>, scratch: &mut [Complex64], scale: f64) {
    for v in buf.iter_mut().skip(1).step_by(2) {
        *v = -*v;
    }
    fft.process_with_scratch(buf, scratch);
    for (k, v) in buf.iter_mut().enumerate() {
        *v *= if k % 2 == 0 { scale } else { -scale };
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::lp_norm;
    use std::f64::consts::PI;

    fn gaussian(spec: GridSpec, domain: Domain) -> GridFunction {
        GridFunction::from_real_fn(spec, domain, |x| {
            (-PI * x.iter().map(|t| t * t).sum::<f64>()).exp()
        })
        .unwrap()
    }

    #[test]
    fn zero_maps_to_zero() {
        let s = GridSpec::line(64, 4.0).unwrap();
        let z = GridFunction::zeros(s, Domain::Space);
        assert!(fourier_transform(&z).unwrap().is_zero());
    }

    #[test]
    fn gaussian_is_self_dual_1d() {
        let s = GridSpec::line(4096, 16.0).unwrap();
        let ff = fourier_transform(&gaussian(s, Domain::Space)).unwrap();
        let err = ff
            .values()
            .iter()
            .enumerate()
            .map(|(k, v)| {
                let xi = s.coordinate(Domain::Frequency, k);
                (v - Complex64::new((-PI * xi * xi).exp(), 0.0)).norm()
            })
            .fold(0.0, f64::max);
        assert!(err <= 1e-10, "{err}");
    }

    #[test]
    fn gaussian_is_self_dual_2d() {
        let s = GridSpec::plane(128, 4.0).unwrap();
        let ff = fourier_transform(&gaussian(s, Domain::Space)).unwrap();
        let exact = gaussian(s, Domain::Frequency);
        let err = ff.sub(&exact).unwrap().max_abs();
        assert!(err <= 1e-10, "{err}");
    }

    #[test]
    fn wrong_domain_rejected() {
        let s = GridSpec::line(64, 4.0).unwrap();
        let g = GridFunction::zeros(s, Domain::Frequency);
        assert!(fourier_transform(&g).is_err());
        assert!(inverse_fourier_transform(&g.reinterpret(Domain::Frequency).unwrap()).is_ok());
    }

    #[test]
    fn shifted_gaussian_phase() {
        // F[f(. - a)](xi) = e^{-2 pi i a xi} F f(xi)
        let s = GridSpec::line(2048, 16.0).unwrap();
        let a = 1.25;
        let f = GridFunction::from_real_fn(s, Domain::Space, |x| (-PI * (x[0] - a).powi(2)).exp())
            .unwrap();
        let ff = fourier_transform(&f).unwrap();
        for k in [900, 1024, 1100] {
            let xi = s.coordinate(Domain::Frequency, k);
            let want = Complex64::from_polar((-PI * xi * xi).exp(), -2.0 * PI * a * xi);
            assert!((ff.values()[k] - want).norm() < 1e-12);
        }
        assert!((lp_norm(&ff, 2.0).unwrap() - lp_norm(&f, 2.0).unwrap()).abs() < 1e-12);
    }
}
