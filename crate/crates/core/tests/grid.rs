use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use hausdorff_lab::grid::io::{self, SampleFormat};
use hausdorff_lab::grid::{dilate, fourier_transform, inner_product, inverse_fourier_transform, lp_norm};
use hausdorff_lab::{Domain, GridFunction, GridSpec};
use num_complex::Complex64;
use proptest::prelude::*;

fn spec() -> GridSpec {
    GridSpec::line(1024, 16.0).unwrap()
}

/// `sum_j a_j e^{-pi b_j^2 (x - s_j)^2} e^{2 pi i w_j x}`.
fn mixture(terms: &[(f64, f64, f64, f64)]) -> GridFunction {
    GridFunction::from_fn(spec(), Domain::Space, |x| {
        terms
            .iter()
            .map(|&(a, b, s, w)| Complex64::from_polar(a * (-PI * b * b * (x[0] - s).powi(2)).exp(), 2.0 * PI * w * x[0]))
            .sum()
    })
    .unwrap()
}

/// Closed-form transform of [`mixture`]: each term maps to
/// `(a / b) e^{-pi (xi - w)^2 / b^2} e^{-2 pi i s (xi - w)}`.
fn mixture_hat(terms: &[(f64, f64, f64, f64)]) -> GridFunction {
    GridFunction::from_fn(spec(), Domain::Frequency, |xi| {
        terms
            .iter()
            .map(|&(a, b, s, w)| {
                let d = xi[0] - w;
                Complex64::from_polar(a / b * (-PI * d * d / (b * b)).exp(), -2.0 * PI * s * d)
            })
            .sum()
    })
    .unwrap()
}

fn term() -> impl Strategy<Value = (f64, f64, f64, f64)> {
    (0.1..2.0f64, 0.7..2.0f64, -3.0..3.0f64, -6.0..6.0f64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn transform_matches_closed_form(terms in prop::collection::vec(term(), 1..4)) {
        let f = mixture(&terms);
        let err = fourier_transform(&f).unwrap().sub(&mixture_hat(&terms)).unwrap().max_abs();
        prop_assert!(err < 1e-12, "error {err}");
    }

    #[test]
    fn plancherel_and_round_trip(terms in prop::collection::vec(term(), 1..4)) {
        let f = mixture(&terms);
        let ff = fourier_transform(&f).unwrap();
        let n = lp_norm(&f, 2.0).unwrap();
        prop_assert!((lp_norm(&ff, 2.0).unwrap() - n).abs() <= 1e-12 * n);
        let back = inverse_fourier_transform(&ff).unwrap();
        prop_assert!(back.sub(&f).unwrap().max_abs() <= 1e-13);
    }

    #[test]
    fn dilation_of_gaussian(log_lambda in -1.5..1.5f64) {
        let lambda = 2f64.powf(log_lambda);
        let g = mixture(&[(1.0, 1.0, 0.0, 0.0)]);
        let d = dilate(&g, lambda).unwrap();
        let exact = mixture(&[(1.0, lambda, 0.0, 0.0)]);
        prop_assert!(d.sub(&exact).unwrap().max_abs() < 1e-8);
    }
}

#[test]
fn parseval_pairing() {
    let f = mixture(&[(1.0, 1.0, 0.5, 1.0), (0.5, 1.5, -1.0, -2.0)]);
    let g = mixture(&[(0.7, 1.2, 0.0, 0.5)]);
    let lhs = inner_product(&f, &g).unwrap();
    let rhs = inner_product(&fourier_transform(&f).unwrap(), &fourier_transform(&g).unwrap()).unwrap();
    assert!((lhs - rhs).norm() < 1e-14);
}

#[test]
fn lebesgue_norms_of_indicator() {
    // 1[-1, 1) has |.|_p = 2^{1/p} and sup norm 1.
    let f = GridFunction::from_real_fn(spec(), Domain::Space, |x| if (-1.0..1.0).contains(&x[0]) { 1.0 } else { 0.0 })
        .unwrap();
    for p in [1.0, 2.0, 3.5] {
        assert_abs_diff_eq!(lp_norm(&f, p).unwrap(), 2f64.powf(1.0 / p), epsilon = 1e-12);
    }
    assert_eq!(lp_norm(&f, f64::INFINITY).unwrap(), 1.0);
    assert!(lp_norm(&f, 0.5).is_err());
}

#[test]
fn conventions_of_the_grid() {
    let s = GridSpec::line(4096, 16.0).unwrap();
    assert_eq!(s.step(), 1.0 / 128.0);
    assert_eq!(s.freq_step(), 1.0 / 32.0);
    assert_eq!(s.coordinate(Domain::Space, s.center()), 0.0);
    assert_eq!(s.coordinate(Domain::Frequency, s.center()), 0.0);
    assert!(GridSpec::self_dual(1, 4096).unwrap().is_self_dual());
}

#[test]
fn files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let f = mixture(&[(1.0, 1.0, 0.25, 3.0)]);
    for format in [SampleFormat::Csv, SampleFormat::Binary] {
        let (header, _) = io::write(&f, &dir.path().join("f.json"), format).unwrap();
        assert_eq!(io::read(&header).unwrap(), f);
    }
}
