use std::f64::consts::PI;

use hausdorff_lab::corpus::{annulus_kernel, corpus, sharp_finite_kernels, DEFAULT_SEED};
use hausdorff_lab::grid::{fourier_transform, InterpolationSpec};
use hausdorff_lab::hausdorff::{
    apply_hausdorff, apply_hausdorff_strided, apply_hausdorff_tilde, verify_adjoint_identity,
    verify_bilinear_bound, verify_fourier_identity, verify_pointwise_bound,
};
use hausdorff_lab::quadrature::QuadratureSpec;
use hausdorff_lab::{Domain, Error, GridFunction, GridSpec, RadialKernel};
use num_complex::Complex64;
use proptest::prelude::*;

fn spec() -> GridSpec {
    GridSpec::line(2048, 16.0).unwrap()
}

fn gaussian(spec: GridSpec) -> GridFunction {
    GridFunction::from_real_fn(spec, Domain::Space, |x| (-PI * x[0] * x[0]).exp()).unwrap()
}

/// Composite Simpson rule, independent of the crate's quadrature.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|i| f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 }).sum();
    (f(a) + f(b) + inner) * h / 3.0
}

#[test]
fn gaussian_under_the_annulus_kernel() {
    // H f(x) = \int Phi(y) f(x / |y|) dy = \int_1^2 e^{-pi x^2 / r^2} dr for (1/2) 1[1,2].
    let s = spec();
    let hf = apply_hausdorff(&annulus_kernel(), &gaussian(s), &QuadratureSpec::default()).unwrap();
    for x in [0.0, 0.3, -0.8, 1.7, 3.0f64] {
        let i = (s.center() as isize + (x / s.step()).round() as isize) as usize;
        let x = s.coordinate(Domain::Space, i);
        let want = simpson(|r| (-PI * x * x / (r * r)).exp(), 1.0, 2.0, 2000);
        assert!((hf.values()[i].re - want).abs() < 1e-9, "x = {x}");
    }
}

#[test]
fn companion_on_a_gaussian() {
    // ~H f(x) = \int Phi(y) |y| f(|y| x) dy = \int_1^2 r e^{-pi r^2 x^2} dr.
    let s = spec();
    let tf = apply_hausdorff_tilde(&annulus_kernel(), &gaussian(s), &QuadratureSpec::default()).unwrap();
    for x in [0.0, 0.25, -0.6, 1.1f64] {
        let i = (s.center() as isize + (x / s.step()).round() as isize) as usize;
        let x = s.coordinate(Domain::Space, i);
        let want = simpson(|r| r * (-PI * r * r * x * x).exp(), 1.0, 2.0, 2000);
        assert!((tf.values()[i].re - want).abs() < 1e-8, "x = {x}");
    }
}

#[test]
fn zero_kernel_and_rejections() {
    let s = spec();
    let q = QuadratureSpec::default();
    assert!(apply_hausdorff(&RadialKernel::zero(1).unwrap(), &gaussian(s), &q).unwrap().is_zero());
    let inadmissible = RadialKernel::power(1, 1.0, -0.5, 1.0, f64::INFINITY).unwrap();
    assert!(matches!(apply_hausdorff(&inadmissible, &gaussian(s), &q), Err(Error::Inadmissible { .. })));
    // A segment starting inside (0, r_min) cannot be integrated.
    let narrow = QuadratureSpec::octaves(0.25, 4.0, 4);
    assert!(matches!(
        apply_hausdorff(&RadialKernel::indicator(1, 1.0, 0.1, 1.0).unwrap(), &gaussian(s), &narrow),
        Err(Error::QuadratureCoverage { .. })
    ));
}

#[test]
fn strided_output_matches_full() {
    let s = spec();
    let f = corpus(DEFAULT_SEED)[5].sample(s);
    let q = QuadratureSpec::default().with_interp(InterpolationSpec { oversample: 1, order: 6 });
    let full = apply_hausdorff(&annulus_kernel(), &f, &q).unwrap();
    let strided = apply_hausdorff_strided(&annulus_kernel(), &f, &q, 4).unwrap();
    for (j, v) in strided.values().iter().enumerate() {
        let i = s.center() as isize + (j as isize - strided.spec().center() as isize) * 4;
        assert!((v - full.values()[i as usize]).norm() < 1e-14);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn operator_is_linear(a in -2.0..2.0f64, b in -2.0..2.0f64, i in 0usize..20, j in 0usize..20) {
        let s = spec();
        let members = corpus(DEFAULT_SEED);
        let (f, g) = (members[i].sample(s), members[j].sample(s));
        let k = &sharp_finite_kernels(1)[2].kernel;
        let q = QuadratureSpec::default();
        let (ca, cb) = (Complex64::new(a, 0.0), Complex64::new(0.0, b));
        let lhs = apply_hausdorff(k, &f.combine(ca, &g, cb).unwrap(), &q).unwrap();
        let rhs = apply_hausdorff(k, &f, &q).unwrap().combine(ca, &apply_hausdorff(k, &g, &q).unwrap(), cb).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn identities_hold_on_the_corpus(i in 0usize..20, k in 0usize..5) {
        let s = GridSpec::line(4096, 16.0).unwrap();
        let members = corpus(DEFAULT_SEED);
        let f = members[i].sample(s);
        let kernel = &sharp_finite_kernels(1)[k].kernel;
        let q = QuadratureSpec::default();
        prop_assert!(verify_fourier_identity(kernel, &f, &q).unwrap().residual <= 1e-6);
        let a = verify_adjoint_identity(kernel, &f, &f, &q).unwrap();
        prop_assert!(!a.is_degenerate(1e-6) && a.residual <= 1e-6);
        prop_assert!(verify_pointwise_bound(kernel, &f, &q).unwrap().max_ratio <= 1.0 + 1e-6);
        let g = members[(i + 1) % 20].sample(s);
        prop_assert!(verify_bilinear_bound(kernel, &f, &g, &q).unwrap().ratio <= 1.0);
    }
}

#[test]
fn intertwining_on_a_gaussian() {
    // F H g = ~H F g, with the transform on the frequency grid.
    let s = GridSpec::line(4096, 16.0).unwrap();
    let g = gaussian(s);
    let q = QuadratureSpec::default();
    let lhs = fourier_transform(&apply_hausdorff(&annulus_kernel(), &g, &q).unwrap()).unwrap();
    let rhs = apply_hausdorff_tilde(&annulus_kernel(), &fourier_transform(&g).unwrap(), &q).unwrap();
    assert!(lhs.sub(&rhs).unwrap().max_abs() < 1e-9);
}
