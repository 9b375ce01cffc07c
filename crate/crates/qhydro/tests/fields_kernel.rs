use std::f64::consts::PI;

use proptest::prelude::*;
use qhydro::fields::{convolve_periodic, dalembertian, spatial_derivative, spectral_derivative_n};
use qhydro::{DerivMode, Dim, Grid1D, Kernel, Order, ScalarField, SpacetimeField};

fn max_diff(a: &ScalarField, b: &ScalarField) -> f64 {
    a.zip_map(b, |x, y| x - y).max_abs()
}

#[test]
fn grid_rejects_degenerate_shapes() {
    assert!(Grid1D::new(0, 1.0).is_err());
    assert!(Grid1D::new(16, 0.0).is_err());
    assert!(Grid1D::new(16, f64::NAN).is_err());
    let g = Grid1D::new(8, 4.0).unwrap();
    assert_eq!(g.x(0), -2.0);
    assert_eq!(g.dx(), 0.5);
}

#[test]
fn spectral_derivatives_of_a_sine_are_exact() {
    let g = Grid1D::new(64, 2.0 * PI).unwrap();
    let f = ScalarField::from_fn(g, |x| (3.0 * x).sin()).unwrap();
    let d1 = spatial_derivative(&f, Order::First, DerivMode::Spectral).unwrap();
    let d2 = spatial_derivative(&f, Order::Second, DerivMode::Spectral).unwrap();
    let d3 = spectral_derivative_n(&f, 3).unwrap();
    assert!(max_diff(&d1, &ScalarField::from_fn(g, |x| 3.0 * (3.0 * x).cos()).unwrap()) < 1e-12);
    assert!(max_diff(&d2, &ScalarField::from_fn(g, |x| -9.0 * (3.0 * x).sin()).unwrap()) < 1e-11);
    assert!(max_diff(&d3, &ScalarField::from_fn(g, |x| -27.0 * (3.0 * x).cos()).unwrap()) < 1e-10);
}

#[test]
fn fourth_order_stencil_converges_at_rate_four() {
    let err = |n: usize| {
        let g = Grid1D::new(n, 2.0 * PI).unwrap();
        let f = ScalarField::from_fn(g, |x| (2.0 * x).sin()).unwrap();
        let d = spatial_derivative(&f, Order::First, DerivMode::FourthOrder).unwrap();
        max_diff(&d, &ScalarField::from_fn(g, |x| 2.0 * (2.0 * x).cos()).unwrap())
    };
    let rate = (err(32) / err(64)).log2();
    assert!((rate - 4.0).abs() < 0.2, "rate {rate}");
}

#[test]
fn non_finite_input_is_rejected() {
    let g = Grid1D::new(8, 1.0).unwrap();
    let mut v = vec![1.0; 8];
    v[3] = f64::NAN;
    assert!(ScalarField::new(g, v).is_err());
}

#[test]
fn diff_gauss_moments_match_closed_form() {
    // Normalized Gaussians have second moment sigma^2, so m2 = A s1^2 - B s2^2.
    let k = Kernel::diff_gauss(2.0, 1.0, 1.0, 2.0, Dim::One).unwrap();
    assert!((k.moment(0) - 1.0).abs() < 1e-12);
    assert!((k.moment(2) - (2.0 - 4.0)).abs() < 1e-10);
    assert!((qhydro::kernel::kernel_second_moment(&k).unwrap() - 2.0).abs() < 1e-10);

    // In 3D the radial second moment of a normalized Gaussian is 3 sigma^2.
    let k3 = Kernel::diff_gauss(2.0, 1.0, 1.0, 2.0, Dim::Three).unwrap();
    assert!((k3.moment(0) - 1.0).abs() < 1e-10);
    assert!((k3.moment(2) - 3.0 * (2.0 - 4.0)).abs() < 1e-9);
}

#[test]
fn kernel_validation() {
    assert!(Kernel::diff_gauss(2.0, 1.0, 0.5, 2.0, Dim::One).is_err());
    assert!(Kernel::diff_gauss(2.0, -1.0, 1.0, 2.0, Dim::One).is_err());
    // a plain Gaussian has a positive second moment
    let g = Kernel::diff_gauss(1.0, 1.0, 0.0, 1.0, Dim::One).unwrap();
    assert!(qhydro::kernel::kernel_second_moment(&g).is_err());
    // a kernel wider than the box is refused rather than aliased
    let wide = Kernel::diff_gauss(2.0, 1.0, 1.0, 2.0, Dim::One).unwrap();
    let f = ScalarField::constant(Grid1D::new(32, 8.0).unwrap(), 1.0);
    assert!(convolve_periodic(&f, &wide).is_err());
}

#[test]
fn convolution_of_a_cosine_scales_by_the_kernel_transform() {
    let g = Grid1D::new(256, 64.0).unwrap();
    let k = 2.0 * PI * 3.0 / g.length();
    let f = ScalarField::from_fn(g, |x| (k * x).cos()).unwrap();
    let kern = Kernel::diff_gauss(2.0, 1.0, 1.0, 2.0, Dim::One).unwrap();
    let gain = 2.0 * (-0.5 * k * k).exp() - (-0.5 * 4.0 * k * k).exp();
    let out = convolve_periodic(&f, &kern).unwrap();
    assert!(max_diff(&out, &f.map(|v| gain * v)) < 1e-8);
}

#[test]
fn delta_kernel_is_the_identity() {
    let g = Grid1D::new(32, 4.0).unwrap();
    let f = ScalarField::from_fn(g, |x| x.sin() + 0.1 * x).unwrap();
    let out = convolve_periodic(&f, &Kernel::delta(g.dx()).unwrap()).unwrap();
    assert!(max_diff(&out, &f) < 1e-15);
}

#[test]
fn dilation_scales_the_second_moment() {
    let k = Kernel::diff_gauss(2.0, 1.0, 1.0, 2.0, Dim::One).unwrap();
    for s in [0.5, 0.25, 2.0] {
        let d = k.dilate(s).unwrap();
        assert!((d.moment(0) - 1.0).abs() < 1e-10);
        assert!((d.moment(2) - s * s * k.moment(2)).abs() < 1e-9 * s * s);
    }
}

#[test]
fn travelling_wave_is_annihilated_by_the_wave_operator() {
    let g = Grid1D::new(64, 20.0).unwrap();
    let (c, k, dt) = (2.0, 2.0 * PI * 2.0 / 20.0, 1e-3);
    let hist = SpacetimeField::from_fn(g, 0.0, dt, 5, |x, t| (k * (x - c * t)).cos()).unwrap();
    let b = dalembertian(&hist, 2, c).unwrap();
    // second difference in time carries an O((c k dt)^2 / 12) relative error
    assert!(b.max_abs() < 1e-5 * k * k, "{}", b.max_abs());
}

fn trig_poly(g: Grid1D, coeffs: &[(f64, f64)]) -> (ScalarField, ScalarField) {
    let k0 = 2.0 * PI / g.length();
    let f = ScalarField::from_fn(g, |x| {
        coeffs.iter().enumerate().map(|(m, (a, b))| {
            let k = k0 * (m + 1) as f64;
            a * (k * x).cos() + b * (k * x).sin()
        }).sum()
    })
    .unwrap();
    let d = ScalarField::from_fn(g, |x| {
        coeffs.iter().enumerate().map(|(m, (a, b))| {
            let k = k0 * (m + 1) as f64;
            k * (-a * (k * x).sin() + b * (k * x).cos())
        }).sum()
    })
    .unwrap();
    (f, d)
}

proptest! {
    #[test]
    fn spectral_derivative_matches_band_limited_oracle(coeffs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..8)) {
        let g = Grid1D::new(64, 10.0).unwrap();
        let (f, d) = trig_poly(g, &coeffs);
        let num = spatial_derivative(&f, Order::First, DerivMode::Spectral).unwrap();
        prop_assert!(max_diff(&num, &d) < 1e-11);
        // periodic derivatives integrate to zero
        prop_assert!(num.integral().abs() < 1e-11);
    }

    #[test]
    fn normalized_convolution_preserves_the_mean(coeffs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..6), offset in 0.0f64..3.0, s in 0.3f64..1.0) {
        let g = Grid1D::new(128, 40.0).unwrap();
        let (f, _) = trig_poly(g, &coeffs);
        let f = f.map(|v| v + offset);
        let kern = Kernel::diff_gauss(2.0, 1.0, 1.0, 2.0, Dim::One).unwrap().dilate(s).unwrap();
        let out = convolve_periodic(&f, &kern).unwrap();
        prop_assert!((out.mean() - f.mean()).abs() < 1e-12);
    }
}
