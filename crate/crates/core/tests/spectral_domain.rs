mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use zk_core::domain::{
    boundary_trace, build_domain, forward_transform, inverse_transform, DomainSpec, Face, Mode, PhysicalField,
    SpectralField, TransverseBc,
};

use common::*;

#[test]
fn small_dirichlet_wavenumbers() {
    let b = dirichlet(8, 8);
    let mut xi = b.xi().to_vec();
    xi.sort_by(f64::total_cmp);
    let tp = 2.0 * PI;
    let expected = [-3.0 * tp, -2.0 * tp, -tp, 0.0, tp, 2.0 * tp, 3.0 * tp, 4.0 * tp];
    for (a, e) in xi.iter().zip(expected) {
        assert_abs_diff_eq!(*a, e, epsilon = 1e-12);
    }
    assert_eq!(b.mu(1), &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]);
}

#[test]
fn three_dimensional_shape_and_bad_dimension() {
    let b = build_domain(DomainSpec::new_3d(16, 8, 8, TransverseBc::Dirichlet)).unwrap();
    assert_eq!(b.shape(), (16, 8, 8));
    let mut spec = DomainSpec::new_3d(16, 8, 8, TransverseBc::Dirichlet);
    spec.d = 3;
    let e = build_domain(spec).unwrap_err();
    assert!(e.to_string().contains("d out of range"), "{e}");
}

#[test]
fn forward_transform_of_cos_cos_matches_projection_integrals() {
    let b = dirichlet(16, 12);
    let g = |x: f64, y: f64| (2.0 * PI * x).cos() * y.cos();
    let u = forward_transform(&PhysicalField::from_fn(&b, |x, y, _| g(x, y)));
    // Oracle: every real-mode amplitude by direct quadrature.
    let mut terms = Vec::new();
    for k in -7i64..=7 {
        for n in 1..=12 {
            let a = amplitude(&g, k, n);
            if a.abs() > 1e-13 {
                terms.push((k, n, a));
            }
        }
    }
    assert_eq!(terms.len(), 1);
    assert_eq!((terms[0].0, terms[0].1), (1, 1));
    let expected = field(&b, &terms);
    let diff = u.sub(&expected).unwrap().max_abs();
    assert!(diff < 1e-14, "{diff}");
}

#[test]
fn inverse_transform_samples_the_basis() {
    let b = dirichlet(16, 12);
    let u = field(&b, &[(1, 1, 1.0)]);
    let p = inverse_transform(&u);
    let xs = b.nodes(zk_core::domain::Axis3::X);
    let ys = b.nodes(zk_core::domain::Axis3::Y);
    for (i, x) in xs.iter().enumerate() {
        for (j, y) in ys.iter().enumerate() {
            assert_abs_diff_eq!(p.values()[[i, j, 0]], (2.0 * PI * x).cos() * y.cos(), epsilon = 1e-14);
        }
    }
    assert_eq!(inverse_transform(&SpectralField::zeros(&b)).max_abs(), 0.0);
    assert_eq!(forward_transform(&PhysicalField::from_fn(&b, |_, _, _| 0.0)).max_abs(), 0.0);
}

#[test]
fn dealias_keeps_low_modes_and_drops_nyquist() {
    let b = dirichlet(16, 12);
    let u = field(&b, &[(1, 1, 1.0)]);
    assert_eq!(u.dealiased().sub(&u).unwrap().max_abs(), 0.0);
    let ny = field(&b, &[(8, 1, 1.0)]);
    assert_eq!(ny.dealiased().max_abs(), 0.0);
}

#[test]
fn traces_of_cos_cos() {
    let b = dirichlet(16, 12);
    let u = field(&b, &[(1, 1, 1.0)]);
    assert!(boundary_trace(&u, Face::YPlus, 0).unwrap().iter().all(|v| v.abs() < 1e-14));
    assert!(boundary_trace(&u, Face::YPlus, 2).unwrap().iter().all(|v| v.abs() < 1e-13));
    let t0 = boundary_trace(&u, Face::X0, 1).unwrap();
    let t1 = boundary_trace(&u, Face::X1, 1).unwrap();
    for (a, c) in t0.iter().zip(t1.iter()) {
        assert!(a.abs() < 1e-12 && (a - c).abs() < 1e-12);
    }
    // u_y on y = -π/2 is sin(π/2) cos(2πx) times -(-1).
    let ty = boundary_trace(&u, Face::YMinus, 1).unwrap();
    let xs = b.nodes(zk_core::domain::Axis3::X);
    for (i, x) in xs.iter().enumerate() {
        assert_abs_diff_eq!(ty[[i, 0]], -(2.0 * PI * x).cos() * (-FRAC_PI_2).sin(), epsilon = 1e-12);
    }
}

#[test]
fn periodic_transverse_round_trip() {
    let b = periodic(16, 8);
    let p = PhysicalField::from_fn(&b, |x, y, _| (2.0 * PI * x).sin() * (2.0 * y).cos() + 0.5);
    let back = inverse_transform(&forward_transform(&p));
    let err = (back.values() - p.values()).iter().fold(0.0f64, |m, v| m.max(v.abs()));
    assert!(err < 1e-13);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn round_trip_and_parseval(terms in terms_strategy(8)) {
        let b = dirichlet(64, 32);
        let u = field(&b, &terms);
        let p = inverse_transform(&u);
        let back = forward_transform(&p);
        prop_assert!(back.sub(&u).unwrap().max_abs() < 1e-12);
        let (grid, modal) = (p.grid_norm_sq(), u.norm_sq());
        prop_assert!((grid - modal).abs() <= 1e-12 * modal.max(1e-300));
    }

    #[test]
    fn modal_norm_matches_oracle(terms in terms_strategy(4)) {
        let b = dirichlet(64, 32);
        let u = field(&b, &terms);
        let oracle = integrate(|x, y| eval(&terms, x, y, 0, 0).powi(2));
        prop_assert!((u.norm_sq() - oracle).abs() <= 1e-11 * oracle.max(1.0));
    }

    #[test]
    fn dealias_never_increases_norm(terms in terms_strategy(8)) {
        let b = dirichlet(64, 32);
        let u = field(&b, &terms);
        prop_assert!(u.dealiased().norm() <= u.norm() * (1.0 + 1e-15));
    }

    #[test]
    fn mode_builder_is_linear(terms in terms_strategy(6), s in -3.0f64..3.0) {
        let b = dirichlet(64, 32);
        let u = field(&b, &terms);
        let scaled: Vec<(Mode, f64)> = terms.iter().map(|&(k, n, a)| (Mode::new(k, n), s * a)).collect();
        let v = SpectralField::from_real_modes(&b, &scaled).unwrap();
        prop_assert!(v.sub(&u.scaled(s)).unwrap().max_abs() < 1e-14);
    }
}
