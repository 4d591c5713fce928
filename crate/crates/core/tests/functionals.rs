mod common;

use proptest::prelude::*;
use zk_core::functionals::{cubic, energy_e1, grad_l2, h2_norm, lp_norm, seminorm2, x_mean};

use common::*;

const TERMS: [(i64, i64, f64); 4] = [(1, 1, 0.5), (-2, 1, 0.3), (1, 2, 0.2), (0, 2, 0.1)];

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

#[test]
fn quadratic_norms_match_quadrature() {
    let b = dirichlet(32, 16);
    let u = field(&b, &TERMS);
    let t = &TERMS;
    let grad = integrate(|x, y| eval(t, x, y, 1, 0).powi(2) + eval(t, x, y, 0, 1).powi(2));
    let semi = integrate(|x, y| eval(t, x, y, 2, 0).powi(2) + eval(t, x, y, 0, 2).powi(2));
    // Full H²: each multi-index of order ≤ 2 counted once.
    let h2 = integrate(|x, y| {
        let d = |a, c| eval(t, x, y, a, c).powi(2);
        d(0, 0) + d(1, 0) + d(0, 1) + d(2, 0) + d(1, 1) + d(0, 2)
    });
    assert!(rel(grad_l2(&u).powi(2), grad) < 1e-12);
    assert!(rel(seminorm2(&u).powi(2), semi) < 1e-12);
    assert!(rel(h2_norm(&u).powi(2), h2) < 1e-12);
}

#[test]
fn cubic_and_lp_match_quadrature() {
    let b = dirichlet(32, 16);
    let u = field(&b, &TERMS);
    let t = &TERMS;
    let c3 = integrate(|x, y| eval(t, x, y, 0, 0).powi(3));
    assert!((cubic(&u).unwrap() - c3).abs() < 1e-13);
    for p in [4u32, 6] {
        let oracle = integrate(|x, y| eval(t, x, y, 0, 0).powi(p as i32)).powf(1.0 / p as f64);
        assert!(rel(lp_norm(&u, p).unwrap(), oracle) < 1e-12, "p = {p}");
    }
    // |u|³ has kinks on the zero set; the oracle uses a finer rule.
    let fine = {
        let rx = rule(0.0, 1.0, 64, 16);
        let ry = rule(-std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2, 64, 16);
        let mut s = 0.0;
        for &(x, wx) in &rx {
            for &(y, wy) in &ry {
                s += wx * wy * eval(t, x, y, 0, 0).abs().powi(3);
            }
        }
        s.cbrt()
    };
    assert!(rel(lp_norm(&u, 3).unwrap(), fine) < 1e-6);
    assert!(lp_norm(&u, 5).is_err());
}

#[test]
fn energy_of_known_field() {
    let b = dirichlet(32, 16);
    let u = field(&b, &TERMS);
    let t = &TERMS;
    let grad = integrate(|x, y| eval(t, x, y, 1, 0).powi(2) + eval(t, x, y, 0, 1).powi(2));
    let c3 = integrate(|x, y| eval(t, x, y, 0, 0).powi(3));
    let e = energy_e1(&u).unwrap();
    assert!((e.e1 - (0.5 * grad - c3 / 6.0)).abs() < 1e-12 * grad);
    assert_eq!(e.e1, e.kappa0);
}

#[test]
fn x_mean_of_known_field() {
    let b = dirichlet(32, 16);
    let u = field(&b, &TERMS);
    let m = x_mean(&u);
    let expected = field(&b, &[(0, 2, 0.1)]);
    assert!(m.sub(&expected).unwrap().max_abs() < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn lp_norms_are_homogeneous(terms in prop::collection::vec((-10i64..=10, 1i64..=10, -1.0f64..1.0), 1..=4), s in -4.0f64..4.0) {
        prop_assume!(s.abs() > 1e-3);
        let b = dirichlet(32, 16);
        let u = field(&b, &terms);
        for p in [4u32, 6] {
            let a = lp_norm(&u, p).unwrap();
            let c = lp_norm(&u.scaled(s), p).unwrap();
            prop_assert!((c - s.abs() * a).abs() <= 1e-12 * s.abs() * a.max(1e-300));
        }
    }

    #[test]
    fn x_mean_is_linear(t1 in terms_strategy(5), t2 in terms_strategy(5), a in -2.0f64..2.0) {
        let b = dirichlet(64, 32);
        let (u, v) = (field(&b, &t1), field(&b, &t2));
        let lhs = x_mean(&u.axpy(a, &v).unwrap());
        let rhs = x_mean(&u).axpy(a, &x_mean(&v)).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn norm_ordering(terms in terms_strategy(6)) {
        let b = dirichlet(64, 32);
        let u = field(&b, &terms);
        prop_assert!(h2_norm(&u) >= grad_l2(&u));
        prop_assert!(h2_norm(&u) >= seminorm2(&u));
        prop_assert!(h2_norm(&u) >= u.norm());
    }
}
