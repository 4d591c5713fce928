mod common;

use std::f64::consts::PI;

use zk_core::domain::SpectralField;
use zk_core::forcing::{ForcingMode, ForcingSpec};
use zk_core::operators::SolverParams;
use zk_core::timestepper::{run, DiagnosticsConfig};
use zk_core::verifier::*;

use common::*;

#[test]
fn identity_52_matches_quadrature_oracle() {
    let b = dirichlet(32, 16);
    let terms = [(1, 1, 1.0), (-2, 1, 1.0)];
    let u = field(&b, &terms);
    let t = &terms;
    let lhs = integrate(|x, y| eval(t, x, y, 0, 0) * eval(t, x, y, 1, 0) * eval(t, x, y, 4, 0));
    let rhs = integrate(|x, y| 2.5 * eval(t, x, y, 1, 0) * eval(t, x, y, 2, 0).powi(2));
    assert!((lhs - rhs).abs() < 1e-9 * lhs.abs().max(1.0));
    let r = check_52_identity(&u, &Tolerances::default()).unwrap();
    assert!(r.pass, "{r}");
    assert!((r.lhs - lhs).abs() < 1e-9 * lhs.abs().max(1.0), "{} vs {lhs}", r.lhs);
    assert!((r.rhs - rhs).abs() < 1e-9 * rhs.abs().max(1.0), "{} vs {rhs}", r.rhs);
}

#[test]
fn skew_and_neutrality_reports() {
    let b = dirichlet(32, 16);
    let u = field(&b, &[(1, 1, 1.0), (-3, 2, 0.4), (0, 5, 0.2)]);
    assert!(check_skew(&u, 1.0, 1e-12).unwrap().pass);
    assert!(check_nonlinear_neutral(&u, true, 1e-12).unwrap().pass);
    let b = dirichlet(16, 8);
    let v = field(&b, &[(5, 3, 1.0), (-6, 5, 0.7), (7, 7, 0.5), (4, 6, 0.3)]);
    let aliased = check_nonlinear_neutral(&v, false, 1e-12).unwrap();
    assert!(aliased.residual > 1e-8, "{aliased}");
}

#[test]
fn extremal_poincare_mode() {
    let b = dirichlet(32, 16);
    let u = field(&b, &[(-1, 1, 1.0)]);
    let ux = zk_core::operators::diff(&u, zk_core::domain::Axis3::X, 1).unwrap();
    let uxx = zk_core::operators::diff(&u, zk_core::domain::Axis3::X, 2).unwrap();
    assert!((ux.norm() / uxx.norm() - 1.0 / (2.0 * PI)).abs() < 1e-15);
}

#[test]
fn mixed_derivative_ratio_of_cos_cos() {
    let b = dirichlet(32, 16);
    let terms = [(1, 1, 1.0)];
    let u = field(&b, &terms);
    let uxy = integrate(|x, y| eval(&terms, x, y, 1, 1).powi(2));
    let semi = zk_core::functionals::seminorm2(&u).powi(2);
    let w = (2.0 * PI).powi(2);
    assert!((uxy / semi - w / (w * w + 1.0)).abs() < 1e-13);
}

#[test]
fn poincare_sampling_needs_enough_samples() {
    let b = dirichlet(16, 8);
    let tol = Tolerances::default();
    assert!(poincare_sampling(&b, 1, 99, 10, &tol).is_err());
    let (reports, stats) = poincare_sampling(&b, 1, 100, 10, &tol).unwrap();
    assert_eq!(stats.samples, 100);
    assert_eq!(stats.l3_samples, 10);
    assert!(reports.iter().all(|r| r.pass));
    assert!(stats.ratio_x <= 1.0 / (2.0 * PI) + 1e-12);
    assert!(stats.ratio_h2 >= 1.0);
}

#[test]
fn small_static_suite_passes() {
    let b = dirichlet(16, 8);
    let s = static_suite(&b, 1.0, 3, 100, &Tolerances::default()).unwrap();
    assert!(s.all_pass(), "{:#?}", s.reports);
    assert_eq!(s.basis_elements, 16 * 8);
    assert_eq!(s.reports.len(), 9);
}

#[test]
fn trajectory_checks_on_zero_and_empty() {
    let b = dirichlet(16, 8);
    let out = run(&SpectralField::zeros(&b), &SolverParams::new(1e-2, 1.0, 1e-2, 0.1), &DiagnosticsConfig::default()).unwrap();
    let r = &out.records;
    for rep in [
        check_e1_conservation(r, 1e-12).unwrap(),
        check_l2_conservation(r, 1e-12).unwrap(),
        check_l2_balance(r, 1e-12).unwrap(),
        check_gronwall(r).unwrap(),
        check_mean_law(r, 1e-12).unwrap(),
    ] {
        assert!(rep.pass, "{rep}");
        assert_eq!(rep.residual, 0.0);
    }
    assert!(check_l2_balance(&[], 1e-12).is_err());
    assert!(check_gronwall(&[]).is_err());
}

#[test]
fn forced_balance_and_envelope() {
    let b = dirichlet(32, 16);
    let u0 = field(&b, &[(1, 1, 0.1), (-1, 2, 0.05)]);
    let forcing = ForcingSpec::Modal {
        modes: vec![ForcingMode { k: 0, n: 1, m: 0, amplitude: 2.0, omega: 0.0 }],
    };
    let p = SolverParams::new(1e-2, 1.0, 1e-3, 0.2).with_forcing(forcing);
    let out = run(&u0, &p, &DiagnosticsConfig::default()).unwrap();
    assert!(check_l2_balance(&out.records, 1e-6).unwrap().pass);
    assert!(check_gronwall(&out.records).unwrap().pass);
    assert!(check_mean_law(&out.records, 1e-13).unwrap().pass);
}

#[test]
fn sweep_rejects_bad_lists_and_reports_rows() {
    let b = dirichlet(16, 8);
    let u0 = field(&b, &[(1, 1, 0.1)]);
    let eps = geometric_epsilons(1e-2, 3, 0.5);
    assert_eq!(eps, vec![1e-2, 5e-3, 2.5e-3]);
    let mut cfg = SweepConfig {
        u0,
        params: SolverParams::new(0.0, 1.0, 1e-2, 0.1),
        epsilons: vec![1e-2, 1e-2],
        diagnostics: DiagnosticsConfig::default(),
    };
    assert!(run_eps_sweep(&cfg).is_err());
    cfg.epsilons = eps;
    let r = run_eps_sweep(&cfg).unwrap().into_result().unwrap();
    assert_eq!(r.bound_table.len(), 3);
    assert_eq!(r.pairwise_gaps.len(), 2);
    assert!(r.bound_table.iter().all(|row| row.mean_residual < 1e-13));
}

#[test]
fn mms_study_on_linear_case() {
    let b = dirichlet(16, 8);
    let p = SolverParams::new(1e-3, 1.0, 1e-2, 0.2);
    let s = run_mms_study(&b, &p, "linear-k1n1", 1e-8, &[1e-2, 5e-3]).unwrap();
    assert_eq!(s.rows.len(), 2);
    assert!(s.rows.iter().all(|r| r.error <= 1e-12), "{:?}", s.rows);
    assert_eq!(s.truncation_error, 0.0);
    assert!(s.spatial_residual < 1e-13, "{}", s.spatial_residual);
    assert!(run_mms_study(&b, &p, "no-such-case", 1.0, &[1e-2]).is_err());
}

#[test]
fn report_constructors() {
    let r = IdentityReport::equality("x", 1.0, 1.0 + 1e-10, 2.0, 1e-10);
    assert!(r.pass && (r.residual - 5e-11).abs() < 1e-16);
    let r = IdentityReport::bound("y", 2.0, 1.0, 0.5);
    assert!(!r.pass && r.residual == 1.0);
    let w = IdentityReport::worst("z", &[IdentityReport::equality("a", 0.0, 1.0, 1.0, 2.0), r.clone()]).unwrap();
    assert!(!w.pass);
    assert!(IdentityReport::worst("none", &[]).is_none());
}
