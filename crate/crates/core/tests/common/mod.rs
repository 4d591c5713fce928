//! Independent oracles for the integration tests: closed-form evaluation of
//! real tensor modes and composite Gauss–Legendre quadrature on the box.
//! Nothing here calls the library's transforms or quadrature.

#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use proptest::prelude::*;
use zk_core::domain::{build_domain, Basis, DomainSpec, Mode, SpectralField, TransverseBc};

pub type Terms = Vec<(i64, i64, f64)>;

/// Real x factor: `cos(2πkx)` for `k ≥ 0`, `sin(2π|k|x)` for `k < 0`.
pub fn bx(k: i64, x: f64, order: u32) -> f64 {
    let w = 2.0 * PI * k.unsigned_abs() as f64;
    let phase = if k >= 0 { 0.0 } else { -FRAC_PI_2 };
    w.powi(order as i32) * (w * x + phase + order as f64 * FRAC_PI_2).cos()
}

/// Dirichlet transverse factor `sin(n(y + π/2))`.
pub fn by(n: i64, y: f64, order: u32) -> f64 {
    let w = n as f64;
    w.powi(order as i32) * (w * (y + FRAC_PI_2) + order as f64 * FRAC_PI_2).sin()
}

/// `∂_x^ox ∂_y^oy` of `Σ a B_(k,n)` at `(x, y)`.
pub fn eval(terms: &[(i64, i64, f64)], x: f64, y: f64, ox: u32, oy: u32) -> f64 {
    terms.iter().map(|&(k, n, a)| a * bx(k, x, ox) * by(n, y, oy)).sum()
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` (Newton on `P_n`).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                let dp = {
                    let (mut p0, mut p1) = (1.0, x);
                    for j in 2..=n {
                        let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                        p0 = p1;
                        p1 = p2;
                    }
                    n as f64 * (x * p1 - p0) / (x * x - 1.0)
                };
                ws[i] = 2.0 / ((1.0 - x * x) * dp * dp);
                break;
            }
        }
        xs[i] = x;
    }
    (xs, ws)
}

/// Composite Gauss–Legendre rule on `[a, b]`.
pub fn rule(a: f64, b: f64, panels: usize, order: usize) -> Vec<(f64, f64)> {
    let (xs, ws) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for (x, w) in xs.iter().zip(&ws) {
            out.push((mid + 0.5 * h * x, 0.5 * h * w));
        }
    }
    out
}

/// `∫_0^1 ∫_{-π/2}^{π/2} g(x, y) dy dx` to near machine precision for smooth
/// trigonometric integrands of moderate degree.
pub fn integrate(g: impl Fn(f64, f64) -> f64) -> f64 {
    let rx = rule(0.0, 1.0, 16, 24);
    let ry = rule(-FRAC_PI_2, FRAC_PI_2, 16, 24);
    let mut s = 0.0;
    for &(x, wx) in &rx {
        for &(y, wy) in &ry {
            s += wx * wy * g(x, y);
        }
    }
    s
}

/// Real-mode amplitude `∫ g B / ∫ B²` of `g` along `B_(k,n)`.
pub fn amplitude(g: &impl Fn(f64, f64) -> f64, k: i64, n: i64) -> f64 {
    let norm = if k == 0 { 1.0 } else { 0.5 } * FRAC_PI_2;
    integrate(|x, y| g(x, y) * bx(k, x, 0) * by(n, y, 0)) / norm
}

/// Field built through the library's real-mode constructor.
pub fn field(b: &Arc<Basis>, terms: &[(i64, i64, f64)]) -> SpectralField {
    let modes: Vec<(Mode, f64)> = terms.iter().map(|&(k, n, a)| (Mode::new(k, n), a)).collect();
    SpectralField::from_real_modes(b, &modes).unwrap()
}

pub fn dirichlet(nx: usize, nt: usize) -> Arc<Basis> {
    build_domain(DomainSpec::new_2d(nx, nt, TransverseBc::Dirichlet)).unwrap()
}

pub fn periodic(nx: usize, nt: usize) -> Arc<Basis> {
    build_domain(DomainSpec::new_2d(nx, nt, TransverseBc::Periodic)).unwrap()
}

/// Mode lists representable (and below the Nyquist slot) on a 64 × 32 box.
pub fn terms_strategy(max_terms: usize) -> impl Strategy<Value = Terms> {
    prop::collection::vec((-31i64..=31, 1i64..=32, -1.0f64..1.0), 1..=max_terms)
}
