//! Norms, seminorms and energy functionals.
//!
//! Quadratic quantities are evaluated modally (Parseval, exact on the span):
//!
//! ```text
//! |u|²      = Σ w |û|²
//! |∇u|²     = Σ w (ξ² + μ_y² + μ_z²) |û|²
//! [u]₂²     = Σ w (ξ⁴ + μ_y⁴ + μ_z⁴) |û|²          (|u_xx|² + |u_yy|² + |u_zz|²)
//! |u|²_H²   = Σ w (1 + |κ|² + Σ_{|α|=2} κ^{2α}) |û|²
//! [∇u]₂²    = Σ w |κ|² (ξ⁴ + μ_y⁴ + μ_z⁴) |û|²
//! ```
//!
//! Cubic and higher integrals go through physical-space quadrature
//! ([`crate::quadrature`]).

use crate::domain::{Basis, SpectralField};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_polynomial, integrate_refined};

/// Relative stopping tolerance of the refined `|u|³` quadrature.
pub const LP_REFINE_TOL: f64 = 1e-8;

/// Per-slot squared wavenumbers `(ξ², μ_y², μ_z²)`.
fn k2(b: &Basis, i: usize, j: usize, l: usize) -> [f64; 3] {
    [b.xi()[i].powi(2), b.mu(1)[j].powi(2), b.mu(2)[l].powi(2)]
}

/// `Σ w g(κ²) |û|²` for a multiplier `g` of the squared wavenumbers.
pub fn modal_quadratic<G>(u: &SpectralField, g: G) -> f64
where
    G: Fn([f64; 3]) -> f64,
{
    let b = u.basis().clone();
    u.weighted_sum(u, |i, j, l| g(k2(&b, i, j, l)))
}

/// `Σ w g(κ²) Re(conj(û) v̂)`, the bilinear form behind [`modal_quadratic`].
pub fn modal_bilinear<G>(u: &SpectralField, v: &SpectralField, g: G) -> Result<f64>
where
    G: Fn([f64; 3]) -> f64,
{
    u.same_domain(v)?;
    let b = u.basis().clone();
    Ok(u.weighted_sum(v, |i, j, l| g(k2(&b, i, j, l))))
}

pub(crate) fn grad_weight(k: [f64; 3]) -> f64 {
    k[0] + k[1] + k[2]
}

pub(crate) fn semi2_weight(k: [f64; 3]) -> f64 {
    k[0] * k[0] + k[1] * k[1] + k[2] * k[2]
}

pub(crate) fn h2_weight(k: [f64; 3]) -> f64 {
    1.0 + grad_weight(k) + semi2_weight(k) + k[0] * k[1] + k[0] * k[2] + k[1] * k[2]
}

/// `|u|`, the L² norm.
pub fn l2_norm(u: &SpectralField) -> f64 {
    u.norm()
}

/// `|∇u|`.
pub fn grad_l2(u: &SpectralField) -> f64 {
    modal_quadratic(u, grad_weight).sqrt()
}

/// `[u]₂ = (|u_xx|² + |u_yy|² + |u_zz|²)^{1/2}`.
pub fn seminorm2(u: &SpectralField) -> f64 {
    modal_quadratic(u, semi2_weight).sqrt()
}

/// Full H² norm, summing every multi-index of order ≤ 2 once.
pub fn h2_norm(u: &SpectralField) -> f64 {
    modal_quadratic(u, h2_weight).sqrt()
}

/// `[∇u]₂² = Σ_i [∂_i u]₂²`.
pub fn grad_seminorm2_sq(u: &SpectralField) -> f64 {
    modal_quadratic(u, |k| grad_weight(k) * semi2_weight(k))
}

/// `(∫ |u|^p)^{1/p}` for `p ∈ {3, 4, 6}`.
///
/// Even powers are polynomial and integrated exactly; `|u|³` uses refined
/// quadrature (relative stability [`LP_REFINE_TOL`]).
pub fn lp_norm(u: &SpectralField, p: u32) -> Result<f64> {
    let integral = match p {
        3 => integrate_refined(&[u], 3, LP_REFINE_TOL, |v| v[0].abs().powi(3))?,
        4 => integrate_polynomial(&[u], 4, 1, |v| v[0].powi(4))?,
        6 => integrate_polynomial(&[u], 6, 1, |v| v[0].powi(6))?,
        _ => return Err(Error::Argument(format!("unsupported Lp exponent {p} (use 3, 4 or 6)"))),
    };
    Ok(integral.max(0.0).powf(1.0 / p as f64))
}

/// Signed `∫ u³`, exact for band-limited `u`.
pub fn cubic(u: &SpectralField) -> Result<f64> {
    integrate_polynomial(&[u], 3, 1, |v| v[0].powi(3))
}

/// The x-average `ū(x⊥) = ∫_0^1 u dx`, i.e. the `k = 0` slice.
pub fn x_mean(u: &SpectralField) -> SpectralField {
    u.x_mean_field()
}

/// Every norm of one field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormReport {
    pub l2: f64,
    pub grad_l2: f64,
    pub semi2: f64,
    pub l3: f64,
    pub l4: f64,
    pub l6: f64,
    pub h2_full: f64,
}

pub fn norm_report(u: &SpectralField) -> Result<NormReport> {
    Ok(NormReport {
        l2: l2_norm(u),
        grad_l2: grad_l2(u),
        semi2: seminorm2(u),
        l3: lp_norm(u, 3)?,
        l4: lp_norm(u, 4)?,
        l6: lp_norm(u, 6)?,
        h2_full: h2_norm(u),
    })
}

/// `E1 = ½|∇u|² - (1/6)∫u³` together with its initial value `κ0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyReport {
    pub e1: f64,
    pub cubic: f64,
    pub kappa0: f64,
}

fn e1_parts(u: &SpectralField) -> Result<(f64, f64)> {
    let c = cubic(u)?;
    Ok((0.5 * modal_quadratic(u, grad_weight) - c / 6.0, c))
}

/// Energy of `u`, taking `u` itself as the initial state (`κ0 = E1`).
pub fn energy_e1(u: &SpectralField) -> Result<EnergyReport> {
    let (e1, cubic) = e1_parts(u)?;
    Ok(EnergyReport { e1, cubic, kappa0: e1 })
}

/// Energy of `u` with `κ0` taken from the initial field `u0`.
pub fn energy_e1_from(u: &SpectralField, u0: &SpectralField) -> Result<EnergyReport> {
    let (e1, cubic) = e1_parts(u)?;
    let (kappa0, _) = e1_parts(u0)?;
    Ok(EnergyReport { e1, cubic, kappa0 })
}
