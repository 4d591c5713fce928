//! Physical-space quadrature of nonlinear integrands.
//!
//! A polynomial integrand of degree `p` in band-limited fields is itself band
//! limited, so it is integrated exactly on a grid sized for `p`-fold products
//! (see [`Basis::quadrature_grid`]). Non-polynomial integrands such as `|u|³`
//! are refined by doubling until the result is stable.

use ndarray::Array3;

use crate::domain::{Basis, SpectralField};
use crate::error::{Error, Result};
use crate::C64;

fn joint_bandwidth(fields: &[&SpectralField]) -> [usize; 3] {
    let mut band = [0usize; 3];
    for f in fields {
        let b = f.bandwidth();
        for a in 0..3 {
            band[a] = band[a].max(b[a]);
        }
    }
    // Sine labels start at 1; keep at least one mode per axis.
    band.map(|b| b.max(1))
}

fn check_same(fields: &[&SpectralField]) -> Result<()> {
    let first = fields
        .first()
        .ok_or_else(|| Error::Argument("quadrature needs at least one field".to_string()))?;
    for f in &fields[1..] {
        first.same_domain(f)?;
    }
    Ok(())
}

fn integrate_on<F>(basis: &Basis, fields: &[&SpectralField], degree: usize, oversample: usize, g: &F) -> f64
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let grid = basis.quadrature_grid(degree, joint_bandwidth(fields), oversample);
    let values: Vec<Array3<f64>> = fields
        .iter()
        .map(|f| grid.synthesize(f.coeffs(), f.parity()).mapv(|v| v.re))
        .collect();
    let shape = values[0].dim();
    let mut buf = vec![0.0; fields.len()];
    let integrand = Array3::from_shape_fn(shape, |(i, j, l)| {
        for (b, v) in buf.iter_mut().zip(&values) {
            *b = v[[i, j, l]];
        }
        C64::new(g(&buf), 0.0)
    });
    grid.integrate(&integrand).re
}

/// Exact integral over the box of `g(u_1, …, u_n)` where `g` is a polynomial of
/// total degree at most `degree` in the sampled field values.
///
/// `oversample` multiplies the grid size; `1` is already exact, larger values
/// serve as an independent oracle.
pub fn integrate_polynomial<F>(fields: &[&SpectralField], degree: usize, oversample: usize, g: F) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    check_same(fields)?;
    if degree == 0 || oversample == 0 {
        return Err(Error::Argument("degree and oversample must be positive".to_string()));
    }
    Ok(integrate_on(fields[0].basis(), fields, degree, oversample, &g))
}

/// Integral of a non-polynomial integrand, refining the grid by doubling until
/// the relative change drops below `rel_tol`.
///
/// `degree` sets the starting grid. Fails if 5 doublings do not converge.
pub fn integrate_refined<F>(fields: &[&SpectralField], degree: usize, rel_tol: f64, g: F) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    check_same(fields)?;
    let basis = fields[0].basis();
    let mut prev = integrate_on(basis, fields, degree, 1, &g);
    let mut over = 2;
    for _ in 0..5 {
        let next = integrate_on(basis, fields, degree, over, &g);
        if (next - prev).abs() <= rel_tol * next.abs().max(f64::MIN_POSITIVE) {
            return Ok(next);
        }
        prev = next;
        over *= 2;
    }
    Err(Error::Argument(format!(
        "quadrature did not reach relative tolerance {rel_tol:e}"
    )))
}
