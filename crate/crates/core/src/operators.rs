//! Spatial operators of the regularised ZK system as maps on spectral fields.
//!
//! The right-hand side is
//!
//! ```text
//! ∂_t û = -(σ_disp + σ_reg) û - P ∂_x(u²/2) + f̂
//! σ_disp = iξ (c - ξ² - μ_y² - μ_z²)     (Δ∂_x + c∂_x, skew-adjoint)
//! σ_reg  = ε (ξ⁴ + μ_y⁴ + μ_z⁴)           (εL, non-negative)
//! ```
//!
//! where `P` is the L²-orthogonal projection onto the (optionally 2/3-truncated)
//! span. The nonlinearity is formed in conservative form, so its `k = 0`
//! slice is exactly zero.

use std::sync::Arc;

use ndarray::Array3;
use serde::{Deserialize, Serialize};

use crate::domain::{Axis3, AxisKind, Basis, Parity, SpectralField};
use crate::error::{Error, Result};
use crate::forcing::ForcingSpec;
use crate::timestepper::Scheme;
use crate::C64;

/// Modal derivative `∂^order/∂axis^order`, `order ∈ 1..=4`.
///
/// x and periodic transverse directions multiply by `(iκ)^order` (odd orders
/// zero the Nyquist slot). Sine directions map `sin ↔ cos`: odd orders return
/// the field in the companion cosine basis, recorded in [`SpectralField::parity`].
pub fn diff(u: &SpectralField, axis: Axis3, order: u32) -> Result<SpectralField> {
    if !(1..=4).contains(&order) {
        return Err(Error::Argument(format!("derivative order {order} outside 1..=4")));
    }
    let basis = Arc::clone(u.basis());
    basis.check_axis(axis)?;
    let a = axis.index();
    let ax = basis.axis(a);
    let mut out = u.clone();
    match ax.kind() {
        AxisKind::Fourier => {
            let mult: Vec<C64> = (0..ax.len())
                .map(|i| {
                    if ax.is_nyquist(i) && order % 2 == 1 {
                        C64::new(0.0, 0.0)
                    } else {
                        C64::new(0.0, ax.wavenumbers()[i]).powu(order)
                    }
                })
                .collect();
            for ((i, j, l), c) in out.coeffs_mut().indexed_iter_mut() {
                *c *= mult[[i, j, l][a]];
            }
        }
        AxisKind::Sine => {
            let t = a - 1;
            let start = u.parity()[t];
            let p0 = if start == Parity::Standard { 0 } else { 1 };
            let q = (p0 + order) % 4;
            let sign = if q >= 2 { -1.0 } else { 1.0 };
            let mult: Vec<f64> = ax
                .wavenumbers()
                .iter()
                .map(|n| sign * n.powi(order as i32))
                .collect();
            for ((i, j, l), c) in out.coeffs_mut().indexed_iter_mut() {
                *c *= mult[[i, j, l][a]];
            }
            let mut parity = u.parity();
            parity[t] = if q.is_multiple_of(2) { Parity::Standard } else { Parity::Companion };
            out = out.with_parity(parity);
        }
        AxisKind::Trivial => unreachable!("checked by check_axis"),
    }
    Ok(out)
}

/// Physical and numerical parameters of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverParams {
    /// Regularisation strength `ε >= 0`; `0` runs the unregularised equation.
    pub epsilon: f64,
    /// Transport coefficient `c > 0`.
    pub c: f64,
    pub dt: f64,
    pub t_final: f64,
    #[serde(default = "default_true")]
    pub dealias: bool,
    /// Switches the quadratic term off (linear runs).
    #[serde(default = "default_true")]
    pub nonlinear: bool,
    #[serde(default)]
    pub forcing: ForcingSpec,
    #[serde(default)]
    pub scheme: Scheme,
}

fn default_true() -> bool {
    true
}

impl SolverParams {
    pub fn new(epsilon: f64, c: f64, dt: f64, t_final: f64) -> Self {
        SolverParams {
            epsilon,
            c,
            dt,
            t_final,
            dealias: true,
            nonlinear: true,
            forcing: ForcingSpec::Zero,
            scheme: Scheme::default(),
        }
    }

    pub fn with_forcing(mut self, forcing: ForcingSpec) -> Self {
        self.forcing = forcing;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon >= 0.0) || !self.epsilon.is_finite() {
            return Err(Error::validation("epsilon", "epsilon must be ≥ 0"));
        }
        if !(self.c > 0.0) || !self.c.is_finite() {
            return Err(Error::validation("c", "c must be > 0"));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::validation("dt", "dt must be > 0"));
        }
        if !(self.t_final > 0.0) || !self.t_final.is_finite() {
            return Err(Error::validation("t_final", "t_final must be > 0"));
        }
        if self.dt > self.t_final {
            return Err(Error::validation("dt", "dt must not exceed t_final"));
        }
        let steps = self.t_final / self.dt;
        if (steps - steps.round()).abs() > 1e-9 * steps.max(1.0) {
            return Err(Error::validation("dt", "t_final must be an integer multiple of dt"));
        }
        self.forcing.validate()?;
        Ok(())
    }

    /// Number of fixed steps to reach `t_final`.
    pub fn steps(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }
}

/// Per-mode symbols of the linear operators.
#[derive(Clone, Debug)]
pub struct LinearSymbol {
    basis: Arc<Basis>,
    /// `σ_disp(k,n,m) = iξ_k (c - ξ_k² - μ_n² - μ_m²)`, zero on the x-Nyquist slot.
    pub dispersive: Array3<C64>,
    /// `σ_reg(k,n,m) = ε (ξ_k⁴ + μ_n⁴ + μ_m⁴)`.
    pub regularizing: Array3<f64>,
    pub epsilon: f64,
    pub c: f64,
}

/// Builds the symbol tables for `params.epsilon` and `params.c`.
pub fn linear_symbol(basis: &Arc<Basis>, params: &SolverParams) -> LinearSymbol {
    LinearSymbol::new(basis, params.epsilon, params.c)
}

impl LinearSymbol {
    pub fn new(basis: &Arc<Basis>, epsilon: f64, c: f64) -> Self {
        let xi = basis.xi();
        let (m1, m2) = (basis.mu(1), basis.mu(2));
        let xaxis = basis.axis(0);
        let dispersive = Array3::from_shape_fn(basis.shape(), |(i, j, l)| {
            if xaxis.is_nyquist(i) {
                return C64::new(0.0, 0.0);
            }
            let k = xi[i];
            C64::new(0.0, k * (c - k * k - m1[j] * m1[j] - m2[l] * m2[l]))
        });
        let regularizing = Array3::from_shape_fn(basis.shape(), |(i, j, l)| {
            epsilon * (xi[i].powi(4) + m1[j].powi(4) + m2[l].powi(4))
        });
        LinearSymbol {
            basis: Arc::clone(basis),
            dispersive,
            regularizing,
            epsilon,
            c,
        }
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    /// Diagonal linear rate `-(σ_disp + σ_reg)` of every mode.
    pub fn rate(&self) -> Array3<C64> {
        let mut r = self.dispersive.mapv(|s| -s);
        ndarray::Zip::from(&mut r)
            .and(&self.regularizing)
            .for_each(|a, &b| *a -= b);
        r
    }

    /// Applies `-(Δ∂_x + c∂_x) - εL` to a field.
    pub fn apply(&self, u: &SpectralField) -> Result<SpectralField> {
        u.require_standard()?;
        let mut out = u.clone();
        ndarray::Zip::from(out.coeffs_mut())
            .and(&self.dispersive)
            .and(&self.regularizing)
            .for_each(|c, &d, &r| *c *= -d - r);
        Ok(out)
    }

    /// Applies only the dispersive part `(Δ∂_x + c∂_x)`.
    pub fn apply_dispersive(&self, u: &SpectralField) -> Result<SpectralField> {
        u.require_standard()?;
        let mut out = u.clone();
        ndarray::Zip::from(out.coeffs_mut())
            .and(&self.dispersive)
            .for_each(|c, &d| *c *= d);
        Ok(out)
    }

    /// Largest `|σ_disp|` over the table.
    pub fn max_dispersive(&self) -> f64 {
        self.dispersive.iter().map(|s| s.norm()).fold(0.0, f64::max)
    }
}

/// Galerkin projection of `u u_x = ∂_x(u²/2)` onto the basis.
///
/// With `dealias` the input and the output are truncated to the 2/3 span; the
/// product is then alias-free and `⟨N(u), u⟩ = 0` up to roundoff.
pub fn nonlinear_term(u: &SpectralField, dealias: bool) -> Result<SpectralField> {
    u.require_standard()?;
    let basis = Arc::clone(u.basis());
    let input = if dealias { u.dealiased() } else { u.clone() };
    let grid = basis.product_grid(dealias);
    let mut vals = grid.synthesize(input.coeffs(), [Parity::Standard; 2]);
    vals.mapv_inplace(|v| C64::new(0.5 * v.re * v.re, 0.0));
    let (a, b, c) = basis.shape();
    let mut coeffs = grid.project(&vals, [a, b, c]);
    let xaxis = basis.axis(0);
    let xi = basis.xi();
    for ((i, j, l), v) in coeffs.indexed_iter_mut() {
        if xaxis.is_nyquist(i) || (dealias && !basis.keeps(i, j, l)) {
            *v = C64::new(0.0, 0.0);
        } else {
            *v *= C64::new(0.0, xi[i]);
        }
    }
    SpectralField::from_coeffs(&basis, coeffs)
}

/// Time derivative `-(σ_disp + σ_reg) û - N(û) + f̂`.
pub fn rhs(u: &SpectralField, f: &SpectralField, sym: &LinearSymbol, dealias: bool) -> Result<SpectralField> {
    u.same_domain(f)?;
    if !Arc::ptr_eq(u.basis(), sym.basis()) && u.basis().spec() != sym.basis().spec() {
        return Err(Error::DomainMismatch);
    }
    let lin = sym.apply(u)?;
    let nl = nonlinear_term(u, dealias)?;
    lin.sub(&nl)?.add(f)
}
