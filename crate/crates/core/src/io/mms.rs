//! Catalog of manufactured solutions.
//!
//! Every entry is a finite sum `u*(t) = Σ a_j(t) B_j` of real tensor modes
//! (see [`SpectralField::from_real_modes`]) with closed-form time profiles
//! `a_j(t) = mean + amp · cos(ω t + phase)`. The matching forcing is assembled
//! in [`crate::forcing`] with the same projected nonlinearity the solver uses,
//! so `u*` solves the semidiscrete system exactly.

use std::sync::Arc;

use crate::domain::{Basis, Mode, SpectralField};
use crate::error::{Error, Result};

/// `a(t) = mean + amp · cos(ω t + phase)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Profile {
    pub mean: f64,
    pub amp: f64,
    pub omega: f64,
    pub phase: f64,
}

impl Profile {
    pub const fn constant(value: f64) -> Self {
        Profile {
            mean: value,
            amp: 0.0,
            omega: 0.0,
            phase: 0.0,
        }
    }

    pub const fn harmonic(mean: f64, amp: f64, omega: f64, phase: f64) -> Self {
        Profile { mean, amp, omega, phase }
    }

    /// `d^order a / dt^order` at `t`.
    pub fn eval(&self, t: f64, order: u32) -> f64 {
        let theta = self.omega * t + self.phase;
        let osc = self.amp * self.omega.powi(order as i32) * (theta + order as f64 * std::f64::consts::FRAC_PI_2).cos();
        if order == 0 {
            self.mean + osc
        } else {
            osc
        }
    }
}

/// A manufactured solution `u*(t) = scale · Σ a_j(t) B_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct ManufacturedCase {
    pub id: String,
    pub terms: Vec<(Mode, Profile)>,
    pub scale: f64,
}

/// Identifiers accepted by [`manufactured_case`].
pub const CATALOG: [&str; 3] = ["linear-k1n1", "steady", "nonlinear-moderate"];

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Looks up a catalog entry; `scale` multiplies every amplitude.
///
/// * `linear-k1n1`: `cos(2πt) · cos(2πx) sin(y + π/2)`; use a tiny scale to make
///   the forcing effectively linear.
/// * `steady`: time-independent, so the forcing is constant and `u*` a fixed point.
/// * `nonlinear-moderate`: two `k = ±1` modes with O(0.1) amplitudes and a
///   mean offset; the quadratic term is active throughout and feeds the
///   `k = 0, ±2` modes, which the forcing cancels.
///
/// All entries have a vanishing x-average.
pub fn manufactured_case(id: &str, scale: f64) -> Result<ManufacturedCase> {
    if !scale.is_finite() {
        return Err(Error::validation("forcing.amplitude", "amplitude must be finite"));
    }
    let terms = match id {
        "linear-k1n1" => vec![(Mode::new(1, 1), Profile::harmonic(0.0, 1.0, TWO_PI, 0.0))],
        "steady" => vec![
            (Mode::new(1, 1), Profile::constant(1.0)),
            (Mode::new(-2, 1), Profile::constant(0.3)),
            (Mode::new(1, 2), Profile::constant(-0.2)),
        ],
        "nonlinear-moderate" => vec![
            (Mode::new(1, 1), Profile::harmonic(0.3, 0.2, TWO_PI, 0.0)),
            (Mode::new(-1, 2), Profile::harmonic(0.0, 0.25, TWO_PI, 0.5)),
        ],
        other => {
            return Err(Error::validation(
                "forcing.case",
                format!("unknown manufactured case \"{other}\" (known: {})", CATALOG.join(", ")),
            ))
        }
    };
    Ok(ManufacturedCase {
        id: id.to_string(),
        terms,
        scale,
    })
}

impl ManufacturedCase {
    /// `d^order u* / dt^order` at `t`.
    pub fn field(&self, basis: &Arc<Basis>, t: f64, order: u32) -> Result<SpectralField> {
        let modes: Vec<(Mode, f64)> = self
            .terms
            .iter()
            .map(|(m, p)| (*m, self.scale * p.eval(t, order)))
            .collect();
        SpectralField::from_real_modes(basis, &modes)
    }

    /// Rejects domains that cannot represent every term.
    pub fn check_domain(&self, basis: &Arc<Basis>) -> Result<()> {
        self.field(basis, 0.0, 0).map(|_| ()).map_err(|e| {
            Error::validation("forcing.case", format!("case {} not representable: {e}", self.id))
        })
    }

    /// `true` when no profile depends on time.
    pub fn is_steady(&self) -> bool {
        self.terms.iter().all(|(_, p)| p.amp == 0.0 || p.omega == 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_derivatives_match_finite_differences() {
        let p = Profile::harmonic(0.3, 0.7, 5.0, 0.4);
        let h = 1e-5;
        for order in 0..3 {
            let fd = (p.eval(0.2 + h, order) - p.eval(0.2 - h, order)) / (2.0 * h);
            assert!((fd - p.eval(0.2, order + 1)).abs() < 1e-6 * (1.0 + fd.abs()));
        }
        assert_eq!(Profile::constant(2.0).eval(1.0, 0), 2.0);
        assert_eq!(Profile::constant(2.0).eval(1.0, 1), 0.0);
    }

    #[test]
    fn unknown_case_is_rejected() {
        let e = manufactured_case("nope", 1.0).unwrap_err();
        assert!(e.to_string().contains("unknown manufactured case"));
        for id in CATALOG {
            assert!(manufactured_case(id, 1.0).is_ok());
        }
        assert!(manufactured_case("steady", 1.0).unwrap().is_steady());
        assert!(!manufactured_case("nonlinear-moderate", 1.0).unwrap().is_steady());
    }
}
