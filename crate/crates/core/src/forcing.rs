//! Right-hand side forcing `f(t)`.
//!
//! Three kinds are supported:
//!
//! * `zero`;
//! * `modal`: `f = Σ A_j cos(ω_j t) B_j` over real tensor modes `B_j`;
//! * `manufactured`: the forcing that makes a catalog solution `u*` exact for
//!   the semidiscrete system, `f = u*_t + (σ_disp + σ_reg) u* + N(u*)`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::domain::{Basis, Mode, SpectralField};
use crate::error::{Error, Result};
use crate::io::mms::{manufactured_case, ManufacturedCase};
use crate::operators::{nonlinear_term, LinearSymbol};
use crate::timestepper::phi;
use crate::C64;

/// One modal forcing term `amplitude · cos(omega · t) · B_(k,n,m)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForcingMode {
    pub k: i64,
    pub n: i64,
    #[serde(default)]
    pub m: i64,
    pub amplitude: f64,
    #[serde(default)]
    pub omega: f64,
}

impl ForcingMode {
    pub fn mode(&self) -> Mode {
        Mode::new3(self.k, self.n, self.m)
    }
}

/// Declarative forcing description, as found in a run configuration.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ForcingSpec {
    #[default]
    Zero,
    Modal {
        modes: Vec<ForcingMode>,
    },
    Manufactured {
        case: String,
        #[serde(default = "unit")]
        amplitude: f64,
    },
}

fn unit() -> f64 {
    1.0
}

impl ForcingSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            ForcingSpec::Zero => Ok(()),
            ForcingSpec::Modal { modes } => {
                for (i, m) in modes.iter().enumerate() {
                    if !m.amplitude.is_finite() || !m.omega.is_finite() {
                        return Err(Error::validation(
                            format!("forcing.modes[{i}]"),
                            "amplitude and omega must be finite",
                        ));
                    }
                }
                Ok(())
            }
            ForcingSpec::Manufactured { case, amplitude } => manufactured_case(case, *amplitude).map(|_| ()),
        }
    }
}

#[derive(Clone, Debug)]
enum Kind {
    Zero,
    Modal(Vec<(SpectralField, f64, f64)>),
    Manufactured {
        case: ManufacturedCase,
        sym: Box<LinearSymbol>,
        dealias: bool,
    },
}

/// A forcing bound to a basis, ready to be evaluated in time.
#[derive(Clone, Debug)]
pub struct Forcing {
    basis: Arc<Basis>,
    kind: Kind,
}

impl Forcing {
    /// Binds `spec` to `basis`. The symbol and dealias switch are only used by
    /// manufactured forcing, which must reproduce the solver's operators.
    pub fn new(spec: &ForcingSpec, basis: &Arc<Basis>, sym: &LinearSymbol, dealias: bool) -> Result<Self> {
        spec.validate()?;
        let kind = match spec {
            ForcingSpec::Zero => Kind::Zero,
            ForcingSpec::Modal { modes } => {
                let mut terms = Vec::with_capacity(modes.len());
                for (i, fm) in modes.iter().enumerate() {
                    let shape = SpectralField::from_real_modes(basis, &[(fm.mode(), 1.0)])
                        .map_err(|e| Error::validation(format!("forcing.modes[{i}]"), e.to_string()))?;
                    terms.push((shape, fm.amplitude, fm.omega));
                }
                Kind::Modal(terms)
            }
            ForcingSpec::Manufactured { case, amplitude } => {
                let case = manufactured_case(case, *amplitude)?;
                case.check_domain(basis)?;
                Kind::Manufactured {
                    case,
                    sym: Box::new(sym.clone()),
                    dealias,
                }
            }
        };
        Ok(Forcing {
            basis: Arc::clone(basis),
            kind,
        })
    }

    pub fn zero(basis: &Arc<Basis>) -> Self {
        Forcing {
            basis: Arc::clone(basis),
            kind: Kind::Zero,
        }
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        match &self.kind {
            Kind::Zero => true,
            Kind::Modal(t) => t.iter().all(|(_, a, _)| *a == 0.0),
            Kind::Manufactured { .. } => false,
        }
    }

    /// `f(t)`.
    pub fn at(&self, t: f64) -> Result<SpectralField> {
        match &self.kind {
            Kind::Zero => Ok(SpectralField::zeros(&self.basis)),
            Kind::Modal(terms) => {
                let mut out = SpectralField::zeros(&self.basis);
                for (shape, a, w) in terms {
                    out = out.axpy(a * (w * t).cos(), shape)?;
                }
                Ok(out)
            }
            Kind::Manufactured { case, sym, dealias } => {
                let u = case.field(&self.basis, t, 0)?;
                let ut = case.field(&self.basis, t, 1)?;
                let lin = sym.apply(&u)?;
                let nl = nonlinear_term(&u, *dealias)?;
                ut.sub(&lin)?.add(&nl)
            }
        }
    }

    /// `df/dt (t)`.
    pub fn rate(&self, t: f64) -> Result<SpectralField> {
        match &self.kind {
            Kind::Zero => Ok(SpectralField::zeros(&self.basis)),
            Kind::Modal(terms) => {
                let mut out = SpectralField::zeros(&self.basis);
                for (shape, a, w) in terms {
                    out = out.axpy(-a * w * (w * t).sin(), shape)?;
                }
                Ok(out)
            }
            Kind::Manufactured { case, sym, dealias } => {
                let u = case.field(&self.basis, t, 0)?;
                let ut = case.field(&self.basis, t, 1)?;
                let utt = case.field(&self.basis, t, 2)?;
                let lin = sym.apply(&ut)?;
                // N is quadratic: d/dt N(u) = N(u + u_t) - N(u) - N(u_t).
                let q_sum = nonlinear_term(&u.add(&ut)?, *dealias)?;
                let q_u = nonlinear_term(&u, *dealias)?;
                let q_ut = nonlinear_term(&ut, *dealias)?;
                let dn = q_sum.sub(&q_u)?.sub(&q_ut)?;
                utt.sub(&lin)?.add(&dn)
            }
        }
    }

    /// Manufactured solution `u*(t)`, if this forcing has one.
    pub fn exact(&self, t: f64) -> Option<Result<SpectralField>> {
        match &self.kind {
            Kind::Manufactured { case, .. } => Some(case.field(&self.basis, t, 0)),
            _ => None,
        }
    }

    /// Closed-form x-average at time `t` for an initial field `u0`.
    ///
    /// The `k = 0` slice obeys `∂_t ū = -λ ū + f̄` with `λ = σ_reg(0, n, m)`: the
    /// conservative nonlinearity and the dispersive symbol both vanish there.
    pub fn predicted_x_mean(&self, u0: &SpectralField, t: f64, sym: &LinearSymbol) -> Result<SpectralField> {
        let mut out = u0.x_mean_field();
        let decay = |j: usize, l: usize| sym.regularizing[[0, j, l]];
        let (_, b, c) = self.basis.shape();
        let shift = match &self.kind {
            Kind::Manufactured { case, .. } => Some(case.field(&self.basis, 0.0, 0)?.x_mean_field()),
            _ => None,
        };
        for j in 0..b {
            for l in 0..c {
                let mut v = out.coeffs()[[0, j, l]];
                if let Some(s) = &shift {
                    v -= s.coeffs()[[0, j, l]];
                }
                out.coeffs_mut()[[0, j, l]] = v * (-decay(j, l) * t).exp();
            }
        }
        match &self.kind {
            Kind::Zero => {}
            Kind::Modal(terms) => {
                for (shape, a, w) in terms {
                    for j in 0..b {
                        for l in 0..c {
                            let s = shape.coeffs()[[0, j, l]];
                            if s == C64::new(0.0, 0.0) {
                                continue;
                            }
                            // ∫_0^t e^{-λ(t-s)} cos(ωs) ds = Re[e^{iωt} t φ1(-(λ+iω)t)]
                            let lam = decay(j, l);
                            let z = C64::new(-lam * t, -w * t);
                            let g = (C64::from_polar(1.0, w * t) * phi(1, z) * t).re;
                            out.coeffs_mut()[[0, j, l]] += s * (a * g);
                        }
                    }
                }
            }
            Kind::Manufactured { case, .. } => {
                let now = case.field(&self.basis, t, 0)?.x_mean_field();
                out = out.add(&now)?;
            }
        }
        Ok(out)
    }
}
