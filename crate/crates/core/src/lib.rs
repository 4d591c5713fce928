//! Pseudo-spectral solver for the Zakharov-Kuznetsov equation
//!
//! ```text
//! u_t + Δu_x + c u_x + u u_x + ε (∂⁴_x + ∂⁴_y + ∂⁴_z) u = f
//! ```
//!
//! on the box `(0,1) × (-π/2, π/2)^d`, `d ∈ {1, 2}`, periodic in `x` and either
//! Dirichlet (`u = u_yy = 0` on the walls) or periodic in the transverse
//! directions. Fields live in a Fourier (x) × sine/Fourier (transverse) tensor
//! basis; the quadratic nonlinearity is Galerkin-projected, so the discrete
//! system inherits the continuous energy laws exactly and the [`verifier`]
//! can certify them numerically.
//!
//! Module map:
//!
//! * [`domain`]: domain description, modal basis, physical/spectral transforms.
//! * [`operators`]: derivatives, linear symbol, dealiased nonlinearity, right-hand side.
//! * [`functionals`]: norms, seminorms, energies, x-averages.
//! * [`timestepper`]: fourth-order exponential Runge-Kutta integration and diagnostics.
//! * [`verifier`]: identity and inequality checks, ε-sweeps.
//! * [`io`]: configuration, snapshots, diagnostics CSV, manufactured solutions.

// `!(x > 0.0)` style guards are meant to reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod domain;
pub mod error;
pub mod forcing;
pub mod functionals;
pub mod io;
pub mod operators;
pub mod par;
pub mod quadrature;
pub mod random;
pub mod timestepper;
pub mod verifier;

pub use domain::{
    build_domain, forward_transform, inverse_transform, Axis3, Basis, DomainSpec, Face, Mode, Parity,
    PhysicalField, SpectralField, TransverseBc,
};
pub use error::{Error, Result};
pub use forcing::{Forcing, ForcingMode, ForcingSpec};
pub use operators::{LinearSymbol, SolverParams};
pub use timestepper::{DiagnosticsRecord, SimState};

/// Complex scalar used for modal coefficients.
pub type C64 = num_complex::Complex64;
