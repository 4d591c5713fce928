//! Discretised domain, modal basis and physical/spectral transforms.
//!
//! The box is `M = (0,1)_x × (-π/2, π/2)^d`. The basis is
//!
//! * `x`: `e^{2πikx}`, `k = -Nx/2+1 ..= Nx/2`, stored in FFT order;
//! * transverse, Dirichlet: `φ_n(y) = sin(n(y + π/2))`, `n = 1..=N`. Every
//!   `φ_n` and every even derivative of it vanishes on `y = ±π/2`;
//! * transverse, periodic: `e^{2im(y + π/2)}`, `m = -N/2+1 ..= N/2` (period π).
//!
//! Coefficient convention: `u = Σ û(k,n,m) e^{2πikx} φ_n(y) φ_m(z)`, so
//! `|u|² = Σ w |û|²` with `w` the product of the per-axis basis norms
//! (`1` in x, `π/2` for sine, `π` for periodic transverse). Forward followed by
//! inverse transform is the identity on the truncated span.
//!
//! When `d = 1` the third tensor axis is a single constant mode, so every field
//! is stored as a rank-3 array with a trailing extent of one.

mod axis;
mod field;
mod tensor;
mod trace;

use std::f64::consts::PI;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

pub use axis::{next_smooth, Axis, AxisKind, Grid1, Parity};
pub use field::{forward_transform, inverse_transform, Mode, PhysicalField, SpectralField};
pub use tensor::TensorGrid;
pub use trace::{boundary_trace, Face};

use crate::error::{Error, Result};

/// Boundary condition family in the transverse directions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransverseBc {
    Dirichlet,
    Periodic,
}

impl TransverseBc {
    pub fn as_str(self) -> &'static str {
        match self {
            TransverseBc::Dirichlet => "dirichlet",
            TransverseBc::Periodic => "periodic",
        }
    }
}

/// Resolution and boundary flavour of the box.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    /// Number of transverse directions, 1 or 2.
    pub d: usize,
    pub nx: usize,
    pub nt1: usize,
    /// Ignored when `d = 1`.
    #[serde(default = "default_nt2")]
    pub nt2: usize,
    pub transverse_bc: TransverseBc,
}

fn default_nt2() -> usize {
    1
}

impl DomainSpec {
    pub fn new_2d(nx: usize, nt1: usize, transverse_bc: TransverseBc) -> Self {
        DomainSpec {
            d: 1,
            nx,
            nt1,
            nt2: 1,
            transverse_bc,
        }
    }

    pub fn new_3d(nx: usize, nt1: usize, nt2: usize, transverse_bc: TransverseBc) -> Self {
        DomainSpec {
            d: 2,
            nx,
            nt1,
            nt2,
            transverse_bc,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=2).contains(&self.d) {
            return Err(Error::Domain(format!("d out of range: {} (expected 1 or 2)", self.d)));
        }
        if !self.nx.is_multiple_of(2) {
            return Err(Error::Domain(format!("Nx must be even, got {}", self.nx)));
        }
        if self.nx < 8 {
            return Err(Error::Domain(format!("Nx must be at least 8, got {}", self.nx)));
        }
        if self.nt1 < 8 {
            return Err(Error::Domain(format!("Nt1 must be at least 8, got {}", self.nt1)));
        }
        if self.d == 2 && self.nt2 < 8 {
            return Err(Error::Domain(format!("Nt2 must be at least 8, got {}", self.nt2)));
        }
        if self.transverse_bc == TransverseBc::Periodic
            && (!self.nt1.is_multiple_of(2) || (self.d == 2 && !self.nt2.is_multiple_of(2)))
        {
            return Err(Error::Domain(
                "periodic transverse resolutions must be even".to_string(),
            ));
        }
        Ok(())
    }

    /// Same spec with `nt2` normalised (set to 1 when `d = 1`).
    pub fn normalized(mut self) -> Self {
        if self.d == 1 {
            self.nt2 = 1;
        }
        self
    }
}

/// Coordinate direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis3 {
    X,
    Y,
    Z,
}

impl Axis3 {
    pub fn index(self) -> usize {
        match self {
            Axis3::X => 0,
            Axis3::Y => 1,
            Axis3::Z => 2,
        }
    }
}

/// The modal basis of a domain together with its transforms.
///
/// Built once per resolution and shared behind an [`Arc`] by every field on
/// that domain.
#[derive(Debug)]
pub struct Basis {
    spec: DomainSpec,
    axes: [Axis; 3],
    colloc: TensorGrid,
    product: [OnceLock<TensorGrid>; 2],
    quadrature: Mutex<HashMap<QuadKey, Arc<TensorGrid>>>,
}

type QuadKey = (usize, [usize; 3], usize);

/// Builds the basis for `spec`.
pub fn build_domain(spec: DomainSpec) -> Result<Arc<Basis>> {
    spec.validate()?;
    let spec = spec.normalized();
    let transverse = |n: usize| match spec.transverse_bc {
        TransverseBc::Dirichlet => Axis::sine(n, -PI / 2.0),
        TransverseBc::Periodic => Axis::fourier(n, PI, -PI / 2.0),
    };
    let axes = [
        Axis::fourier(spec.nx, 1.0, 0.0),
        transverse(spec.nt1),
        if spec.d == 2 {
            transverse(spec.nt2)
        } else {
            Axis::trivial()
        },
    ];
    let colloc = TensorGrid::new([
        axes[0].collocation(),
        axes[1].collocation(),
        axes[2].collocation(),
    ]);
    Ok(Arc::new(Basis {
        spec,
        axes,
        colloc,
        product: [OnceLock::new(), OnceLock::new()],
        quadrature: Mutex::new(HashMap::new()),
    }))
}

impl Basis {
    pub fn spec(&self) -> &DomainSpec {
        &self.spec
    }

    pub fn d(&self) -> usize {
        self.spec.d
    }

    pub fn axis(&self, i: usize) -> &Axis {
        &self.axes[i]
    }

    pub fn axes(&self) -> &[Axis; 3] {
        &self.axes
    }

    /// x-wavenumbers `ξ_k = 2πk` in storage order.
    pub fn xi(&self) -> &[f64] {
        self.axes[0].wavenumbers()
    }

    /// Transverse wavenumbers of direction `j` (1 = y, 2 = z).
    pub fn mu(&self, j: usize) -> &[f64] {
        self.axes[j].wavenumbers()
    }

    /// Storage shape `(Nx, Nt1, Nt2)` with `Nt2 = 1` when `d = 1`.
    pub fn shape(&self) -> (usize, usize, usize) {
        (self.axes[0].len(), self.axes[1].len(), self.axes[2].len())
    }

    /// Coefficient tensor shape as seen by users: two entries when `d = 1`.
    pub fn dims(&self) -> Vec<usize> {
        let (a, b, c) = self.shape();
        if self.spec.d == 1 {
            vec![a, b]
        } else {
            vec![a, b, c]
        }
    }

    /// Physical collocation node coordinates along direction `axis`.
    pub fn nodes(&self, axis: Axis3) -> Vec<f64> {
        self.axes[axis.index()].nodes()
    }

    /// Product of per-axis basis norms: the weight of `|û|²` in `|u|²`.
    pub fn weight(&self) -> f64 {
        self.axes.iter().map(Axis::weight).product()
    }

    pub fn collocation(&self) -> &TensorGrid {
        &self.colloc
    }

    pub fn check_axis(&self, axis: Axis3) -> Result<()> {
        if axis == Axis3::Z && self.spec.d == 1 {
            Err(Error::Argument("axis z requires d = 2".to_string()))
        } else {
            Ok(())
        }
    }

    /// Mode mask of the 2/3 truncation: `true` for retained slots.
    pub fn keeps(&self, i: usize, j: usize, k: usize) -> bool {
        self.axes[0].keeps(i) && self.axes[1].keeps(j) && self.axes[2].keeps(k)
    }

    /// Grid used to form the quadratic nonlinearity.
    ///
    /// In x (and periodic transverse directions) this is the collocation grid:
    /// alias-free when inputs are truncated to 2/3, aliased otherwise. Sine
    /// directions use an extended grid on which `u²` is exact, followed by the
    /// exact L² projection back onto the sine family.
    pub fn product_grid(&self, dealias: bool) -> &TensorGrid {
        self.product[dealias as usize].get_or_init(|| {
            let grids = [0, 1, 2].map(|a| {
                let ax = &self.axes[a];
                match ax.kind() {
                    AxisKind::Sine => {
                        let band = if dealias { ax.cutoff() } else { ax.len() };
                        ax.exact_grid(2, band, 1)
                    }
                    _ => ax.collocation(),
                }
            });
            TensorGrid::new(grids)
        })
    }

    /// Grid on which products of `degree` fields with the given per-axis
    /// label bandwidths integrate exactly, oversampled by `oversample`.
    /// Grids are cached per argument triple.
    pub fn quadrature_grid(&self, degree: usize, bandwidth: [usize; 3], oversample: usize) -> Arc<TensorGrid> {
        let key = (degree, bandwidth, oversample);
        let mut cache = self.quadrature.lock().unwrap_or_else(|e| e.into_inner());
        Arc::clone(cache.entry(key).or_insert_with(|| {
            let grids = [0, 1, 2].map(|a| self.axes[a].exact_grid(degree, bandwidth[a], oversample));
            Arc::new(TensorGrid::new(grids))
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn basis_tables_for_small_dirichlet_domain() {
        let b = build_domain(DomainSpec::new_2d(8, 8, TransverseBc::Dirichlet)).unwrap();
        let mut xi: Vec<f64> = b.xi().iter().map(|v| v / (2.0 * PI)).collect();
        xi.sort_by(f64::total_cmp);
        assert_eq!(xi, vec![-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0, 4.0]);
        assert_eq!(b.mu(1), &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]);
        assert_eq!(b.dims(), vec![8, 8]);
    }

    #[test]
    fn three_dimensional_shape() {
        let b = build_domain(DomainSpec::new_3d(16, 8, 8, TransverseBc::Dirichlet)).unwrap();
        assert_eq!(b.dims(), vec![16, 8, 8]);
        assert_eq!(b.shape(), (16, 8, 8));
    }

    #[test]
    fn rejects_bad_specs() {
        let mut s = DomainSpec::new_2d(8, 8, TransverseBc::Dirichlet);
        s.d = 3;
        let err = build_domain(s).unwrap_err();
        assert!(err.to_string().contains("d out of range"));
        assert!(build_domain(DomainSpec::new_2d(9, 8, TransverseBc::Dirichlet)).is_err());
        assert!(build_domain(DomainSpec::new_2d(6, 8, TransverseBc::Dirichlet)).is_err());
        assert!(build_domain(DomainSpec::new_2d(8, 7, TransverseBc::Dirichlet)).is_err());
        assert!(build_domain(DomainSpec::new_3d(8, 8, 4, TransverseBc::Dirichlet)).is_err());
    }

    #[test]
    fn periodic_transverse_uses_even_wavenumbers() {
        let b = build_domain(DomainSpec::new_2d(8, 8, TransverseBc::Periodic)).unwrap();
        let mu = b.mu(1);
        assert_eq!(mu[1], 2.0);
        assert_eq!(mu[7], -2.0);
        assert_relative_eq!(b.weight(), PI);
    }

    #[test]
    fn dirichlet_nodes_are_interior() {
        let b = build_domain(DomainSpec::new_2d(8, 8, TransverseBc::Dirichlet)).unwrap();
        let y = b.nodes(Axis3::Y);
        assert_eq!(y.len(), 8);
        assert!(y.iter().all(|v| v.abs() < PI / 2.0));
        assert_relative_eq!(y[0] + y[7], 0.0, epsilon = 1e-15);
    }
}
