use std::sync::Arc;

use ndarray::{Array3, Zip};

use super::axis::{AxisKind, Parity};
use super::Basis;
use crate::error::{Error, Result};
use crate::par;
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Modal coefficients of a real field on a [`Basis`].
///
/// `parity` records, per transverse direction, whether a sine direction holds
/// the standard sine family or (after an odd derivative) the cosine family.
#[derive(Clone)]
pub struct SpectralField {
    basis: Arc<Basis>,
    coeffs: Array3<C64>,
    parity: [Parity; 2],
}

impl std::fmt::Debug for SpectralField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralField")
            .field("dims", &self.basis.dims())
            .field("parity", &self.parity)
            .finish()
    }
}

impl SpectralField {
    pub fn zeros(basis: &Arc<Basis>) -> Self {
        SpectralField {
            basis: Arc::clone(basis),
            coeffs: Array3::zeros(basis.shape()),
            parity: [Parity::Standard; 2],
        }
    }

    pub fn from_coeffs(basis: &Arc<Basis>, coeffs: Array3<C64>) -> Result<Self> {
        let (a, b, c) = basis.shape();
        if coeffs.dim() != (a, b, c) {
            let (x, y, z) = coeffs.dim();
            return Err(Error::Shape {
                expected: vec![a, b, c],
                got: vec![x, y, z],
            });
        }
        Ok(SpectralField {
            basis: Arc::clone(basis),
            coeffs,
            parity: [Parity::Standard; 2],
        })
    }

    /// Sum of real tensor-product modes `amplitude · X_k(x) T_n(y) T_m(z)`.
    ///
    /// Real mode convention, per axis:
    /// * x: `k >= 0` is `cos(2πkx)`, `k < 0` is `sin(2π|k|x)`;
    /// * Dirichlet transverse: `n >= 1` is `sin(n(y+π/2))`;
    /// * periodic transverse: `n >= 0` is `cos(2n(y+π/2))`, `n < 0` is `sin(2|n|(y+π/2))`;
    /// * the unused third axis when `d = 1` only admits `m = 0`.
    pub fn from_real_modes(basis: &Arc<Basis>, modes: &[(Mode, f64)]) -> Result<Self> {
        let mut f = SpectralField::zeros(basis);
        for &(mode, amp) in modes {
            f.add_real_mode(mode, amp)?;
        }
        Ok(f)
    }

    pub fn add_real_mode(&mut self, mode: Mode, amplitude: f64) -> Result<()> {
        let parts = [
            real_axis_coeffs(&self.basis, 0, mode.k)?,
            real_axis_coeffs(&self.basis, 1, mode.n)?,
            real_axis_coeffs(&self.basis, 2, mode.m)?,
        ];
        for &(i, a) in &parts[0] {
            for &(j, b) in &parts[1] {
                for &(l, c) in &parts[2] {
                    self.coeffs[[i, j, l]] += a * b * c * amplitude;
                }
            }
        }
        Ok(())
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn coeffs(&self) -> &Array3<C64> {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut Array3<C64> {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Array3<C64> {
        self.coeffs
    }

    pub fn parity(&self) -> [Parity; 2] {
        self.parity
    }

    pub fn with_parity(mut self, parity: [Parity; 2]) -> Self {
        self.parity = parity;
        self
    }

    /// `true` when every sine direction carries the standard sine family.
    pub fn is_standard(&self) -> bool {
        self.parity == [Parity::Standard; 2]
    }

    pub fn require_standard(&self) -> Result<()> {
        if self.is_standard() {
            Ok(())
        } else {
            Err(Error::BasisMismatch(
                "field is in the companion cosine basis".to_string(),
            ))
        }
    }

    /// Coefficient at integer labels `(k, n, m)`; `None` if not representable.
    pub fn get(&self, k: i64, n: i64, m: i64) -> Option<C64> {
        let i = self.basis.axis(0).slot_of(k)?;
        let j = self.basis.axis(1).slot_of(n)?;
        let l = self.basis.axis(2).slot_of(m)?;
        Some(self.coeffs[[i, j, l]])
    }

    pub fn set(&mut self, k: i64, n: i64, m: i64, value: C64) -> Result<()> {
        let slot = |a: usize, label: i64| {
            self.basis
                .axis(a)
                .slot_of(label)
                .ok_or_else(|| Error::Argument(format!("label {label} not representable on axis {a}")))
        };
        let (i, j, l) = (slot(0, k)?, slot(1, n)?, slot(2, m)?);
        self.coeffs[[i, j, l]] = value;
        Ok(())
    }

    pub fn same_domain(&self, other: &SpectralField) -> Result<()> {
        if Arc::ptr_eq(&self.basis, &other.basis) || self.basis.spec() == other.basis.spec() {
            Ok(())
        } else {
            Err(Error::DomainMismatch)
        }
    }

    fn same_layout(&self, other: &SpectralField) -> Result<()> {
        self.same_domain(other)?;
        if self.parity != other.parity {
            return Err(Error::BasisMismatch("parity differs between operands".to_string()));
        }
        Ok(())
    }

    pub fn scaled(&self, s: f64) -> SpectralField {
        let mut out = self.clone();
        out.coeffs.mapv_inplace(|c| c * s);
        out
    }

    /// `self + alpha * other`.
    pub fn axpy(&self, alpha: f64, other: &SpectralField) -> Result<SpectralField> {
        self.same_layout(other)?;
        let mut out = self.clone();
        Zip::from(&mut out.coeffs)
            .and(&other.coeffs)
            .for_each(|a, &b| *a += b * alpha);
        Ok(out)
    }

    pub fn add(&self, other: &SpectralField) -> Result<SpectralField> {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &SpectralField) -> Result<SpectralField> {
        self.axpy(-1.0, other)
    }

    /// L²(M) inner product, evaluated modally.
    pub fn inner(&self, other: &SpectralField) -> Result<f64> {
        self.same_layout(other)?;
        Ok(self.weighted_sum(other, |_, _, _| 1.0))
    }

    /// `Σ w · g(i,j,l) · Re(conj(a) b)` over all slots.
    pub(crate) fn weighted_sum<G>(&self, other: &SpectralField, g: G) -> f64
    where
        G: Fn(usize, usize, usize) -> f64,
    {
        let mut acc = 0.0;
        for ((i, j, l), a) in self.coeffs.indexed_iter() {
            let b = other.coeffs[[i, j, l]];
            let w = g(i, j, l);
            if w != 0.0 {
                acc += w * (a.re * b.re + a.im * b.im);
            }
        }
        acc * self.basis.weight()
    }

    pub fn norm_sq(&self) -> f64 {
        self.weighted_sum(self, |_, _, _| 1.0)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Largest |label| per axis carrying a coefficient above `tol · max_abs`.
    pub fn bandwidth(&self) -> [usize; 3] {
        let cut = self.max_abs() * 1e-300;
        let mut band = [0usize; 3];
        for ((i, j, l), c) in self.coeffs.indexed_iter() {
            if c.norm() > cut {
                for (a, idx) in [i, j, l].into_iter().enumerate() {
                    let lab = self.basis.axis(a).index_label(idx).unsigned_abs() as usize;
                    band[a] = band[a].max(lab);
                }
            }
        }
        band
    }

    /// Enforces the conjugate symmetry of a real field by averaging each
    /// coefficient with its partner.
    pub fn enforce_real(&mut self) {
        let (a, b, c) = self.basis.shape();
        let ax = self.basis.axes().clone();
        let src = self.coeffs.clone();
        for i in 0..a {
            let pi = ax[0].partner(i);
            for j in 0..b {
                let pj = ax[1].partner(j);
                for l in 0..c {
                    let pl = ax[2].partner(l);
                    let v = src[[i, j, l]];
                    let w = src[[pi, pj, pl]].conj();
                    self.coeffs[[i, j, l]] = (v + w) * 0.5;
                }
            }
        }
    }

    /// Largest violation of the conjugate symmetry.
    pub fn symmetry_defect(&self) -> f64 {
        let ax = self.basis.axes();
        let mut worst: f64 = 0.0;
        for ((i, j, l), v) in self.coeffs.indexed_iter() {
            let w = self.coeffs[[ax[0].partner(i), ax[1].partner(j), ax[2].partner(l)]].conj();
            worst = worst.max((v - w).norm());
        }
        worst
    }

    /// 2/3-rule truncation: zeroes every slot above the cutoff in any direction.
    pub fn dealiased(&self) -> SpectralField {
        let mut out = self.clone();
        let b = Arc::clone(&self.basis);
        for ((i, j, l), c) in out.coeffs.indexed_iter_mut() {
            if !b.keeps(i, j, l) {
                *c = ZERO;
            }
        }
        out
    }

    /// The `k = 0` slice as an x-independent field.
    pub fn x_mean_field(&self) -> SpectralField {
        let mut out = SpectralField::zeros(&self.basis).with_parity(self.parity);
        out.coeffs
            .slice_mut(ndarray::s![0..1, .., ..])
            .assign(&self.coeffs.slice(ndarray::s![0..1, .., ..]));
        out
    }

    /// Copy with the `k = 0` slice removed.
    pub fn without_x_mean(&self) -> SpectralField {
        let mut out = self.clone();
        out.coeffs.slice_mut(ndarray::s![0..1, .., ..]).fill(ZERO);
        out
    }

    /// Re-expresses the field on another basis of the same family by zero
    /// padding or truncating in every direction.
    pub fn resample(&self, target: &Arc<Basis>) -> Result<SpectralField> {
        let (s, t) = (self.basis.spec(), target.spec());
        if s.d != t.d || s.transverse_bc != t.transverse_bc {
            return Err(Error::Dimension(
                "resampling requires matching d and transverse boundary conditions".to_string(),
            ));
        }
        let mut out = SpectralField::zeros(target).with_parity(self.parity);
        for ((i, j, l), &c) in self.coeffs.indexed_iter() {
            let labels = [
                self.basis.axis(0).index_label(i),
                self.basis.axis(1).index_label(j),
                self.basis.axis(2).index_label(l),
            ];
            let slots = [0, 1, 2].map(|a| target.axis(a).slot_of(labels[a]));
            if let [Some(a), Some(b), Some(d)] = slots {
                out.coeffs[[a, b, d]] += c;
            }
        }
        Ok(out)
    }
}

/// Integer labels of a real tensor-product mode; see
/// [`SpectralField::from_real_modes`] for the convention.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Mode {
    pub k: i64,
    pub n: i64,
    #[serde(default)]
    pub m: i64,
}

impl Mode {
    pub const fn new(k: i64, n: i64) -> Self {
        Mode { k, n, m: 0 }
    }

    pub const fn new3(k: i64, n: i64, m: i64) -> Self {
        Mode { k, n, m }
    }
}

fn real_axis_coeffs(basis: &Basis, a: usize, label: i64) -> Result<Vec<(usize, C64)>> {
    let ax = basis.axis(a);
    let bad = || Error::Argument(format!("mode label {label} not representable on axis {a}"));
    match ax.kind() {
        AxisKind::Trivial => {
            if label == 0 {
                Ok(vec![(0, C64::new(1.0, 0.0))])
            } else {
                Err(bad())
            }
        }
        AxisKind::Sine => {
            let s = ax.slot_of(label).ok_or_else(bad)?;
            Ok(vec![(s, C64::new(1.0, 0.0))])
        }
        AxisKind::Fourier => {
            let k = label.abs();
            let pos = ax.slot_of(k).ok_or_else(bad)?;
            if k == 0 {
                return if label == 0 {
                    Ok(vec![(0, C64::new(1.0, 0.0))])
                } else {
                    Err(bad())
                };
            }
            if ax.is_nyquist(pos) {
                // Only the cosine survives at the Nyquist wavenumber.
                return if label > 0 {
                    Ok(vec![(pos, C64::new(1.0, 0.0))])
                } else {
                    Err(bad())
                };
            }
            let neg = ax.slot_of(-k).ok_or_else(bad)?;
            if label > 0 {
                Ok(vec![(pos, C64::new(0.5, 0.0)), (neg, C64::new(0.5, 0.0))])
            } else {
                Ok(vec![(pos, C64::new(0.0, -0.5)), (neg, C64::new(0.0, 0.5))])
            }
        }
    }
}

/// Real samples of a field on the collocation grid.
#[derive(Clone)]
pub struct PhysicalField {
    basis: Arc<Basis>,
    values: Array3<f64>,
}

impl std::fmt::Debug for PhysicalField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PhysicalField")
            .field("dims", &self.basis.dims())
            .finish()
    }
}

impl PhysicalField {
    pub fn new(basis: &Arc<Basis>, values: Array3<f64>) -> Result<Self> {
        let (a, b, c) = basis.shape();
        if values.dim() != (a, b, c) {
            let (x, y, z) = values.dim();
            return Err(Error::Shape {
                expected: vec![a, b, c],
                got: vec![x, y, z],
            });
        }
        Ok(PhysicalField {
            basis: Arc::clone(basis),
            values,
        })
    }

    /// Samples `f(x, y, z)` on the collocation nodes (`z = 0` when `d = 1`).
    pub fn from_fn<F: Fn(f64, f64, f64) -> f64>(basis: &Arc<Basis>, f: F) -> Self {
        let xs = basis.axis(0).nodes();
        let ys = basis.axis(1).nodes();
        let zs = basis.axis(2).nodes();
        let values = Array3::from_shape_fn(basis.shape(), |(i, j, l)| f(xs[i], ys[j], zs[l]));
        PhysicalField {
            basis: Arc::clone(basis),
            values,
        }
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn values(&self) -> &Array3<f64> {
        &self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Quadrature weight of one collocation node.
    pub fn node_weight(&self) -> f64 {
        use std::f64::consts::PI;
        self.basis
            .axes()
            .iter()
            .map(|ax| match ax.kind() {
                AxisKind::Fourier => {
                    let period = ax.weight();
                    period / ax.len() as f64
                }
                AxisKind::Sine => PI / (ax.len() + 1) as f64,
                AxisKind::Trivial => 1.0,
            })
            .product()
    }

    /// Node-weighted sum of squares; equals `|u|²` on the truncated span.
    pub fn grid_norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>() * self.node_weight()
    }
}

/// Physical values to modal coefficients on the collocation grid.
pub fn forward_transform(u: &PhysicalField) -> SpectralField {
    let grid = u.basis.collocation();
    let mut cur = u.values.mapv(|v| C64::new(v, 0.0));
    for axis in [0, 1, 2] {
        let g = grid.grid(axis);
        if g.is_trivial() {
            continue;
        }
        let n = cur.dim();
        let len = [n.0, n.1, n.2][axis];
        cur = par::map_lanes(&cur, axis, len, |src, dst| g.collocation_forward(src, dst));
    }
    SpectralField {
        basis: Arc::clone(&u.basis),
        coeffs: cur,
        parity: [Parity::Standard; 2],
    }
}

/// Modal coefficients to physical values; the imaginary residue of a
/// conjugate-symmetric field is discarded.
pub fn inverse_transform(u: &SpectralField) -> PhysicalField {
    let grid = u.basis.collocation();
    let parities = [Parity::Standard, u.parity[0], u.parity[1]];
    let mut cur = u.coeffs.clone();
    for axis in [2, 1, 0] {
        let g = grid.grid(axis);
        if g.is_trivial() {
            continue;
        }
        let p = parities[axis];
        let n = cur.dim();
        let len = [n.0, n.1, n.2][axis];
        cur = par::map_lanes(&cur, axis, len, |src, dst| g.collocation_inverse(src, p, dst));
    }
    PhysicalField {
        basis: Arc::clone(&u.basis),
        values: cur.mapv(|c| c.re),
    }
}

impl SpectralField {
    pub fn to_physical(&self) -> PhysicalField {
        inverse_transform(self)
    }
}

impl PhysicalField {
    pub fn to_spectral(&self) -> SpectralField {
        forward_transform(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{build_domain, DomainSpec, TransverseBc};
    use std::f64::consts::PI;

    fn dirichlet(nx: usize, nt: usize) -> Arc<Basis> {
        build_domain(DomainSpec::new_2d(nx, nt, TransverseBc::Dirichlet)).unwrap()
    }

    #[test]
    fn cos_cos_is_one_hot_pair() {
        let b = dirichlet(16, 8);
        let u = PhysicalField::from_fn(&b, |x, y, _| (2.0 * PI * x).cos() * y.cos());
        let s = forward_transform(&u);
        for ((i, j, l), c) in s.coeffs().indexed_iter() {
            let k = b.axis(0).index_label(i);
            let n = b.axis(1).index_label(j);
            let expect = if k.abs() == 1 && n == 1 && l == 0 { 0.5 } else { 0.0 };
            assert!((c - C64::new(expect, 0.0)).norm() < 1e-14, "{k} {n} {c}");
        }
    }

    #[test]
    fn zero_maps_to_zero() {
        let b = dirichlet(8, 8);
        let u = PhysicalField::from_fn(&b, |_, _, _| 0.0);
        assert_eq!(forward_transform(&u).max_abs(), 0.0);
        assert_eq!(inverse_transform(&SpectralField::zeros(&b)).max_abs(), 0.0);
    }

    #[test]
    fn real_mode_builder_matches_sampling() {
        let b = build_domain(DomainSpec::new_3d(8, 8, 8, TransverseBc::Periodic)).unwrap();
        let f = SpectralField::from_real_modes(
            &b,
            &[(Mode::new3(1, 1, 0), 1.0), (Mode::new3(-2, -1, 2), 0.5)],
        )
        .unwrap();
        let phys = inverse_transform(&f);
        let xs = b.nodes(crate::Axis3::X);
        let ys = b.nodes(crate::Axis3::Y);
        let zs = b.nodes(crate::Axis3::Z);
        for ((i, j, l), v) in phys.values().indexed_iter() {
            let (x, s, r) = (xs[i], ys[j] + PI / 2.0, zs[l] + PI / 2.0);
            let expect = (2.0 * PI * x).cos() * (2.0 * s).cos()
                + 0.5 * (4.0 * PI * x).sin() * (2.0 * s).sin() * (4.0 * r).cos();
            assert!((v - expect).abs() < 1e-13);
        }
    }

    #[test]
    fn resample_pads_and_truncates() {
        let small = dirichlet(8, 8);
        let big = dirichlet(16, 12);
        let f = SpectralField::from_real_modes(&small, &[(Mode::new(3, 2), 1.0)]).unwrap();
        let g = f.resample(&big).unwrap();
        assert!((g.norm_sq() - f.norm_sq()).abs() < 1e-15);
        let back = g.resample(&small).unwrap();
        assert!(back.sub(&f).unwrap().max_abs() < 1e-15);
    }
}
