//! One-dimensional building blocks of the tensor basis.
//!
//! Every direction is one of:
//!
//! * `Fourier`: `e^{iκs}` on a period `P`, `κ = 2πk/P`, coefficients in FFT order.
//! * `Sine`: `sin(n s)`, `n = 1..N`, on `s ∈ (0, π)`; the companion cosine family
//!   `cos(n s)` appears after odd derivatives.
//! * `Trivial`: a single constant mode (unused third direction when `d = 1`).
//!
//! `s` is the shifted coordinate `coordinate - origin`. All transforms are
//! unnormalised FFTs underneath; sine directions use the odd extension to
//! `(0, 2π)`.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AxisKind {
    Fourier,
    Sine,
    Trivial,
}

/// Basis family carried by a transverse direction of a spectral field.
///
/// Odd derivatives of sine modes land in the cosine family and back.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Parity {
    #[default]
    Standard,
    Companion,
}

impl Parity {
    pub fn flip(self) -> Self {
        match self {
            Parity::Standard => Parity::Companion,
            Parity::Companion => Parity::Standard,
        }
    }
}

/// Smallest integer `>= n` whose only prime factors are 2, 3 and 5.
pub fn next_smooth(n: usize) -> usize {
    let mut m = n.max(1);
    loop {
        let mut r = m;
        for p in [2, 3, 5] {
            while r.is_multiple_of(p) {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

/// Modal description of one direction.
#[derive(Clone, Debug)]
pub struct Axis {
    kind: AxisKind,
    n: usize,
    period: f64,
    origin: f64,
    wavenumbers: Vec<f64>,
}

impl Axis {
    pub fn fourier(n: usize, period: f64, origin: f64) -> Self {
        let wavenumbers = (0..n)
            .map(|i| 2.0 * PI * signed_index(i, n) as f64 / period)
            .collect();
        Axis {
            kind: AxisKind::Fourier,
            n,
            period,
            origin,
            wavenumbers,
        }
    }

    pub fn sine(n: usize, origin: f64) -> Self {
        Axis {
            kind: AxisKind::Sine,
            n,
            period: PI,
            origin,
            wavenumbers: (1..=n).map(|m| m as f64).collect(),
        }
    }

    pub fn trivial() -> Self {
        Axis {
            kind: AxisKind::Trivial,
            n: 1,
            period: 1.0,
            origin: 0.0,
            wavenumbers: vec![0.0],
        }
    }

    pub fn kind(&self) -> AxisKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    /// Integer label of slot `i`: signed `k` for Fourier, `n >= 1` for sine.
    pub fn index_label(&self, i: usize) -> i64 {
        match self.kind {
            AxisKind::Fourier => signed_index(i, self.n),
            AxisKind::Sine => i as i64 + 1,
            AxisKind::Trivial => 0,
        }
    }

    /// Storage slot of an integer label, if representable.
    pub fn slot_of(&self, label: i64) -> Option<usize> {
        match self.kind {
            AxisKind::Fourier => {
                let n = self.n as i64;
                if label > n / 2 || label <= -n / 2 {
                    None
                } else {
                    Some(label.rem_euclid(n) as usize)
                }
            }
            AxisKind::Sine => {
                if label >= 1 && label <= self.n as i64 {
                    Some(label as usize - 1)
                } else {
                    None
                }
            }
            AxisKind::Trivial => (label == 0).then_some(0),
        }
    }

    /// Squared L² norm of one basis function over the direction's interval.
    pub fn weight(&self) -> f64 {
        match self.kind {
            AxisKind::Fourier => self.period,
            AxisKind::Sine => PI / 2.0,
            AxisKind::Trivial => 1.0,
        }
    }

    /// Slot holding the complex conjugate partner for a real field.
    pub fn partner(&self, i: usize) -> usize {
        match self.kind {
            AxisKind::Fourier => (self.n - i) % self.n,
            _ => i,
        }
    }

    pub fn is_nyquist(&self, i: usize) -> bool {
        self.kind == AxisKind::Fourier && self.n.is_multiple_of(2) && i == self.n / 2
    }

    /// Largest retained label under the 2/3 truncation rule.
    pub fn cutoff(&self) -> usize {
        match self.kind {
            AxisKind::Fourier => (self.n.saturating_sub(1)) / 3,
            AxisKind::Sine => 2 * self.n / 3,
            AxisKind::Trivial => 0,
        }
    }

    pub fn keeps(&self, i: usize) -> bool {
        self.index_label(i).unsigned_abs() as usize <= self.cutoff()
    }

    /// Physical coordinates of the collocation nodes.
    pub fn nodes(&self) -> Vec<f64> {
        match self.kind {
            AxisKind::Fourier => (0..self.n)
                .map(|j| self.origin + j as f64 * self.period / self.n as f64)
                .collect(),
            AxisKind::Sine => {
                let m = (self.n + 1) as f64;
                (1..=self.n).map(|j| self.origin + j as f64 * PI / m).collect()
            }
            AxisKind::Trivial => vec![0.0],
        }
    }

    /// `order`-th derivative of basis function `i` at physical coordinate `coord`.
    ///
    /// The Fourier Nyquist slot is evaluated as the real cosine it represents.
    pub fn eval(&self, i: usize, parity: Parity, coord: f64, order: u32) -> C64 {
        let s = coord - self.origin;
        let kappa = self.wavenumbers[i];
        match self.kind {
            AxisKind::Trivial => {
                if order == 0 {
                    C64::new(1.0, 0.0)
                } else {
                    ZERO
                }
            }
            AxisKind::Fourier => {
                if self.is_nyquist(i) {
                    let phase = kappa * s + order as f64 * PI / 2.0;
                    C64::new(kappa.powi(order as i32) * phase.cos(), 0.0)
                } else {
                    (I * kappa).powu(order) * C64::from_polar(1.0, kappa * s)
                }
            }
            AxisKind::Sine => {
                let phase = kappa * s + order as f64 * PI / 2.0;
                let v = match parity {
                    Parity::Standard => phase.sin(),
                    Parity::Companion => phase.cos(),
                };
                C64::new(kappa.powi(order as i32) * v, 0.0)
            }
        }
    }

    /// Collocation transform on the axis' own nodes.
    pub fn collocation(&self) -> Grid1 {
        match self.kind {
            AxisKind::Fourier => Grid1::new(self, self.n, None),
            AxisKind::Sine => Grid1::new(self, 2 * (self.n + 1), None),
            AxisKind::Trivial => Grid1::new(self, 1, None),
        }
    }

    /// Smallest grid on which products of `degree` fields whose labels are
    /// bounded by `bandwidth` are represented without aliasing.
    pub fn exact_grid(&self, degree: usize, bandwidth: usize, oversample: usize) -> Grid1 {
        let b = degree * bandwidth;
        match self.kind {
            AxisKind::Fourier => {
                let size = next_smooth((b + 1).max(self.n) * oversample);
                Grid1::new(self, size, None)
            }
            AxisKind::Sine => {
                let half = next_smooth((b + 1).max(self.n + 1) * oversample);
                // Polynomial integrands are band limited to `b`; sampled
                // non-polynomial ones use the whole grid.
                let pmax = if oversample == 1 { Some(b) } else { None };
                Grid1::new(self, 2 * half, pmax)
            }
            AxisKind::Trivial => Grid1::new(self, 1, None),
        }
    }
}

fn signed_index(i: usize, n: usize) -> i64 {
    if i <= n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// A uniform grid along one axis together with the transforms between modal
/// coefficients of that axis and values on the grid.
///
/// For sine axes the grid covers the full odd/even extension `s_j = jπ/M`,
/// `j = 0..2M`.
#[derive(Clone)]
pub struct Grid1 {
    kind: AxisKind,
    n: usize,
    size: usize,
    period: f64,
    fwd: Option<Arc<dyn Fft<f64>>>,
    inv: Option<Arc<dyn Fft<f64>>>,
    /// Largest extended-grid frequency read by the sine projection.
    pmax: usize,
    /// Row `n-1`: `2n/(n² - p²)` for `p = (n+1) mod 2, +2, … ≤ pmax`.
    projection: Option<Arc<Vec<Vec<f64>>>>,
}

impl std::fmt::Debug for Grid1 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Grid1")
            .field("kind", &self.kind)
            .field("n", &self.n)
            .field("size", &self.size)
            .finish()
    }
}

thread_local! {
    static SCRATCH: std::cell::RefCell<Vec<C64>> = const { std::cell::RefCell::new(Vec::new()) };
}

fn run_fft(plan: &Arc<dyn Fft<f64>>, buf: &mut [C64]) {
    SCRATCH.with(|s| {
        let mut s = s.borrow_mut();
        let need = plan.get_inplace_scratch_len();
        if s.len() < need {
            s.resize(need, ZERO);
        }
        plan.process_with_scratch(buf, &mut s[..need]);
    });
}

impl Grid1 {
    fn new(axis: &Axis, size: usize, pmax: Option<usize>) -> Self {
        let (fwd, inv) = if axis.kind == AxisKind::Trivial {
            (None, None)
        } else {
            let mut planner = FftPlanner::new();
            (
                Some(planner.plan_fft_forward(size)),
                Some(planner.plan_fft_inverse(size)),
            )
        };
        // The Nyquist slot of the extended grid carries no resolved content.
        let pmax = pmax.unwrap_or(size / 2).min((size / 2).saturating_sub(1));
        let projection = (axis.kind == AxisKind::Sine).then(|| {
            let rows = (1..=axis.n)
                .map(|n| {
                    let start = (n + 1) % 2;
                    (start..=pmax)
                        .step_by(2)
                        .map(|p| {
                            let (n, p) = (n as f64, p as f64);
                            2.0 * n / (n * n - p * p)
                        })
                        .collect()
                })
                .collect();
            Arc::new(rows)
        });
        Grid1 {
            kind: axis.kind,
            n: axis.n,
            size,
            period: axis.period,
            fwd,
            inv,
            pmax,
            projection,
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// `true` for the single-point grid of an unused direction; every
    /// transform on it is the identity.
    pub fn is_trivial(&self) -> bool {
        self.kind == AxisKind::Trivial
    }

    /// Coordinates `s_j` (shifted, not physical) of the grid points.
    pub fn shifted_nodes(&self) -> Vec<f64> {
        match self.kind {
            AxisKind::Fourier => (0..self.size)
                .map(|j| j as f64 * self.period / self.size as f64)
                .collect(),
            AxisKind::Sine => {
                let half = (self.size / 2) as f64;
                (0..self.size).map(|j| j as f64 * PI / half).collect()
            }
            AxisKind::Trivial => vec![0.0],
        }
    }

    /// Evaluates the modal series `coeffs` (length `n`) on the grid.
    pub fn synthesize(&self, coeffs: &[C64], parity: Parity, out: &mut [C64]) {
        debug_assert_eq!(coeffs.len(), self.n);
        debug_assert_eq!(out.len(), self.size);
        match self.kind {
            AxisKind::Trivial => out[0] = coeffs[0],
            AxisKind::Fourier => {
                out.iter_mut().for_each(|v| *v = ZERO);
                let g = self.size;
                for (i, &c) in coeffs.iter().enumerate() {
                    let k = signed_index(i, self.n);
                    if self.n.is_multiple_of(2) && i == self.n / 2 && g > self.n {
                        out[k as usize] += c * 0.5;
                        out[(g as i64 - k) as usize] += c * 0.5;
                    } else {
                        out[k.rem_euclid(g as i64) as usize] += c;
                    }
                }
                run_fft(self.inv.as_ref().unwrap(), out);
            }
            AxisKind::Sine => {
                out.iter_mut().for_each(|v| *v = ZERO);
                let g = self.size;
                for (i, &c) in coeffs.iter().enumerate() {
                    let n = i + 1;
                    let (pos, neg) = match parity {
                        Parity::Standard => (c * C64::new(0.0, -0.5), c * C64::new(0.0, 0.5)),
                        Parity::Companion => (c * 0.5, c * 0.5),
                    };
                    out[n] += pos;
                    out[g - n] += neg;
                }
                run_fft(self.inv.as_ref().unwrap(), out);
            }
        }
    }

    /// Galerkin (L²-orthogonal) projection of grid values onto the `n` standard
    /// modes of the axis. Exact when the sampled function is resolved by the grid.
    pub fn project(&self, values: &mut [C64], out: &mut [C64]) {
        debug_assert_eq!(values.len(), self.size);
        debug_assert_eq!(out.len(), self.n);
        match self.kind {
            AxisKind::Trivial => out[0] = values[0],
            AxisKind::Fourier => {
                run_fft(self.fwd.as_ref().unwrap(), values);
                let scale = 1.0 / self.size as f64;
                let g = self.size as i64;
                for (i, o) in out.iter_mut().enumerate() {
                    let k = signed_index(i, self.n);
                    *o = if self.n.is_multiple_of(2) && i == self.n / 2 && self.size > self.n {
                        (values[k as usize] + values[(g - k) as usize]) * scale
                    } else {
                        values[k.rem_euclid(g) as usize] * scale
                    };
                }
            }
            AxisKind::Sine => {
                run_fft(self.fwd.as_ref().unwrap(), values);
                // a_n = 2/π ∫_0^π g sin(ns) with g = Σ c_p e^{ips}:
                //   ∫ e^{ips} sin(ns) = ±iπ/2 for p = ±n, 2n/(n² - p²) for n + p odd.
                let g = self.size;
                let scale = 2.0 / (PI * g as f64);
                let table = self.projection.as_ref().unwrap();
                let sym: Vec<C64> = (0..=self.pmax)
                    .map(|p| if p == 0 { values[0] } else { values[p] + values[g - p] })
                    .collect();
                for (row, o) in out.iter_mut().enumerate() {
                    let n = row + 1;
                    let mut acc = if n <= self.pmax {
                        (values[n] - values[g - n]) * C64::new(0.0, PI / 2.0)
                    } else {
                        ZERO
                    };
                    let start = (n + 1) % 2;
                    for (w, v) in table[row].iter().zip(sym[start..].iter().step_by(2)) {
                        acc += v * *w;
                    }
                    *o = acc * scale;
                }
            }
        }
    }

    /// Exact integral over the axis interval of the function sampled on the grid.
    pub fn integrate(&self, values: &mut [C64]) -> C64 {
        match self.kind {
            AxisKind::Trivial => values[0],
            AxisKind::Fourier => {
                let sum: C64 = values.iter().sum();
                sum * (self.period / self.size as f64)
            }
            AxisKind::Sine => {
                run_fft(self.fwd.as_ref().unwrap(), values);
                let g = self.size;
                let scale = 1.0 / g as f64;
                let mut acc = values[0] * PI;
                for (idx, &v) in values.iter().enumerate().skip(1) {
                    let p = signed_index(idx, g);
                    if p % 2 != 0 && idx != g / 2 {
                        // ∫_0^π e^{ips} ds = 2i/p for odd p, 0 for even p ≠ 0.
                        acc += v * C64::new(0.0, 2.0 / p as f64);
                    }
                }
                acc * scale
            }
        }
    }

    /// Collocation forward transform on the sine interior nodes or the Fourier
    /// grid: values (length `n`) to coefficients (length `n`).
    pub fn collocation_forward(&self, values: &[C64], out: &mut [C64]) {
        match self.kind {
            AxisKind::Trivial => out[0] = values[0],
            AxisKind::Fourier => {
                let mut buf = values.to_vec();
                run_fft(self.fwd.as_ref().unwrap(), &mut buf);
                let scale = 1.0 / self.size as f64;
                for (o, v) in out.iter_mut().zip(buf) {
                    *o = v * scale;
                }
            }
            AxisKind::Sine => {
                let g = self.size;
                let m = g / 2;
                let mut buf = vec![ZERO; g];
                for (j, &v) in values.iter().enumerate() {
                    buf[j + 1] = v;
                    buf[g - j - 1] = -v;
                }
                run_fft(self.fwd.as_ref().unwrap(), &mut buf);
                // a_n = i S_n / M
                for (i, o) in out.iter_mut().enumerate() {
                    *o = I * buf[i + 1] / m as f64;
                }
            }
        }
    }

    /// Collocation inverse transform, the exact inverse of
    /// [`collocation_forward`](Self::collocation_forward) on the standard basis.
    pub fn collocation_inverse(&self, coeffs: &[C64], parity: Parity, out: &mut [C64]) {
        match self.kind {
            AxisKind::Trivial => out[0] = coeffs[0],
            AxisKind::Fourier => {
                let mut buf = coeffs.to_vec();
                run_fft(self.inv.as_ref().unwrap(), &mut buf);
                out.copy_from_slice(&buf);
            }
            AxisKind::Sine => {
                let mut buf = vec![ZERO; self.size];
                self.synthesize(coeffs, parity, &mut buf);
                out.copy_from_slice(&buf[1..=self.n]);
            }
        }
    }
}
