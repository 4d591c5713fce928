use ndarray::Array3;

use super::axis::{Grid1, Parity};
use crate::par;
use crate::C64;

/// Tensor product of three one-dimensional grids.
#[derive(Clone, Debug)]
pub struct TensorGrid {
    grids: [Grid1; 3],
}

impl TensorGrid {
    pub fn new(grids: [Grid1; 3]) -> Self {
        TensorGrid { grids }
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.grids[0].size(), self.grids[1].size(), self.grids[2].size())
    }

    pub fn grid(&self, axis: usize) -> &Grid1 {
        &self.grids[axis]
    }

    /// Evaluates a coefficient tensor on the grid. Transverse parities select
    /// sine or cosine synthesis on sine axes.
    pub fn synthesize(&self, coeffs: &Array3<C64>, parity: [Parity; 2]) -> Array3<C64> {
        let parities = [Parity::Standard, parity[0], parity[1]];
        let mut cur = coeffs.clone();
        for axis in [2, 1, 0] {
            let g = &self.grids[axis];
            if g.is_trivial() {
                continue;
            }
            let p = parities[axis];
            cur = par::map_lanes(&cur, axis, g.size(), |src, dst| g.synthesize(src, p, dst));
        }
        cur
    }

    /// Galerkin projection of grid values onto a coefficient tensor with
    /// `modes` entries per axis.
    pub fn project(&self, values: &Array3<C64>, modes: [usize; 3]) -> Array3<C64> {
        let mut cur = values.clone();
        for axis in [0, 1, 2] {
            let g = &self.grids[axis];
            if g.is_trivial() {
                continue;
            }
            cur = par::map_lanes(&cur, axis, modes[axis], |src, dst| g.project(src, dst));
        }
        cur
    }

    /// Exact integral of the sampled function over the box.
    pub fn integrate(&self, values: &Array3<C64>) -> C64 {
        let mut cur = values.clone();
        for axis in [2, 1, 0] {
            let g = &self.grids[axis];
            if g.is_trivial() {
                continue;
            }
            cur = par::map_lanes(&cur, axis, 1, |src, dst| dst[0] = g.integrate(src));
        }
        cur[[0, 0, 0]]
    }
}
