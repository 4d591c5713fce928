use ndarray::{Array2, Axis};

use super::axis::Parity;
use super::SpectralField;
use crate::error::{Error, Result};
use crate::par;
use crate::C64;

/// A face of the box.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Face {
    X0,
    X1,
    YMinus,
    YPlus,
    ZMinus,
    ZPlus,
}

impl Face {
    fn normal_axis(self) -> usize {
        match self {
            Face::X0 | Face::X1 => 0,
            Face::YMinus | Face::YPlus => 1,
            Face::ZMinus | Face::ZPlus => 2,
        }
    }

    fn coordinate(self) -> f64 {
        use std::f64::consts::FRAC_PI_2;
        match self {
            Face::X0 => 0.0,
            Face::X1 => 1.0,
            Face::YMinus | Face::ZMinus => -FRAC_PI_2,
            Face::YPlus | Face::ZPlus => FRAC_PI_2,
        }
    }
}

/// Values of `∂^order u / ∂n^order` (derivative along the face normal) on
/// `face`, sampled at the collocation nodes of the two tangential directions.
///
/// The result is indexed by the tangential axes in their natural order, e.g.
/// `(y, z)` for x-faces and `(x, z)` for y-faces; the trailing extent is one
/// when `d = 1`.
pub fn boundary_trace(u: &SpectralField, face: Face, order: u32) -> Result<Array2<f64>> {
    if order > 3 {
        return Err(Error::Argument(format!("trace derivative order {order} > 3")));
    }
    let basis = u.basis();
    let normal = face.normal_axis();
    if normal == 2 && basis.d() == 1 {
        return Err(Error::Argument(format!("face {face:?} requires d = 2")));
    }
    let parities = [Parity::Standard, u.parity()[0], u.parity()[1]];
    let ax = basis.axis(normal);
    let weights: Vec<C64> = (0..ax.len())
        .map(|i| ax.eval(i, parities[normal], face.coordinate(), order))
        .collect();
    let contracted = u
        .coeffs()
        .map_axis(Axis(normal), |lane| lane.iter().zip(&weights).map(|(c, w)| c * w).sum::<C64>());
    let mut cur = contracted.insert_axis(Axis(normal));
    let grid = basis.collocation();
    for a in [2, 1, 0] {
        if a == normal {
            continue;
        }
        let g = grid.grid(a);
        let p = parities[a];
        let len = basis.axis(a).len();
        cur = par::map_lanes(&cur, a, len, |src, dst| g.collocation_inverse(src, p, dst));
    }
    Ok(cur.index_axis(Axis(normal), 0).mapv(|c| c.re))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{build_domain, DomainSpec, Mode, TransverseBc};

    #[test]
    fn cos_cos_traces() {
        let b = build_domain(DomainSpec::new_2d(16, 8, TransverseBc::Dirichlet)).unwrap();
        let u = SpectralField::from_real_modes(&b, &[(Mode::new(1, 1), 1.0)]).unwrap();
        let top = boundary_trace(&u, Face::YPlus, 0).unwrap();
        assert!(top.iter().all(|v| v.abs() < 1e-14));
        let top2 = boundary_trace(&u, Face::YPlus, 2).unwrap();
        assert!(top2.iter().all(|v| v.abs() < 1e-14));
        let a = boundary_trace(&u, Face::X0, 1).unwrap();
        let c = boundary_trace(&u, Face::X1, 1).unwrap();
        assert_eq!(a.dim(), (8, 1));
        for (p, q) in a.iter().zip(c.iter()) {
            assert!((p - q).abs() < 1e-12);
            assert!(p.abs() < 1e-12);
        }
        // u_y at the wall: d/dy cos(y) = -sin(y) = -1 at y = π/2, times cos(2πx).
        let wall = boundary_trace(&u, Face::YPlus, 1).unwrap();
        let xs = b.nodes(crate::Axis3::X);
        for (i, v) in wall.column(0).iter().enumerate() {
            let expect = -(2.0 * std::f64::consts::PI * xs[i]).cos();
            assert!((v - expect).abs() < 1e-13);
        }
    }

    #[test]
    fn rejects_bad_requests() {
        let b = build_domain(DomainSpec::new_2d(8, 8, TransverseBc::Dirichlet)).unwrap();
        let u = SpectralField::zeros(&b);
        assert!(boundary_trace(&u, Face::ZPlus, 0).is_err());
        assert!(boundary_trace(&u, Face::X0, 4).is_err());
    }
}
